"""Exact-arithmetic toolkit for dagger / O(1)-volutive categories, Frobenius
algebras, their bimodule completions and lattice state sums on surfaces."""

__version__ = "0.1.0"
