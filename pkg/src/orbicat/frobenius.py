"""Finite-dimensional (optionally Z/2-graded) Frobenius algebras and bimodules.

An algebra is stored through its structure constants c[i][j][k], meaning
e_i e_j = sum_k c[i][j][k] e_k.  Elements are coefficient tuples.  Bimodules
carry one action matrix per basis element of each algebra; left actions form a
representation, right actions an anti-representation (v.(ab) = (v.a).b).

Koszul signs enter the Nakayama automorphism and the opposite algebra only.
The bimodule tensor calculus (relative tensor products, duals, adjoints) is
computed on underlying vector spaces without signs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .exactnum import (Matrix, SingularMatrix, coerce, format_scalar, nullspace_basis, one,
                       parse_scalar, span_basis, split_idempotent, zero)


class DegeneratePairing(ValueError):
    def __init__(self, det=0):
        super().__init__("Gram matrix of the counit is singular")
        self.det = det


class AxiomFailure(ValueError):
    def __init__(self, axiom: str, witness):
        super().__init__(f"{axiom} fails at {witness}")
        self.axiom = axiom
        self.witness = witness


class MiddleNotSeparable(ValueError):
    pass


class InvalidBimodule(ValueError):
    def __init__(self, axiom: str, witness):
        super().__init__(f"bimodule {axiom} fails at {witness}")
        self.axiom = axiom
        self.witness = witness


Vec = tuple


# ---------------------------------------------------------------------------
# algebras


@dataclass(frozen=True)
class Algebra:
    field: str
    dim: int
    labels: tuple
    c: tuple  # c[i][j][k]
    unit: Vec
    grading: tuple | None = None

    @classmethod
    def from_products(cls, field: str, labels: Sequence[str], product, unit: Sequence,
                      grading: Sequence[int] | None = None) -> "Algebra":
        """``product(i, j)`` returns the coefficient vector of e_i e_j."""
        n = len(labels)
        c = tuple(tuple(tuple(coerce(x, field) for x in product(i, j)) for j in range(n))
                  for i in range(n))
        return cls(field, n, tuple(labels), c, tuple(coerce(x, field) for x in unit),
                   tuple(grading) if grading is not None else None)

    # elements --------------------------------------------------------------

    def basis(self, i: int) -> Vec:
        z, o = zero(self.field), one(self.field)
        return tuple(o if k == i else z for k in range(self.dim))

    def zero_vec(self) -> Vec:
        return (zero(self.field),) * self.dim

    def vec(self, coeffs: Sequence) -> Vec:
        return tuple(coerce(x, self.field) for x in coeffs)

    def mul(self, a: Vec, b: Vec) -> Vec:
        out = [zero(self.field)] * self.dim
        for i, ai in enumerate(a):
            if not ai:
                continue
            for j, bj in enumerate(b):
                if not bj:
                    continue
                s = ai * bj
                for k, ck in enumerate(self.c[i][j]):
                    if ck:
                        out[k] = out[k] + s * ck
        return tuple(out)

    def add(self, a: Vec, b: Vec) -> Vec:
        return tuple(x + y for x, y in zip(a, b))

    def scale(self, s, a: Vec) -> Vec:
        return tuple(s * x for x in a)

    def parity(self, i: int) -> int:
        return self.grading[i] if self.grading else 0

    def sign(self, i: int, j: int) -> int:
        return -1 if self.parity(i) and self.parity(j) else 1

    # matrices --------------------------------------------------------------

    def left_matrix(self, a: Vec) -> Matrix:
        """Matrix of x -> a x."""
        cols = [self.mul(a, self.basis(j)) for j in range(self.dim)]
        return Matrix([[cols[j][k] for j in range(self.dim)] for k in range(self.dim)], self.field)

    def right_matrix(self, b: Vec) -> Matrix:
        """Matrix of x -> x b."""
        cols = [self.mul(self.basis(i), b) for i in range(self.dim)]
        return Matrix([[cols[i][k] for i in range(self.dim)] for k in range(self.dim)], self.field)

    def as_column(self, a: Vec) -> Matrix:
        return Matrix.column(list(a), self.field)

    # axioms ----------------------------------------------------------------

    def check(self) -> None:
        n = self.dim
        for i in range(n):
            ei = self.basis(i)
            if self.mul(self.unit, ei) != ei or self.mul(ei, self.unit) != ei:
                raise AxiomFailure("unit", (self.labels[i],))
        for i, j, k in itertools.product(range(n), repeat=3):
            ei, ej, ek = self.basis(i), self.basis(j), self.basis(k)
            if self.mul(self.mul(ei, ej), ek) != self.mul(ei, self.mul(ej, ek)):
                raise AxiomFailure("associativity", (self.labels[i], self.labels[j], self.labels[k]))
        if self.grading:
            for i, j in itertools.product(range(n), repeat=2):
                p = (self.parity(i) + self.parity(j)) % 2
                for k, ck in enumerate(self.c[i][j]):
                    if ck and self.parity(k) != p:
                        raise AxiomFailure("grading", (self.labels[i], self.labels[j]))

    def is_commutative(self) -> bool:
        return all(self.c[i][j] == self.c[j][i] for i in range(self.dim) for j in range(self.dim))

    def center_basis(self) -> list[Vec]:
        """Basis of {z : z e_i = e_i z for all i} (ungraded centre)."""
        rows = []
        for i in range(self.dim):
            ei = self.basis(i)
            D = self.right_matrix(ei) - self.left_matrix(ei)
            rows.extend(D.entries)
        if not rows:
            return []
        M = Matrix(rows, self.field)
        return [tuple(v.flat()) for v in nullspace_basis(M)]

    def is_invertible(self, a: Vec) -> bool:
        return self.left_matrix(a).is_invertible()

    def inverse(self, a: Vec) -> Vec:
        x = self.left_matrix(a).solve(self.as_column(self.unit))
        if x is None:
            raise SingularMatrix("element is not invertible")
        return tuple(x.flat())

    # io --------------------------------------------------------------------

    def to_json(self, counit: Vec | None = None) -> dict:
        sc = []
        for i in range(self.dim):
            for j in range(self.dim):
                for k in range(self.dim):
                    if self.c[i][j][k]:
                        sc.append([i, j, k, format_scalar(self.c[i][j][k])])
        data = {"field": self.field, "dim": self.dim, "labels": list(self.labels),
                "structure_constants": sc, "unit": [format_scalar(x) for x in self.unit]}
        if counit is not None:
            data["counit"] = [format_scalar(x) for x in counit]
        if self.grading:
            data["grading"] = list(self.grading)
        return data

    @classmethod
    def from_json(cls, data: dict) -> "Algebra":
        fld = data.get("field", "Q")
        n = int(data["dim"])
        labels = data.get("labels") or [f"e{i}" for i in range(n)]
        if len(labels) != n:
            raise ValueError("labels length differs from dim")
        c = [[[zero(fld)] * n for _ in range(n)] for _ in range(n)]
        for entry in data["structure_constants"]:
            i, j, k, s = entry
            if not all(0 <= int(t) < n for t in (i, j, k)):
                raise ValueError(f"structure constant index out of range: {entry}")
            c[int(i)][int(j)][int(k)] = c[int(i)][int(j)][int(k)] + parse_scalar(s, fld)
        unit = [parse_scalar(x, fld) for x in data["unit"]]
        if len(unit) != n:
            raise ValueError("unit length differs from dim")
        grading = data.get("grading")
        if grading is not None and (len(grading) != n or any(g not in (0, 1) for g in grading)):
            raise ValueError("grading must list 0/1 per basis element")
        return cls(fld, n, tuple(labels), tuple(tuple(tuple(r) for r in m) for m in c),
                   tuple(unit), tuple(grading) if grading else None)


@dataclass(frozen=True)
class FrobeniusAlgebra:
    alg: Algebra
    eps: Vec
    gram: Matrix
    ginv: Matrix
    delta: tuple  # delta[k] = coefficient matrix of Delta(e_k)
    name: str = ""

    @property
    def dim(self) -> int:
        return self.alg.dim

    @property
    def field(self) -> str:
        return self.alg.field

    def counit(self, a: Vec):
        s = zero(self.field)
        for x, y in zip(a, self.eps):
            if x and y:
                s = s + x * y
        return s

    def pair(self, a: Vec, b: Vec):
        return self.counit(self.alg.mul(a, b))

    def comultiply(self, a: Vec) -> Matrix:
        out = Matrix.zeros(self.dim, self.dim, self.field)
        for k, ak in enumerate(a):
            if ak:
                out = out + self.delta[k].scale(ak)
        return out

    def to_json(self) -> dict:
        d = self.alg.to_json(self.eps)
        if self.name:
            d["name"] = self.name
        return d


def _delta_matrices(A: Algebra, ginv: Matrix) -> tuple:
    """Delta(e_k) = sum_{i,l,m} ginv[i][l] c[l][k][m] e_i (x) e_m."""
    n = A.dim
    out = []
    for k in range(n):
        rows = []
        for i in range(n):
            row = []
            for m in range(n):
                s = zero(A.field)
                for l in range(n):
                    g = ginv[i, l]
                    if g and A.c[l][k][m]:
                        s = s + g * A.c[l][k][m]
                row.append(s)
            rows.append(row)
        out.append(Matrix(rows, A.field))
    return tuple(out)


def build_frobenius(A: Algebra, eps: Sequence, name: str = "", delta=None) -> FrobeniusAlgebra:
    """Frobenius structure from a counit.  Delta is derived from the inverse Gram
    matrix and checked (Frobenius identity and both counit laws) before return."""
    A.check()
    eps = A.vec(eps)
    if len(eps) != A.dim:
        raise ValueError("counit length differs from dim")
    if A.grading and any(e and A.parity(i) for i, e in enumerate(eps)):
        raise AxiomFailure("even-counit", tuple(A.labels[i] for i, e in enumerate(eps)
                                                if e and A.parity(i)))
    n = A.dim
    gram = Matrix([[_eps(A, eps, A.mul(A.basis(i), A.basis(j))) for j in range(n)]
                   for i in range(n)], A.field)
    if not gram.is_invertible():
        raise DegeneratePairing(gram.det())
    ginv = gram.inverse()
    dmat = _delta_matrices(A, ginv)
    F = FrobeniusAlgebra(A, eps, gram, ginv, dmat, name)
    _verify_frobenius(F)
    if delta is not None:
        for k in range(n):
            if Matrix(delta[k], A.field) != dmat[k]:
                raise AxiomFailure("supplied-delta", (A.labels[k],))
    return F


def _eps(A: Algebra, eps: Vec, a: Vec):
    s = zero(A.field)
    for x, y in zip(a, eps):
        if x and y:
            s = s + x * y
    return s


def _verify_frobenius(F: FrobeniusAlgebra) -> None:
    A = F.alg
    n = A.dim
    R = [A.right_matrix(A.basis(b)) for b in range(n)]
    L = [A.left_matrix(A.basis(a)) for a in range(n)]
    eps_row = Matrix([list(F.eps)], A.field)
    for k in range(n):
        D = F.delta[k]
        ek = A.as_column(A.basis(k))
        # (eps (x) id) Delta = id = (id (x) eps) Delta
        if (eps_row @ D).T != ek or D @ eps_row.T != ek:
            raise AxiomFailure("counitality", (A.labels[k],))
    for a in range(n):
        for b in range(n):
            lhs = F.comultiply(A.mul(A.basis(a), A.basis(b)))
            mid1 = F.delta[a] @ R[b].T      # (id (x) mu)(Delta (x) id)
            mid2 = L[a] @ F.delta[b]        # (mu (x) id)(id (x) Delta)
            if lhs != mid1 or lhs != mid2:
                raise AxiomFailure("frobenius-identity", (A.labels[a], A.labels[b]))


def frobenius_report(F: FrobeniusAlgebra) -> dict:
    """Exact residual counts of the defining identities (all zero when valid)."""
    A = F.alg
    n = A.dim
    bad_frob = 0
    for a in range(n):
        for b in range(n):
            lhs = F.comultiply(A.mul(A.basis(a), A.basis(b)))
            if lhs != F.delta[a] @ A.right_matrix(A.basis(b)).T or \
                    lhs != A.left_matrix(A.basis(a)) @ F.delta[b]:
                bad_frob += 1
    return {"frobenius_identity_failures": bad_frob, "pairs_checked": n * n}


def mu_delta(F: FrobeniusAlgebra) -> Matrix:
    """Matrix of mu . Delta."""
    A = F.alg
    n = A.dim
    cols = []
    for k in range(n):
        D = F.delta[k]
        v = A.zero_vec()
        for i in range(n):
            for m in range(n):
                if D[i, m]:
                    v = A.add(v, A.scale(D[i, m], A.mul(A.basis(i), A.basis(m))))
        cols.append(A.as_column(v))
    return Matrix.from_columns(cols)


def check_delta_separable(F: FrobeniusAlgebra) -> bool:
    return mu_delta(F).is_identity()


def nakayama_matrix(F: FrobeniusAlgebra, koszul: bool = True) -> Matrix:
    """Columns are nu(e_i), where eps(nu(a) b) = (-1)^{|a||b|} eps(b a)."""
    A = F.alg
    n = A.dim
    g = F.gram
    sg = Matrix([[g[i, j] * (A.sign(i, j) if koszul else 1) for j in range(n)]
                 for i in range(n)], A.field)
    return F.ginv.T @ sg


@dataclass(frozen=True)
class AlgebraMap:
    """Linear map between algebras given by its matrix (columns = images of e_i)."""

    src: Algebra
    dst: Algebra
    mat: Matrix

    def __call__(self, a: Vec) -> Vec:
        return tuple((self.mat @ self.src.as_column(a)).flat())

    def compose(self, other: "AlgebraMap") -> "AlgebraMap":
        return AlgebraMap(other.src, self.dst, self.mat @ other.mat)

    def power(self, r: int) -> "AlgebraMap":
        M = Matrix.identity(self.src.dim, self.src.field)
        for _ in range(r):
            M = self.mat @ M
        return AlgebraMap(self.src, self.dst, M)

    def is_identity(self) -> bool:
        return self.mat.is_identity()

    def inverse(self) -> "AlgebraMap":
        return AlgebraMap(self.dst, self.src, self.mat.inverse())

    def check_homomorphism(self):
        """First basis pair (i, j) with phi(e_i e_j) != phi(e_i) phi(e_j), or None."""
        A, B = self.src, self.dst
        if self(A.unit) != B.unit:
            return ("unit",)
        for i in range(A.dim):
            for j in range(A.dim):
                ei, ej = A.basis(i), A.basis(j)
                if self(A.mul(ei, ej)) != B.mul(self(ei), self(ej)):
                    return (A.labels[i], A.labels[j])
        return None


def nakayama_automorphism(F: FrobeniusAlgebra, koszul: bool = True) -> AlgebraMap:
    nu = AlgebraMap(F.alg, F.alg, nakayama_matrix(F, koszul))
    bad = nu.check_homomorphism()
    if bad is not None:
        raise AxiomFailure("nakayama-homomorphism", bad)
    return nu


def is_symmetric(F: FrobeniusAlgebra, koszul: bool = True) -> bool:
    return nakayama_matrix(F, koszul).is_identity()


@dataclass
class SpinVerdict:
    r: int
    mode: str
    holds: bool
    separable: bool
    witness: Vec | None = None

    def to_json(self, F: FrobeniusAlgebra | None = None) -> dict:
        d = {"r": self.r, "mode": self.mode, "holds": self.holds, "delta_separable": self.separable}
        if self.witness is not None:
            d["witness"] = [format_scalar(x) for x in self.witness]
        return d


def inner_witness(F: FrobeniusAlgebra, phi: AlgebraMap) -> Vec | None:
    """Invertible even w with phi(a) w = w a for all a (so phi(a) = w a w^-1)."""
    A = F.alg
    rows = []
    for i in range(A.dim):
        ei = A.basis(i)
        # w -> phi(e_i) w - w e_i
        D = A.left_matrix(phi(ei)) - A.right_matrix(ei)
        rows.extend(D.entries)
    if A.grading:
        for k in range(A.dim):
            if A.parity(k):
                rows.append(tuple(one(A.field) if t == k else zero(A.field) for t in range(A.dim)))
    basis = nullspace_basis(Matrix(rows, A.field))
    vecs = [tuple(v.flat()) for v in basis]
    for w in _small_combos(vecs, A):
        if A.is_invertible(w):
            first = next(x for x in w if x)
            return A.scale(1 / first, w)
    return None


def _small_combos(vecs, A: Algebra, coeffs=(1, 2, -1, -2), limit: int = 4000):
    if not vecs:
        return
    yield from vecs
    count = 0
    for k in range(2, len(vecs) + 1):
        for idx in itertools.combinations(range(len(vecs)), k):
            for cs in itertools.product(coeffs, repeat=k):
                v = A.zero_vec()
                for i, cc in zip(idx, cs):
                    v = A.add(v, A.scale(cc, vecs[i]))
                yield v
                count += 1
                if count >= limit:
                    return


def is_r_spin(F: FrobeniusAlgebra, r: int, mode: str = "strict") -> SpinVerdict:
    """strict: nu^r = id.  inner: nu^r(a) = w a w^-1 for some invertible even w.

    Delta-separability is reported alongside rather than enforced.
    """
    if r < 1:
        raise ValueError("r must be a positive integer")
    nu = nakayama_automorphism(F)
    nur = nu.power(r)
    sep = check_delta_separable(F)
    if mode == "strict":
        return SpinVerdict(r, mode, nur.is_identity(), sep)
    if mode == "inner":
        w = inner_witness(F, nur)
        return SpinVerdict(r, mode, w is not None, sep, w)
    raise ValueError(f"unknown mode {mode!r}")


def opposite_algebra(F: FrobeniusAlgebra) -> FrobeniusAlgebra:
    A = F.alg
    n = A.dim
    c = tuple(tuple(tuple(A.sign(i, j) * x for x in A.c[j][i]) for j in range(n))
              for i in range(n))
    Aop = Algebra(A.field, n, A.labels, c, A.unit, A.grading)
    return build_frobenius(Aop, F.eps, (F.name + "^op") if F.name else "")


# ---------------------------------------------------------------------------
# standard algebras


def trivial_algebra(field: str = "Q") -> FrobeniusAlgebra:
    A = Algebra.from_products(field, ["1"], lambda i, j: [1], [1])
    return build_frobenius(A, [1], "Q")


def group_algebra(n: int, eps1=None, field: str = "Q") -> FrobeniusAlgebra:
    """Q[Z_n] with eps(g^k) = eps1 * delta_{k,0} (eps1 defaults to n, the separable choice)."""
    eps1 = n if eps1 is None else eps1
    labels = [f"g{k}" for k in range(n)]

    def prod(i, j):
        return [1 if k == (i + j) % n else 0 for k in range(n)]

    A = Algebra.from_products(field, labels, prod, [1] + [0] * (n - 1))
    return build_frobenius(A, [eps1] + [0] * (n - 1), f"Q[Z_{n}]")


def matrix_algebra(n: int, u: Matrix | None = None, scale=None, field: str = "Q"
                   ) -> FrobeniusAlgebra:
    """M_n with eps(a) = trace(u a); by default u = n * I (the separable choice)."""
    labels = [f"E{i + 1}{j + 1}" for i in range(n) for j in range(n)]

    def prod(p, q):
        i, j = divmod(p, n)
        k, l = divmod(q, n)
        out = [0] * (n * n)
        if j == k:
            out[i * n + l] = 1
        return out

    unit = [1 if i == j else 0 for i in range(n) for j in range(n)]
    A = Algebra.from_products(field, labels, prod, unit)
    if u is None:
        s = n if scale is None else scale
        u = Matrix.identity(n, field).scale(s)
    # eps(E_ij) = trace(u E_ij) = u[j][i]
    eps = [u[j, i] for i in range(n) for j in range(n)]
    name = f"M_{n}"
    return build_frobenius(A, eps, name)


def matrix_to_vec(a: Matrix) -> Vec:
    return tuple(a.flat())


def vec_to_matrix(v: Vec, n: int, field: str = "Q") -> Matrix:
    return Matrix([list(v[i * n:(i + 1) * n]) for i in range(n)], field)


def product_algebra(k: int = 2, weights=None, field: str = "Q") -> FrobeniusAlgebra:
    """Q^k with idempotent basis and eps = weights (default all ones, separable)."""
    weights = weights or [1] * k
    labels = [f"p{i + 1}" for i in range(k)]
    A = Algebra.from_products(field, labels,
                              lambda i, j: [1 if (t == i and i == j) else 0 for t in range(k)],
                              [1] * k)
    return build_frobenius(A, weights, "x".join(["Q"] * k))


def clifford_algebra(n: int, eps1=None, field: str = "Q") -> FrobeniusAlgebra:
    """Graded Cl_n: odd generators x_1..x_n with x_i^2 = 1, x_i x_j = -x_j x_i.

    Basis = monomials over subsets; eps picks the coefficient of 1 times eps1
    (default 2^n, the separable normalisation).
    """
    subsets = [s for k in range(n + 1) for s in itertools.combinations(range(n), k)]
    index = {s: i for i, s in enumerate(subsets)}
    labels = ["1" if not s else "".join(f"x{t + 1}" for t in s) for s in subsets]

    def prod(i, j):
        a, b = list(subsets[i]), list(subsets[j])
        # sign from sorting the concatenation, then cancel squares (x^2 = 1)
        seq = a + b
        sign = 1
        for p in range(len(seq)):
            for q in range(p + 1, len(seq)):
                if seq[p] > seq[q]:
                    sign = -sign
        res = tuple(sorted(set(a) ^ set(b)))
        out = [0] * len(subsets)
        out[index[res]] = sign
        return out

    grading = [len(s) % 2 for s in subsets]
    A = Algebra.from_products(field, labels, prod, [1] + [0] * (len(subsets) - 1), grading)
    e = 2 ** n if eps1 is None else eps1
    return build_frobenius(A, [e] + [0] * (len(subsets) - 1), f"Cl_{n}")


def truncated_polynomial(field: str = "Q") -> Algebra:
    """Q[x]/(x^2)."""
    return Algebra.from_products(field, ["1", "x"],
                                 lambda i, j: [1, 0] if i + j == 0 else [0, 1] if i + j == 1 else [0, 0],
                                 [1, 0])


# ---------------------------------------------------------------------------
# bimodules


@dataclass(frozen=True)
class Bimodule:
    """Left `left`-module and right `right`-module on Q^dim (a left-right bimodule)."""

    left: FrobeniusAlgebra
    right: FrobeniusAlgebra
    dim: int
    left_actions: tuple
    right_actions: tuple
    name: str = ""

    @property
    def field(self) -> str:
        return self.left.field

    def lact(self, a: Vec) -> Matrix:
        M = Matrix.zeros(self.dim, self.dim, self.field)
        for i, ai in enumerate(a):
            if ai:
                M = M + self.left_actions[i].scale(ai)
        return M

    def ract(self, b: Vec) -> Matrix:
        M = Matrix.zeros(self.dim, self.dim, self.field)
        for i, bi in enumerate(b):
            if bi:
                M = M + self.right_actions[i].scale(bi)
        return M

    def check(self) -> None:
        A, B = self.left.alg, self.right.alg
        I = Matrix.identity(self.dim, self.field)
        if len(self.left_actions) != A.dim or len(self.right_actions) != B.dim:
            raise InvalidBimodule("shape", (len(self.left_actions), len(self.right_actions)))
        for M in self.left_actions + self.right_actions:
            if M.shape != (self.dim, self.dim):
                raise InvalidBimodule("shape", M.shape)
        if self.lact(A.unit) != I:
            raise InvalidBimodule("left-unit", ())
        if self.ract(B.unit) != I:
            raise InvalidBimodule("right-unit", ())
        for i in range(A.dim):
            for j in range(A.dim):
                if self.lact(A.mul(A.basis(i), A.basis(j))) != self.left_actions[i] @ self.left_actions[j]:
                    raise InvalidBimodule("left-representation", (A.labels[i], A.labels[j]))
        for i in range(B.dim):
            for j in range(B.dim):
                if self.ract(B.mul(B.basis(i), B.basis(j))) != self.right_actions[j] @ self.right_actions[i]:
                    raise InvalidBimodule("right-anti-representation", (B.labels[i], B.labels[j]))
        for i, L in enumerate(self.left_actions):
            for j, R in enumerate(self.right_actions):
                if L @ R != R @ L:
                    raise InvalidBimodule("actions-commute", (A.labels[i], B.labels[j]))

    def to_json(self) -> dict:
        return {"name": self.name, "left_algebra": self.left.to_json(),
                "right_algebra": self.right.to_json(), "dim": self.dim,
                "left_actions": [M.to_json() for M in self.left_actions],
                "right_actions": [M.to_json() for M in self.right_actions]}


def make_bimodule(left, right, left_actions, right_actions, name="", check=True) -> Bimodule:
    X = Bimodule(left, right, left_actions[0].rows if left_actions else right_actions[0].rows,
                 tuple(left_actions), tuple(right_actions), name)
    if check:
        X.check()
    return X


def regular_bimodule(F: FrobeniusAlgebra) -> Bimodule:
    A = F.alg
    L = [A.left_matrix(A.basis(i)) for i in range(A.dim)]
    R = [A.right_matrix(A.basis(i)) for i in range(A.dim)]
    return make_bimodule(F, F, L, R, f"{F.name or 'A'}")


def column_module(F: FrobeniusAlgebra, n: int, Q: FrobeniusAlgebra | None = None) -> Bimodule:
    """Q^n as an M_n-Q bimodule (matrices act on columns)."""
    Q = Q or trivial_algebra(F.field)
    L = [Matrix.unit(n, n, *divmod(p, n), F.field) for p in range(n * n)]
    return make_bimodule(F, Q, L, [Matrix.identity(n, F.field)], f"col_{n}")


def row_module(F: FrobeniusAlgebra, n: int, Q: FrobeniusAlgebra | None = None) -> Bimodule:
    """Q^n as a Q-M_n bimodule (row vectors; v . a has coordinates a^T v)."""
    Q = Q or trivial_algebra(F.field)
    R = [Matrix.unit(n, n, *divmod(p, n), F.field).T for p in range(n * n)]
    return make_bimodule(Q, F, [Matrix.identity(n, F.field)], R, f"row_{n}")


def character_module(F: FrobeniusAlgebra, values: Sequence, side: str = "left",
                     Q: FrobeniusAlgebra | None = None) -> Bimodule:
    """One-dimensional module where e_i acts by values[i]."""
    Q = Q or trivial_algebra(F.field)
    acts = [Matrix([[v]], F.field) for v in values]
    ident = [Matrix.identity(1, F.field)]
    if side == "left":
        return make_bimodule(F, Q, acts, ident, "chi")
    return make_bimodule(Q, F, ident, acts, "chi")


def vector_bimodule(Q: FrobeniusAlgebra, n: int) -> Bimodule:
    return make_bimodule(Q, Q, [Matrix.identity(n, Q.field)], [Matrix.identity(n, Q.field)], f"Q^{n}")


def twist_bimodule(X: Bimodule, phi: AlgebraMap | None = None, psi: AlgebraMap | None = None
                   ) -> Bimodule:
    """Left action a -> lambda(phi(a)), right action b -> rho(psi(b))."""
    A, B = X.left.alg, X.right.alg
    L = [X.lact(phi(A.basis(i))) if phi else X.left_actions[i] for i in range(A.dim)]
    R = [X.ract(psi(B.basis(i))) if psi else X.right_actions[i] for i in range(B.dim)]
    return make_bimodule(X.left, X.right, L, R, X.name + "_tw")


def dual_bimodule(X: Bimodule) -> Bimodule:
    """Linear dual: (a f b)(x) = f(b x a); left and right algebras swap."""
    L = [R.T for R in X.right_actions]
    R = [L0.T for L0 in X.left_actions]
    return make_bimodule(X.right, X.left, L, R, X.name + "^v")


# ---------------------------------------------------------------------------
# intertwiners


@dataclass(frozen=True)
class Intertwiner:
    src: Bimodule
    dst: Bimodule
    mat: Matrix

    def is_valid(self) -> bool:
        T = self.mat
        return all(T @ a == b @ T for a, b in zip(self.src.left_actions, self.dst.left_actions)) and \
            all(T @ a == b @ T for a, b in zip(self.src.right_actions, self.dst.right_actions))

    def compose(self, other: "Intertwiner") -> "Intertwiner":
        return Intertwiner(other.src, self.dst, self.mat @ other.mat)

    def is_invertible(self) -> bool:
        return self.mat.is_invertible()


def intertwiner_space(X: Bimodule, Y: Bimodule) -> list[Intertwiner]:
    """Basis of {T : T M = N T for all action pairs}, via vec(TM - NT) = (I x M^T - N x I) vec T."""
    if X.left.alg != Y.left.alg or X.right.alg != Y.right.alg:
        raise ValueError("bimodules over different algebra pairs")
    m, n = Y.dim, X.dim
    fld = X.field
    Im, In = Matrix.identity(m, fld), Matrix.identity(n, fld)
    rows = []
    for M, N in list(zip(X.left_actions, Y.left_actions)) + list(zip(X.right_actions, Y.right_actions)):
        rows.extend((Im.kron(M.T) - N.kron(In)).entries)
    if m * n == 0:
        return []
    if not rows:
        sys_ = Matrix.zeros(1, m * n, fld)
    else:
        sys_ = Matrix(rows, fld)
    return [Intertwiner(X, Y, Matrix.unvec(v, m, n)) for v in nullspace_basis(sys_)]


@dataclass
class IsoResult:
    status: str  # found | absent | undetermined
    witness: Intertwiner | None = None
    hom_dim: int = 0


ISO_COEFFS = (-2, -1, 0, 1, 2)


def bimodule_iso(X: Bimodule, Y: Bimodule, max_scan: int = 3125) -> IsoResult:
    """Scan integer combinations (coefficients in ISO_COEFFS) of an intertwiner basis."""
    if X.dim != Y.dim:
        basis = intertwiner_space(X, Y)
        return IsoResult("absent", None, len(basis))
    basis = intertwiner_space(X, Y)
    if not basis:
        return IsoResult("absent", None, 0)
    k = len(basis)
    for T in basis:
        if T.is_invertible():
            return IsoResult("found", T, k)
    scanned = 0
    for cs in itertools.product(ISO_COEFFS, repeat=k):
        if not any(cs):
            continue
        M = None
        for c, T in zip(cs, basis):
            if c:
                M = T.mat.scale(c) if M is None else M + T.mat.scale(c)
        if M.is_invertible():
            return IsoResult("found", Intertwiner(X, Y, M), k)
        scanned += 1
        if scanned >= max_scan:
            break
    return IsoResult("undetermined", None, k)


# ---------------------------------------------------------------------------
# relative tensor products


@dataclass(frozen=True)
class RelTensor:
    """X (x)_B Y realised as the image of e on X (x) Y, with e = incl @ proj."""

    X: Bimodule
    Y: Bimodule
    idempotent: Matrix
    proj: Matrix
    incl: Matrix
    bimodule: Bimodule

    @property
    def dim(self) -> int:
        return self.bimodule.dim


def tensor_idempotent(X: Bimodule, Y: Bimodule) -> Matrix:
    """e = sum ginv[i][l] rho_X(e_i) (x) lambda_Y(e_l)."""
    B = X.right
    out = Matrix.zeros(X.dim * Y.dim, X.dim * Y.dim, X.field)
    for i in range(B.dim):
        for l in range(B.dim):
            g = B.ginv[i, l]
            if g:
                out = out + X.right_actions[i].kron(Y.left_actions[l]).scale(g)
    return out


def rel_tensor(X: Bimodule, Y: Bimodule) -> RelTensor:
    if X.right.alg != Y.left.alg or X.right.eps != Y.left.eps:
        raise ValueError("middle algebras differ")
    if not check_delta_separable(X.right):
        raise MiddleNotSeparable(f"middle algebra {X.right.name or ''} is not Delta-separable")
    e = tensor_idempotent(X, Y)
    if e @ e != e:
        raise AxiomFailure("tensor-idempotent", ())
    P, Z = split_idempotent(e)
    IY = Matrix.identity(Y.dim, X.field)
    IX = Matrix.identity(X.dim, X.field)
    L = [P @ Lc.kron(IY) @ Z for Lc in X.left_actions]
    R = [P @ IX.kron(Ra) @ Z for Ra in Y.right_actions]
    k = P.rows
    if k == 0:
        L = [Matrix.zeros(0, 0, X.field) for _ in X.left_actions]
        R = [Matrix.zeros(0, 0, X.field) for _ in Y.right_actions]
    M = Bimodule(X.left, Y.right, k, tuple(L), tuple(R), f"({X.name}*{Y.name})")
    if k:
        M.check()
    return RelTensor(X, Y, e, P, Z, M)


def tensor_intertwiners(f: Intertwiner, g: Intertwiner, src: RelTensor, dst: RelTensor
                        ) -> Intertwiner:
    return Intertwiner(src.bimodule, dst.bimodule, dst.proj @ f.mat.kron(g.mat) @ src.incl)


def _action_matrix(X: Bimodule, side: str) -> Matrix:
    """Multiplication map A (x) X -> X (side='left') or X (x) B -> X (side='right')."""
    if side == "left":
        cols = []
        for a in range(X.left.dim):
            for x in range(X.dim):
                cols.append(X.left_actions[a].col(x))
        return Matrix.from_columns(cols, X.dim)
    cols = []
    for x in range(X.dim):
        for b in range(X.right.dim):
            cols.append(X.right_actions[b].col(x))
    return Matrix.from_columns(cols, X.dim)


@dataclass
class UnitIso:
    tensor: RelTensor
    forward: Intertwiner  # tensor -> X
    backward: Intertwiner  # X -> tensor

    def verified(self) -> bool:
        return self.forward.is_valid() and self.backward.is_valid() and \
            (self.forward.mat @ self.backward.mat).is_identity() and \
            (self.backward.mat @ self.forward.mat).is_identity()


def left_unitor(X: Bimodule) -> UnitIso:
    """A (x)_A X -> X, a (x) x -> a x."""
    T = rel_tensor(regular_bimodule(X.left), X)
    fwd = _action_matrix(X, "left") @ T.incl
    unit = X.left.alg.as_column(X.left.alg.unit)
    back = T.proj @ unit.kron(Matrix.identity(X.dim, X.field))
    return UnitIso(T, Intertwiner(T.bimodule, X, fwd), Intertwiner(X, T.bimodule, back))


def right_unitor(X: Bimodule) -> UnitIso:
    """X (x)_B B -> X, x (x) b -> x b."""
    T = rel_tensor(X, regular_bimodule(X.right))
    fwd = _action_matrix(X, "right") @ T.incl
    unit = X.right.alg.as_column(X.right.alg.unit)
    back = T.proj @ Matrix.identity(X.dim, X.field).kron(unit)
    return UnitIso(T, Intertwiner(T.bimodule, X, fwd), Intertwiner(X, T.bimodule, back))


@dataclass
class AssociatorWitness:
    left: RelTensor   # (XY)Z
    right: RelTensor  # X(YZ)
    forward: Intertwiner
    backward: Intertwiner

    def verified(self) -> bool:
        return self.forward.is_valid() and self.backward.is_valid() and \
            (self.forward.mat @ self.backward.mat).is_identity() and \
            (self.backward.mat @ self.forward.mat).is_identity()


def associator(X: Bimodule, Y: Bimodule, Z: Bimodule) -> AssociatorWitness:
    XY = rel_tensor(X, Y)
    YZ = rel_tensor(Y, Z)
    L = rel_tensor(XY.bimodule, Z)
    R = rel_tensor(X, YZ.bimodule)
    fld = X.field
    IX, IZ = Matrix.identity(X.dim, fld), Matrix.identity(Z.dim, fld)
    fwd = R.proj @ IX.kron(YZ.proj) @ XY.incl.kron(IZ) @ L.incl
    back = L.proj @ XY.proj.kron(IZ) @ IX.kron(YZ.incl) @ R.incl
    return AssociatorWitness(L, R, Intertwiner(L.bimodule, R.bimodule, fwd),
                             Intertwiner(R.bimodule, L.bimodule, back))


@dataclass
class Adjunction:
    X: Bimodule
    star: Bimodule
    ev: Intertwiner    # X (x)_A X* -> B
    coev: Intertwiner  # A -> X* (x)_B X
    ev_tensor: RelTensor
    coev_tensor: RelTensor
    zorro: tuple[bool, bool]

    @property
    def valid(self) -> bool:
        return all(self.zorro) and self.ev.is_valid() and self.coev.is_valid()


def _zorro_maps(X: Bimodule, S: Bimodule, ev_t: RelTensor, coev_vec: Matrix, ev_mat: Matrix):
    """Both snake composites computed on unreduced tensor spaces.

    coev_vec is coev(1) in X* (x) X (unreduced), ev_mat: X (x) X* -> B (unreduced).
    """
    n, m = X.dim, S.dim
    fld = X.field
    B = X.left
    # zorro 1: X -> X, x -> sum_pq c_pq ev(x (x) f_p) . x_q
    cols = []
    for x in range(n):
        acc = Matrix.zeros(n, 1, fld)
        for p in range(m):
            for q in range(n):
                c = coev_vec[p * n + q, 0]
                if not c:
                    continue
                v = ev_mat.col(x * m + p)
                b = tuple(v.flat())
                acc = acc + (X.lact(b) @ Matrix.unit(n, 1, q, 0, fld)).scale(c)
        cols.append(acc)
    z1 = Matrix.from_columns(cols, n)
    # zorro 2: X* -> X*, f -> sum_pq c_pq f_p . ev(x_q (x) f)
    cols = []
    for f in range(m):
        acc = Matrix.zeros(m, 1, fld)
        for p in range(m):
            for q in range(n):
                c = coev_vec[p * n + q, 0]
                if not c:
                    continue
                b = tuple(ev_mat.col(q * m + f).flat())
                acc = acc + (S.ract(b) @ Matrix.unit(m, 1, p, 0, fld)).scale(c)
        cols.append(acc)
    z2 = Matrix.from_columns(cols, m)
    return z1, z2


def star_adjoint(X: Bimodule, twist: AlgebraMap | None = None) -> Adjunction:
    """X* = (X^v) with its right B-action twisted by the (ungraded) Nakayama map of B.

    coev(1) is the canonical element sum_m x^m (x) x_m; ev is solved from the
    two snake equations inside Hom_{B-B}(X (x)_A X*, B).
    """
    B, A = X.left, X.right
    for F in (A, B):
        if not check_delta_separable(F):
            raise MiddleNotSeparable(f"{F.name or 'algebra'} is not Delta-separable")
    nu = twist if twist is not None else nakayama_automorphism(B, koszul=False)
    D = dual_bimodule(X)
    S = twist_bimodule(D, None, None if nu.is_identity() else nu)
    S = Bimodule(S.left, S.right, S.dim, S.left_actions, S.right_actions, X.name + "*")
    n = X.dim
    fld = X.field
    ev_t = rel_tensor(X, S)
    coev_t = rel_tensor(S, X)
    canon = Matrix.identity(n, fld).vec()
    c = coev_t.proj @ canon
    regA = regular_bimodule(A)
    coev_cols = [coev_t.bimodule.lact(A.alg.basis(a)) @ c for a in range(A.dim)]
    coev = Intertwiner(regA, coev_t.bimodule, Matrix.from_columns(coev_cols, coev_t.dim))
    coev_vec = coev_t.incl @ c
    regB = regular_bimodule(B)
    basis = intertwiner_space(ev_t.bimodule, regB)
    # snake equations are linear in ev: solve for coefficients
    target1 = Matrix.identity(n, fld).vec()
    target2 = Matrix.identity(S.dim, fld).vec()
    cols = []
    for E in basis:
        z1, z2 = _zorro_maps(X, S, ev_t, coev_vec, E.mat @ ev_t.proj)
        cols.append(z1.vec().vstack(z2.vec()))
    ev_mat = None
    if cols:
        sol = Matrix.from_columns(cols).solve(target1.vstack(target2))
        if sol is not None:
            ev_mat = Matrix.zeros(B.dim, ev_t.dim, fld)
            for k, E in enumerate(basis):
                if sol[k, 0]:
                    ev_mat = ev_mat + E.mat.scale(sol[k, 0])
    if ev_mat is None:
        ev_mat = Matrix.zeros(B.dim, ev_t.dim, fld)
    ev = Intertwiner(ev_t.bimodule, regB, ev_mat)
    z1, z2 = _zorro_maps(X, S, ev_t, coev_vec, ev_mat @ ev_t.proj)
    return Adjunction(X, S, ev, coev, ev_t, coev_t, (z1.is_identity(), z2.is_identity()))


# ---------------------------------------------------------------------------
# json io


def load_algebra(data: dict) -> FrobeniusAlgebra:
    A = Algebra.from_json(data)
    if "counit" not in data:
        raise ValueError("algebra JSON needs a counit")
    return build_frobenius(A, [parse_scalar(x, A.field) for x in data["counit"]],
                           data.get("name", ""), data.get("delta"))


def _resolve(ref, base: Path | None):
    if isinstance(ref, dict):
        return ref
    p = Path(ref)
    if base is not None and not p.is_absolute():
        p = base / p
    return json.loads(p.read_text())


def load_bimodule(data: dict, base: Path | None = None) -> Bimodule:
    left = load_algebra(_resolve(data["left_algebra"], base))
    right = load_algebra(_resolve(data["right_algebra"], base))
    fld = left.field
    L = [Matrix(m, fld) for m in data["left_actions"]]
    R = [Matrix(m, fld) for m in data["right_actions"]]
    dim = int(data["dim"])
    X = Bimodule(left, right, dim, tuple(L), tuple(R), data.get("name", ""))
    X.check()
    return X


def load_theta(data, F: FrobeniusAlgebra) -> AlgebraMap:
    """theta JSON: {"matrix": [[...]]} with columns = images of basis elements,
    or {"named": "identity"|"transpose"}."""
    if isinstance(data, dict) and "named" in data:
        return named_map(F, data["named"])
    M = Matrix(data["matrix"] if isinstance(data, dict) else data, F.field)
    if M.shape != (F.dim, F.dim):
        raise ValueError("theta has the wrong shape")
    return AlgebraMap(F.alg, F.alg, M)


def named_map(F: FrobeniusAlgebra, name: str) -> AlgebraMap:
    n = F.dim
    if name == "identity":
        return AlgebraMap(F.alg, F.alg, Matrix.identity(n, F.field))
    if name == "transpose":
        k = int(round(n ** 0.5))
        if k * k != n:
            raise ValueError("transpose needs a matrix algebra")
        cols = []
        for p in range(n):
            i, j = divmod(p, k)
            cols.append(Matrix.unit(n, 1, j * k + i, 0, F.field))
        return AlgebraMap(F.alg, F.alg, Matrix.from_columns(cols))
    raise ValueError(f"unknown named map {name!r}")
