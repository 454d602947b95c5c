"""Finite and matrix-valued categories with dagger and O(1)-volutive structure.

Two backends share one small protocol (objects, hom, compose, identity):

* :class:`FiniteCategory` -- explicit objects, morphism labels and a total
  composition table.  Everything is enumerated exhaustively.
* linear categories (:class:`MatCategory` and everything derived from it) --
  hom-sets are vector spaces of matrices.  ``objects()`` and the idempotent /
  fixed-point generators return a finite *sample*; hom-sets are handled
  through bases, which is enough because every axiom is (anti)linear.

Derived categories (idempotent completion, strictification, d-Karoubi
envelope) wrap the arrows of their base category, so they work on top of
either backend and on top of each other.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

from gmpy2 import is_square, isqrt, mpq

from .exactnum import GaussQ, Matrix, SingularMatrix, conj, format_scalar, span_basis


class InvalidDagger(ValueError):
    def __init__(self, report: "ValidationReport"):
        super().__init__("dagger axioms fail: " + ", ".join(f.axiom for f in report.failures))
        self.report = report


@dataclass(frozen=True)
class Arrow:
    dom: Hashable
    cod: Hashable
    value: Any


def base_matrix(f: Arrow) -> Matrix:
    v = f.value
    while isinstance(v, Arrow):
        v = v.value
    return v


def describe(x) -> Any:
    """JSON-able rendering of objects, arrows and matrices."""
    if isinstance(x, Arrow):
        return {"dom": describe(x.dom), "cod": describe(x.cod), "value": describe(x.value)}
    if isinstance(x, Matrix):
        return x.to_json()
    if isinstance(x, (tuple, list)):
        return [describe(y) for y in x]
    if isinstance(x, (str, int)) or x is None:
        return x
    if isinstance(x, GaussQ) or type(x) is type(mpq(0)):
        return format_scalar(x)
    return repr(x)


# ---------------------------------------------------------------------------
# categories


class Category:
    finite = True
    linear = False

    def objects(self) -> list:
        raise NotImplementedError

    def hom(self, a, b) -> list[Arrow]:
        raise NotImplementedError

    def hom_generators(self, a, b) -> list[Arrow]:
        """Arrows whose checks imply the check on all of hom(a, b)."""
        return self.hom(a, b)

    def compose(self, g: Arrow, f: Arrow) -> Arrow:
        """g after f."""
        raise NotImplementedError

    def identity(self, a) -> Arrow:
        raise NotImplementedError

    def has_object(self, a) -> bool:
        return a in self.objects()

    def contains(self, f: Arrow) -> bool:
        return f in self.hom(f.dom, f.cod)

    def inverse(self, f: Arrow) -> Arrow | None:
        for g in self.hom(f.cod, f.dom):
            if self.compose(g, f) == self.identity(f.dom) and \
                    self.compose(f, g) == self.identity(f.cod):
                return g
        return None

    def is_iso(self, f: Arrow) -> bool:
        return self.inverse(f) is not None

    def morphisms(self) -> list[Arrow]:
        obs = self.objects()
        return [f for a in obs for b in obs for f in self.hom_generators(a, b)]

    def endomorphisms(self, a) -> list[Arrow]:
        return self.hom(a, a)

    def hom_size(self, a, b) -> int:
        """Cardinality (finite) or dimension (linear) of hom(a, b)."""
        return len(self.hom(a, b))


class FiniteCategory(Category):
    """Category given by an explicit, total composition table."""

    def __init__(self, objects: Sequence, morphisms: dict[str, tuple], composition: dict,
                 identities: dict, name: str = ""):
        self.name = name
        self._objects = list(objects)
        self._mor = {m: (s, t) for m, (s, t) in morphisms.items()}
        self._table = dict(composition)
        self._ids = dict(identities)
        self._hom: dict[tuple, list[Arrow]] = {}
        for m, (s, t) in self._mor.items():
            self._hom.setdefault((s, t), []).append(Arrow(s, t, m))

    def objects(self):
        return list(self._objects)

    def arrow(self, name: str) -> Arrow:
        s, t = self._mor[name]
        return Arrow(s, t, name)

    def hom(self, a, b):
        return list(self._hom.get((a, b), []))

    def compose(self, g, f):
        if f.cod != g.dom:
            raise ValueError(f"not composable: {g.value} after {f.value}")
        h = self._table[(g.value, f.value)]
        return self.arrow(h)

    def identity(self, a):
        return self.arrow(self._ids[a])

    def has_object(self, a):
        return a in self._objects

    def contains(self, f):
        return f.value in self._mor and self._mor[f.value] == (f.dom, f.cod)

    def check_axioms(self) -> list[str]:
        """Problems with closure, identities or associativity (empty if none)."""
        problems = []
        mors = [self.arrow(m) for m in self._mor]
        for a in self._objects:
            if a not in self._ids:
                problems.append(f"no identity for {a}")
        for f in mors:
            for g in self.hom(f.cod, f.cod) + [x for x in mors if x.dom == f.cod]:
                if (g.value, f.value) not in self._table:
                    problems.append(f"missing composite {g.value}*{f.value}")
                    continue
                h = self._table[(g.value, f.value)]
                if h not in self._mor or self._mor[h] != (f.dom, g.cod):
                    problems.append(f"bad composite {g.value}*{f.value}={h}")
        if problems:
            return problems
        for f in mors:
            if self.compose(self.identity(f.cod), f) != f or self.compose(f, self.identity(f.dom)) != f:
                problems.append(f"identity law fails at {f.value}")
        for f in mors:
            for g in (x for x in mors if x.dom == f.cod):
                for h in (x for x in mors if x.dom == g.cod):
                    if self.compose(h, self.compose(g, f)) != self.compose(self.compose(h, g), f):
                        problems.append(f"associativity fails at {h.value},{g.value},{f.value}")
        return problems

    # json -----------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "objects": list(self._objects),
            "morphisms": [{"name": m, "src": s, "dst": t} for m, (s, t) in self._mor.items()],
            "composition": [[g, f, h] for (g, f), h in sorted(self._table.items())],
            "identities": dict(self._ids),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteCategory":
        mors = {}
        for m in data["morphisms"]:
            mors[m["name"]] = (m["src"], m["dst"])
        table = {(g, f): h for g, f, h in data["composition"]}
        return cls(data["objects"], mors, table, data["identities"], data.get("name", ""))

    @classmethod
    def monoid(cls, elements: Sequence[str], mult: Callable[[str, str], str], unit: str,
               name: str = "", obj: str = "*") -> "FiniteCategory":
        """One-object category; ``mult(g, f)`` is g after f."""
        mors = {x: (obj, obj) for x in elements}
        table = {(g, f): mult(g, f) for g in elements for f in elements}
        return cls([obj], mors, table, {obj: unit}, name)


class MatCategory(Category):
    """Skeletal vect: objects are dimensions, hom(m, n) = n x m matrices.

    ``objects()`` returns the sample 1..max_dim; any non-negative integer is an
    object.
    """

    finite = False
    linear = True

    def __init__(self, field: str = "Q", max_dim: int = 3):
        self.field = field
        self.max_dim = max_dim

    def objects(self):
        return list(range(1, self.max_dim + 1))

    def has_object(self, a):
        return isinstance(a, int) and a >= 0

    def wrap(self, a, b, M: Matrix) -> Arrow:
        return Arrow(a, b, M)

    def hom(self, a, b):
        return [Arrow(a, b, Matrix.unit(b, a, i, j, self.field)) for i in range(b) for j in range(a)]

    def hom_generators(self, a, b):
        gens = self.hom(a, b)
        if self.field == "Qi":
            gens += [Arrow(a, b, g.value.scale(GaussQ(0, 1))) for g in gens]
        return gens

    def compose(self, g, f):
        if f.cod != g.dom:
            raise ValueError("not composable")
        return Arrow(f.dom, g.cod, g.value @ f.value)

    def identity(self, a):
        return Arrow(a, a, Matrix.identity(a, self.field))

    def contains(self, f):
        return isinstance(f.value, Matrix) and f.value.shape == (f.cod, f.dom) \
            and f.value.field == self.field

    def inverse(self, f):
        if f.dom != f.cod:
            return None
        try:
            return Arrow(f.cod, f.dom, f.value.inverse())
        except SingularMatrix:
            return None

    def hom_size(self, a, b):
        return a * b

    def sample_idempotents(self, n: int) -> list[Matrix]:
        """Coordinate projections, one non-orthogonal idempotent and a few
        rank-one orthogonal projections."""
        out = []
        for bits in itertools.product((1, 0), repeat=n):
            if any(bits):
                out.append(Matrix.diag(bits, self.field))
        if n >= 2:
            out.append(Matrix.unit(n, n, 0, 0, self.field) + Matrix.unit(n, n, 0, 1, self.field))
            vs = [[1, 1] + [0] * (n - 2)]
            if self.field == "Qi":
                vs.append([1, GaussQ(0, 1)] + [0] * (n - 2))
            for v in vs:
                out.append(orthogonal_projection(Matrix.column(v, self.field)))
        return out


def orthogonal_projection(v: Matrix) -> Matrix:
    """Projection onto span(v) along its conjugate-orthogonal complement."""
    n = (v.H @ v)[0, 0]
    return (v @ v.H).scale(1 / n)


class LinearDerived(Category):
    """Shared machinery for categories whose arrows wrap arrows of a linear base."""

    finite = False
    linear = True

    base: Category

    @property
    def field(self):
        return self.base.field

    def base_object(self, a):
        raise NotImplementedError

    def wrap(self, a, b, M: Matrix) -> Arrow:
        return Arrow(a, b, self.base.wrap(self.base_object(a), self.base_object(b), M))

    def compose(self, g, f):
        if f.cod != g.dom:
            raise ValueError("not composable")
        return Arrow(f.dom, g.cod, self.base.compose(g.value, f.value))

    def hom_generators(self, a, b):
        gens = self.hom(a, b)
        if self.field == "Qi":
            gens += [self.wrap(a, b, base_matrix(g).scale(GaussQ(0, 1))) for g in gens]
        return gens

    def hom_size(self, a, b):
        return len(self.hom(a, b))

    def inverse(self, f):
        return linear_inverse(self, f)


def linear_inverse(C: Category, f: Arrow) -> Arrow | None:
    """Solve for g in hom(cod, dom) with g f = id and f g = id."""
    basis = C.hom(f.cod, f.dom)
    ida, idb = base_matrix(C.identity(f.dom)), base_matrix(C.identity(f.cod))
    F = base_matrix(f)
    if not basis:
        if ida.is_zero() and idb.is_zero():
            return C.wrap(f.cod, f.dom, Matrix.zeros(F.cols, F.rows, F.field))
        return None
    cols = []
    for g in basis:
        G = base_matrix(g)
        cols.append((G @ F).vec().vstack((F @ G).vec()))
    A = Matrix.from_columns(cols)
    rhs = ida.vec().vstack(idb.vec())
    c = A.solve(rhs)
    if c is None:
        return None
    M = Matrix.zeros(F.cols, F.rows, F.field)
    for k, g in enumerate(basis):
        if c[k, 0]:
            M = M + base_matrix(g).scale(c[k, 0])
    return C.wrap(f.cod, f.dom, M)


def linear_span_arrows(C, a, b, mats: Iterable[Matrix]) -> list[Arrow]:
    mats = [M for M in mats if not M.is_zero()]
    if not mats:
        return []
    vecs = [M.vec() for M in mats]
    chosen = span_basis(vecs, len(vecs))
    out = []
    for v in chosen:
        M = Matrix.unvec(v, mats[0].rows, mats[0].cols)
        out.append(C.wrap(a, b, M))
    return out


def small_combinations(basis: Sequence[Arrow], coeffs=(1, -1), max_terms: int = 2):
    """Deterministic small-integer combinations of basis matrices."""
    n = len(basis)
    for k in range(1, min(max_terms, n) + 1):
        for idx in itertools.combinations(range(n), k):
            for cs in itertools.product(coeffs, repeat=k):
                M = None
                for i, c in zip(idx, cs):
                    term = base_matrix(basis[i]).scale(c)
                    M = term if M is None else M + term
                yield M


# ---------------------------------------------------------------------------
# volutions and daggers


@dataclass
class O1Volution:
    """Contravariant d with eta_a : d(d(a)) -> a."""

    category: Category
    d_obj: Callable[[Any], Any]
    d_mor: Callable[[Arrow], Arrow]
    eta: Callable[[Any], Arrow]
    name: str = ""


@dataclass
class DaggerStructure:
    category: Category
    d_mor: Callable[[Arrow], Arrow]
    name: str = ""

    def __call__(self, f: Arrow) -> Arrow:
        return self.d_mor(f)

    def as_volution(self) -> O1Volution:
        C = self.category
        return O1Volution(C, lambda a: a, self.d_mor, C.identity, self.name)


@dataclass
class Failure:
    axiom: str
    witness: dict

    def to_json(self):
        return {"axiom": self.axiom, "witness": self.witness}


@dataclass
class ValidationReport:
    kind: str
    failures: list[Failure] = field(default_factory=list)
    checked: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return not self.failures

    def fail(self, axiom: str, **witness):
        self.failures.append(Failure(axiom, {k: describe(v) for k, v in witness.items()}))

    def count(self, axiom: str, n: int = 1):
        self.checked[axiom] = self.checked.get(axiom, 0) + n

    def to_json(self):
        return {
            "kind": self.kind,
            "verdict": "valid" if self.valid else "invalid",
            "failures": [f.to_json() for f in self.failures],
            "checked": dict(sorted(self.checked.items())),
        }


TRIPLE_SAMPLE = 6


def _triple_objects(C: Category, objects) -> list:
    """Objects used for checks over composable pairs.

    Finite categories use everything.  Linear categories use at most
    TRIPLE_SAMPLE objects, taken round-robin over underlying dimension so that
    every dimension present in the sample is represented.
    """
    objects = list(objects)
    if C.finite or len(objects) <= TRIPLE_SAMPLE:
        return objects
    groups: dict = {}
    for x in objects:
        groups.setdefault(base_matrix(C.identity(x)).rows, []).append(x)
    out = []
    for layer in itertools.zip_longest(*groups.values()):
        for x in layer:
            if x is not None and len(out) < TRIPLE_SAMPLE:
                out.append(x)
    return out


def _composable_triples(C: Category, objects):
    objects = _triple_objects(C, objects)
    for a in objects:
        for b in objects:
            for f in C.hom_generators(a, b):
                for c in objects:
                    for g in C.hom(b, c):
                        yield f, g


def check_o1_volution(C: Category, v: O1Volution, objects=None, first_only: bool = False
                      ) -> ValidationReport:
    """Check contravariant functoriality, naturality of eta and d(eta_a) = eta_{d(a)}^-1.

    On linear categories the checks run over hom generators between the sample
    objects, which suffices since every condition is (anti)linear.
    """
    rep = ValidationReport("o1-volution")
    obs = list(objects) if objects is not None else C.objects()
    d = v.d_mor

    def done():
        return first_only and rep.failures

    for a in obs:
        da = v.d_obj(a)
        rep.count("object-map")
        if not C.has_object(da):
            rep.fail("object-map", object=a, image=da)
            continue
        idd = d(C.identity(a))
        rep.count("identity")
        if idd != C.identity(da):
            rep.fail("identity", object=a, image=idd)
    if done():
        return rep
    for a in obs:
        for b in obs:
            for f in C.hom_generators(a, b):
                df = d(f)
                rep.count("contravariance-typing")
                if df.dom != v.d_obj(b) or df.cod != v.d_obj(a) or not C.contains(df):
                    rep.fail("contravariance-typing", morphism=f, image=df)
    if done():
        return rep
    for f, g in _composable_triples(C, obs):
        rep.count("contravariance")
        lhs = d(C.compose(g, f))
        rhs = C.compose(d(f), d(g))
        if lhs != rhs:
            rep.fail("contravariance", f=f, g=g, d_gf=lhs, df_dg=rhs)
            if first_only:
                return rep
    for a in obs:
        eta = v.eta(a)
        dda = v.d_obj(v.d_obj(a))
        rep.count("eta-typing")
        if eta.dom != dda or eta.cod != a or not C.contains(eta):
            rep.fail("eta-typing", object=a, eta=eta)
            continue
        rep.count("eta-invertible")
        if not C.is_iso(eta):
            rep.fail("eta-invertible", object=a, eta=eta)
    if done():
        return rep
    for a in obs:
        for b in obs:
            for f in C.hom_generators(a, b):
                rep.count("naturality")
                lhs = C.compose(f, v.eta(a))
                rhs = C.compose(v.eta(b), d(d(f)))
                if lhs != rhs:
                    rep.fail("naturality", morphism=f, f_eta=lhs, eta_ddf=rhs)
    for a in obs:
        da = v.d_obj(a)
        e_da = v.eta(da)
        d_ea = d(v.eta(a))
        rep.count("coherence")
        ok = (d_ea.dom == e_da.cod and d_ea.cod == e_da.dom
              and C.compose(d_ea, e_da) == C.identity(e_da.dom)
              and C.compose(e_da, d_ea) == C.identity(da))
        if not ok:
            rep.fail("coherence", object=a, d_eta=d_ea, eta_d=e_da)
    return rep


def check_dagger(C: Category, d: DaggerStructure, objects=None) -> ValidationReport:
    """Identity on objects, strictly involutive, contravariant."""
    rep = ValidationReport("dagger")
    obs = list(objects) if objects is not None else C.objects()
    for a in obs:
        rep.count("identity")
        if d(C.identity(a)) != C.identity(a):
            rep.fail("identity", object=a)
        for b in obs:
            for f in C.hom_generators(a, b):
                df = d(f)
                rep.count("identity-on-objects")
                if df.dom != b or df.cod != a or not C.contains(df):
                    rep.fail("identity-on-objects", morphism=f, image=df)
                    continue
                rep.count("involutive")
                if d(df) != f:
                    rep.fail("involutive", morphism=f, dd=d(df))
    if rep.failures:
        return rep
    for f, g in _composable_triples(C, obs):
        rep.count("contravariance")
        if d(C.compose(g, f)) != C.compose(d(f), d(g)):
            rep.fail("contravariance", f=f, g=g)
    return rep


# predicates ---------------------------------------------------------------

def is_isometry(C: Category, d: DaggerStructure, u: Arrow) -> bool:
    return C.compose(d(u), u) == C.identity(u.dom)


def is_unitary(C: Category, d: DaggerStructure, u: Arrow) -> bool:
    return is_isometry(C, d, u) and C.compose(u, d(u)) == C.identity(u.cod)


def is_self_adjoint(C: Category, d: DaggerStructure, f: Arrow) -> bool:
    return f.dom == f.cod and d(f) == f


# ---------------------------------------------------------------------------
# concrete volutions on MatCategory


def transpose_volution(C: MatCategory) -> O1Volution:
    return O1Volution(C, lambda n: n, lambda f: Arrow(f.cod, f.dom, f.value.T),
                      C.identity, "transpose")


def conjugate_transpose_volution(C: MatCategory) -> O1Volution:
    return O1Volution(C, lambda n: n, lambda f: Arrow(f.cod, f.dom, f.value.H),
                      C.identity, "conjugate-transpose")


def transpose_dagger(C: MatCategory) -> DaggerStructure:
    return DaggerStructure(C, lambda f: Arrow(f.cod, f.dom, f.value.T), "transpose")


def conjugate_transpose_dagger(C: MatCategory) -> DaggerStructure:
    return DaggerStructure(C, lambda f: Arrow(f.cod, f.dom, f.value.H), "conjugate-transpose")


# ---------------------------------------------------------------------------
# T and S


def t_o1(C: Category, d: DaggerStructure, objects=None) -> tuple[Category, O1Volution]:
    rep = check_dagger(C, d, objects)
    if not rep.valid:
        raise InvalidDagger(rep)
    return C, d.as_volution()


class Strictification(Category):
    """Objects (a, theta) with theta: a -> d(a) iso and eta_a d(theta)^-1 theta = id_a."""

    def __init__(self, base: Category, vol: O1Volution, extra_thetas: Iterable[Arrow] = (),
                 sample_limit: int = 4):
        self.base = base
        self.vol = vol
        self.finite = base.finite
        self.linear = base.linear
        self._extra = list(extra_thetas)
        self._sample_limit = sample_limit
        self._objects = None
        self._inv_cache: dict = {}

    @property
    def field(self):
        return self.base.field

    def base_object(self, x):
        return x[0]

    def _inv(self, f):
        if f not in self._inv_cache:
            self._inv_cache[f] = self.base.inverse(f)
        return self._inv_cache[f]

    def is_fixed_point(self, a, theta: Arrow) -> bool:
        C, v = self.base, self.vol
        if theta.dom != a or theta.cod != v.d_obj(a) or not C.contains(theta):
            return False
        tinv = self._inv(theta)
        if tinv is None:
            return False
        dt_inv = self._inv(v.d_mor(theta))
        if dt_inv is None:
            return False
        lhs = C.compose(v.eta(a), C.compose(dt_inv, theta))
        return lhs == C.identity(a)

    def has_object(self, x):
        return isinstance(x, tuple) and len(x) == 2 and self.base.has_object(x[0]) \
            and self.is_fixed_point(x[0], x[1])

    def _candidates(self, a):
        C, v = self.base, self.vol
        da = v.d_obj(a)
        if C.finite:
            yield from C.hom(a, da)
            return
        for t in self._extra:
            if t.dom == a:
                yield t
        M = base_matrix(C.identity(a))
        if a == da and M.is_square():
            n = M.rows
            for signs in itertools.product((1, -1), repeat=n):
                D = Matrix.diag(signs, C.field)
                yield C.wrap(a, da, base_matrix(C.compose(C.identity(da), C.compose(C.wrap(a, da, D), C.identity(a)))))
        for D in small_combinations(C.hom(a, da)):
            yield C.wrap(a, da, D)

    def objects(self):
        if self._objects is None:
            obs = []
            for a in self.base.objects():
                found = []
                for t in self._candidates(a):
                    if t in found:
                        continue
                    if self.is_fixed_point(a, t):
                        found.append(t)
                        if not self.base.finite and len(found) >= self._sample_limit + len(self._extra):
                            break
                obs.extend((a, t) for t in found)
            self._objects = obs
        return list(self._objects)

    def hom(self, x, y):
        return [Arrow(x, y, f) for f in self.base.hom(x[0], y[0])]

    def hom_generators(self, x, y):
        return [Arrow(x, y, f) for f in self.base.hom_generators(x[0], y[0])]

    def compose(self, g, f):
        if f.cod != g.dom:
            raise ValueError("not composable")
        return Arrow(f.dom, g.cod, self.base.compose(g.value, f.value))

    def identity(self, x):
        return Arrow(x, x, self.base.identity(x[0]))

    def contains(self, f):
        return self.base.contains(f.value) and f.value.dom == f.dom[0] and f.value.cod == f.cod[0]

    def wrap(self, x, y, M):
        return Arrow(x, y, self.base.wrap(x[0], y[0], M))

    def inverse(self, f):
        g = self.base.inverse(f.value)
        return None if g is None else Arrow(f.cod, f.dom, g)

    def hom_size(self, x, y):
        return self.base.hom_size(x[0], y[0])

    def dagger_of(self, f: Arrow) -> Arrow:
        """theta_a^-1 . d(X) . theta_b : (b, theta_b) -> (a, theta_a)."""
        (a, ta), (b, tb) = f.dom, f.cod
        C = self.base
        body = C.compose(self._inv(ta), C.compose(self.vol.d_mor(f.value), tb))
        return Arrow(f.cod, f.dom, body)


def s_o1(C: Category, v: O1Volution, extra_thetas: Iterable[Arrow] = (), sample_limit: int = 4
         ) -> tuple[Strictification, DaggerStructure]:
    S = Strictification(C, v, extra_thetas, sample_limit)
    return S, DaggerStructure(S, S.dagger_of, f"S({v.name})")


# ---------------------------------------------------------------------------
# idempotent completion


class IdempotentCompletion(Category):
    """Objects (a, e) with e: a -> a idempotent; hom = {X : f X = X = X e}; id = e."""

    def __init__(self, base: Category, extra_idempotents: Iterable[Arrow] = (),
                 sample_limit: int = 6, include_base_samples: bool = True):
        self.base = base
        self.finite = base.finite
        self.linear = base.linear
        self._extra = list(extra_idempotents)
        self._limit = sample_limit
        self._include = include_base_samples
        self._objects = None
        self._hom_cache: dict = {}

    @property
    def field(self):
        return self.base.field

    def base_object(self, x):
        return x[0]

    def is_idempotent(self, e: Arrow) -> bool:
        return e.dom == e.cod and self.base.compose(e, e) == e

    def accept(self, a, e) -> bool:
        return self.is_idempotent(e)

    def _candidates(self, a):
        C = self.base
        if C.finite:
            yield from C.hom(a, a)
            return
        for e in self._extra:
            if e.dom == a:
                yield e
        if not self._include:
            return
        yield C.identity(a)
        if isinstance(C, MatCategory):
            for M in C.sample_idempotents(a):
                yield Arrow(a, a, M)
            return
        found = 0
        for M in small_combinations(C.hom(a, a)):
            e = C.wrap(a, a, M)
            if self.is_idempotent(e) and C.contains(e):
                found += 1
                yield e
                if found >= self._limit:
                    return

    def objects(self):
        if self._objects is None:
            obs = []
            for a in self.base.objects():
                seen = []
                for e in self._candidates(a):
                    if e not in seen and self.is_idempotent(e) and self.accept(a, e):
                        seen.append(e)
                obs.extend((a, e) for e in seen)
            self._objects = obs
        return list(self._objects)

    def has_object(self, x):
        return isinstance(x, tuple) and len(x) == 2 and isinstance(x[1], Arrow) \
            and self.base.has_object(x[0]) and x[1].dom == x[0] and self.base.contains(x[1]) \
            and self.is_idempotent(x[1]) and self.accept(*x)

    def hom(self, x, y):
        key = (x, y)
        if key in self._hom_cache:
            return list(self._hom_cache[key])
        (a, e), (b, f) = x, y
        C = self.base
        if C.finite:
            out = [Arrow(x, y, X) for X in C.hom(a, b)
                   if C.compose(f, X) == X and C.compose(X, e) == X]
        else:
            mats = [base_matrix(C.compose(f, C.compose(X, e))) for X in C.hom(a, b)]
            out = linear_span_arrows(self, x, y, mats)
        self._hom_cache[key] = out
        return list(out)

    def wrap(self, x, y, M):
        return Arrow(x, y, self.base.wrap(x[0], y[0], M))

    def hom_generators(self, x, y):
        gens = self.hom(x, y)
        if self.linear and self.field == "Qi":
            gens += [self.wrap(x, y, base_matrix(g).scale(GaussQ(0, 1))) for g in gens]
        return gens

    def compose(self, g, f):
        if f.cod != g.dom:
            raise ValueError("not composable")
        return Arrow(f.dom, g.cod, self.base.compose(g.value, f.value))

    def identity(self, x):
        return Arrow(x, x, x[1])

    def contains(self, f):
        (a, e), (b, g) = f.dom, f.cod
        X = f.value
        C = self.base
        return X.dom == a and X.cod == b and C.contains(X) \
            and C.compose(g, X) == X and C.compose(X, e) == X

    def inverse(self, f):
        if self.linear:
            return linear_inverse(self, f)
        return Category.inverse(self, f)

    def hom_size(self, x, y):
        return len(self.hom(x, y))


def idempotent_completion(C: Category, extra_idempotents: Iterable[Arrow] = (), **kw
                          ) -> IdempotentCompletion:
    return IdempotentCompletion(C, extra_idempotents, **kw)


def i_o1(ide: IdempotentCompletion, v: O1Volution) -> O1Volution:
    """Induced volution: d'(a, e) = (d a, d e), d'(X) = d(X), eta'_(a,e) = e . eta_a."""
    C = ide.base

    def d_obj(x):
        a, e = x
        return (v.d_obj(a), v.d_mor(e))

    def d_mor(f):
        return Arrow(d_obj(f.cod), d_obj(f.dom), v.d_mor(f.value))

    def eta(x):
        a, e = x
        return Arrow(d_obj(d_obj(x)), x, C.compose(e, v.eta(a)))

    return O1Volution(ide, d_obj, d_mor, eta, f"I({v.name})")


class KaroubiEnvelope(IdempotentCompletion):
    """Full subcategory of Ide C on d-idempotents (e e = e and d(e) = e)."""

    def __init__(self, base: Category, dagger: DaggerStructure,
                 extra_idempotents: Iterable[Arrow] = (), **kw):
        self.dagger_base = dagger
        super().__init__(base, extra_idempotents, **kw)

    def accept(self, a, e):
        return self.dagger_base(e) == e


def d_karoubi(C: Category, d: DaggerStructure, extra_idempotents: Iterable[Arrow] = (), **kw
              ) -> tuple[KaroubiEnvelope, DaggerStructure]:
    K = KaroubiEnvelope(C, d, extra_idempotents, **kw)
    return K, DaggerStructure(K, lambda f: Arrow(f.cod, f.dom, d(f.value)), f"karoubi({d.name})")


# ---------------------------------------------------------------------------
# functors and equivalence witnesses


@dataclass
class StructuredFunctor:
    source: Category
    target: Category
    on_objects: Callable[[Any], Any]
    on_morphisms: Callable[[Arrow], Arrow]
    alpha: Callable[[Any], Arrow] | None = None
    name: str = ""

    def __call__(self, x):
        if isinstance(x, Arrow):
            return self.on_morphisms(x)
        return self.on_objects(x)


def check_functor(F: StructuredFunctor, objects=None) -> ValidationReport:
    rep = ValidationReport("functor")
    S, T = F.source, F.target
    obs = list(objects) if objects is not None else S.objects()
    for a in obs:
        rep.count("object")
        if not T.has_object(F(a)):
            rep.fail("object", object=a, image=F(a))
        rep.count("identity")
        if F(S.identity(a)) != T.identity(F(a)):
            rep.fail("identity", object=a)
    for a in obs:
        for b in obs:
            for f in S.hom_generators(a, b):
                Ff = F(f)
                rep.count("typing")
                if Ff.dom != F(a) or Ff.cod != F(b) or not T.contains(Ff):
                    rep.fail("typing", morphism=f, image=Ff)
    for f, g in _composable_triples(S, obs):
        rep.count("composition")
        if F(S.compose(g, f)) != T.compose(F(g), F(f)):
            rep.fail("composition", f=f, g=g)
    return rep


def check_fully_faithful(F: StructuredFunctor, objects=None) -> ValidationReport:
    """Bijectivity of hom(a, b) -> hom(Fa, Fb): exhaustive for finite categories,
    by injectivity on a basis plus equal dimension for linear ones."""
    rep = ValidationReport("fully-faithful")
    S, T = F.source, F.target
    obs = list(objects) if objects is not None else S.objects()
    for a in obs:
        for b in obs:
            src = S.hom(a, b)
            images = [F(f) for f in src]
            rep.count("hom-set")
            if S.linear:
                n_img = len(span_basis([base_matrix(g).vec() for g in images], len(images))) \
                    if images else 0
                if n_img != len(src) or T.hom_size(F(a), F(b)) != len(src):
                    rep.fail("hom-set", source=a, target=b, source_dim=len(src),
                             image_rank=n_img, target_dim=T.hom_size(F(a), F(b)))
            else:
                tgt = T.hom(F(a), F(b))
                if len(set(images)) != len(src) or set(images) != set(tgt):
                    rep.fail("hom-set", source=a, target=b, source_size=len(src),
                             target_size=len(tgt))
    return rep


def check_dagger_functor(F: StructuredFunctor, d_src: DaggerStructure, d_tgt: DaggerStructure,
                         objects=None) -> ValidationReport:
    rep = ValidationReport("dagger-functor")
    S = F.source
    obs = list(objects) if objects is not None else S.objects()
    for a in obs:
        for b in obs:
            for f in S.hom_generators(a, b):
                rep.count("dagger")
                if F(d_src(f)) != d_tgt(F(f)):
                    rep.fail("dagger", morphism=f)
    return rep


def check_essentially_surjective(F: StructuredFunctor, preimage: Callable[[Any], tuple[Any, Arrow]],
                                 objects=None, unitary_dagger: DaggerStructure | None = None
                                 ) -> ValidationReport:
    """For each target object y, ``preimage(y)`` proposes (x, u: F(x) -> y);
    u is verified to be an isomorphism (a unitary if a dagger is given)."""
    rep = ValidationReport("essentially-surjective")
    S, T = F.source, F.target
    obs = list(objects) if objects is not None else T.objects()
    for y in obs:
        rep.count("object")
        got = preimage(y)
        if got is None:
            rep.fail("object", object=y, reason="no preimage proposed")
            continue
        x, u = got
        ok = S.has_object(x) and u.dom == F(x) and u.cod == y and T.contains(u)
        if ok:
            if unitary_dagger is not None:
                ok = is_unitary(T, unitary_dagger, u)
            else:
                ok = T.is_iso(u)
        if not ok:
            rep.fail("object", object=y, proposed=x, witness=u)
    return rep


# ---------------------------------------------------------------------------
# comparison Ide Ide C <- Ide C and psi


def ide_comparison(ide: IdempotentCompletion, ide2: IdempotentCompletion) -> StructuredFunctor:
    """(a, e) -> ((a, e), id_(a,e)), X -> X."""
    def on_obj(x):
        return (x, ide.identity(x))

    def on_mor(f):
        return Arrow(on_obj(f.dom), on_obj(f.cod), f)

    return StructuredFunctor(ide, ide2, on_obj, on_mor, name="Ide->IdeIde")


def ide_comparison_preimage(ide: IdempotentCompletion):
    """For ((a, e), e') return (a, e'') with the iso e': F(a, e'') -> ((a, e), e')."""
    def pre(y):
        (a, e), ep = y
        inner = ep.value
        x = (a, inner)
        u = Arrow((x, ide.identity(x)), y, Arrow(x, (a, e), inner))
        return x, u
    return pre


def ide_idempotency_witness(C: Category, extra_idempotents=(), extra_level2=()) -> dict:
    """Ide C -> Ide Ide C is fully faithful and essentially surjective."""
    I1 = idempotent_completion(C, extra_idempotents)
    I2 = IdempotentCompletion(I1, extra_level2)
    F = ide_comparison(I1, I2)
    reports = {
        "functor": check_functor(F),
        "fully_faithful": check_fully_faithful(F),
        "essentially_surjective": check_essentially_surjective(F, ide_comparison_preimage(I1)),
    }
    return {"functor": F, "source": I1, "target": I2, "reports": reports,
            "valid": all(r.valid for r in reports.values())}


def io1_idempotency_witness(C: Category, v: O1Volution, extra_idempotents=(), extra_level2=()
                            ) -> dict:
    """The comparison (a,e) -> (a,e,e) as an O(1)-volutive functor I -> I I with trivial alpha."""
    I1 = idempotent_completion(C, extra_idempotents)
    v1 = i_o1(I1, v)
    I2 = IdempotentCompletion(I1, extra_level2)
    v2 = i_o1(I2, v1)
    F = ide_comparison(I1, I2)
    F.alpha = lambda x: I2.identity(F(v1.d_obj(x)))
    rep = ValidationReport("o1-functor")
    for x in I1.objects():
        rep.count("alpha-trivial")
        if F(v1.d_obj(x)) != v2.d_obj(F(x)):
            rep.fail("alpha-trivial", object=x)
            continue
        rep.count("eta-compatibility")
        # with alpha = id the square reduces to F(eta'_x) = eta''_{F x}
        if F(v1.eta(x)) != v2.eta(F(x)):
            rep.fail("eta-compatibility", object=x)
    for x in I1.objects():
        for y in I1.objects():
            for f in I1.hom_generators(x, y):
                rep.count("commutes-with-d")
                if F(v1.d_mor(f)) != v2.d_mor(F(f)):
                    rep.fail("commutes-with-d", morphism=f)
    reports = {
        "volution_I": check_o1_volution(I1, v1),
        "volution_II": check_o1_volution(I2, v2),
        "functor": check_functor(F),
        "o1_functor": rep,
        "fully_faithful": check_fully_faithful(F),
        "essentially_surjective": check_essentially_surjective(F, ide_comparison_preimage(I1)),
    }
    return {"functor": F, "reports": reports, "valid": all(r.valid for r in reports.values())}


def psi_embed(C: Category, d: DaggerStructure, extra_idempotents: Iterable[Arrow] = ()) -> dict:
    """psi: (a, e) -> (a, e, id_(a,e)), X -> X, from the d-Karoubi envelope into S I T (C, d)."""
    extra = list(extra_idempotents)
    K, dK = d_karoubi(C, d, extra)
    _, vol = t_o1(C, d)
    I = idempotent_completion(C, [e for e in extra])
    vI = i_o1(I, vol)

    def on_obj(x):
        return (x, I.identity(x))

    thetas = [on_obj(x)[1] for x in K.objects()]
    S, dS = s_o1(I, vI, extra_thetas=thetas, sample_limit=0)

    def on_mor(f):
        return Arrow(on_obj(f.dom), on_obj(f.cod), Arrow(f.dom, f.cod, f.value))

    F = StructuredFunctor(K, S, on_obj, on_mor, name="psi")
    reports = {
        "karoubi_dagger": check_dagger(K, dK),
        "functor": check_functor(F),
        "fully_faithful": check_fully_faithful(F),
        "dagger_functor": check_dagger_functor(F, dK, dS),
    }
    return {"functor": F, "source": K, "target": S, "source_dagger": dK, "target_dagger": dS,
            "reports": reports, "valid": all(r.valid for r in reports.values())}


# ---------------------------------------------------------------------------
# positivity


def congruence_diagonalize(H: Matrix) -> tuple[Matrix, Matrix]:
    """Return (S, D) with S invertible, D diagonal and S^H H S = D (H hermitian)."""
    n = H.rows
    A = H
    S = Matrix.identity(n, H.field)

    def apply(T):
        nonlocal A, S
        A = T.H @ A @ T
        S = S @ T

    for k in range(n):
        if not A[k, k]:
            j = next((j for j in range(k + 1, n) if A[j, j]), None)
            if j is not None:
                P = _swap(n, k, j, H.field)
                apply(P)
            else:
                j = next((j for j in range(k + 1, n) if A[k, j]), None)
                if j is None:
                    continue
                c = 1
                x = A[k, j]
                if isinstance(x, GaussQ) and x.re == 0:
                    c = GaussQ(0, 1)
                T = Matrix.identity(n, H.field) + Matrix.unit(n, n, j, k, H.field, c)
                apply(T)
        piv = A[k, k]
        if not piv:
            continue
        T = Matrix.identity(n, H.field)
        for j in range(k + 1, n):
            if A[k, j]:
                T = T - Matrix.unit(n, n, k, j, H.field, A[k, j] / piv)
        apply(T)
    return S, A


def _swap(n, i, j, fld):
    rows = []
    for r in range(n):
        src = j if r == i else i if r == j else r
        rows.append([1 if c == src else 0 for c in range(n)])
    return Matrix(rows, fld)


def _rational_sqrt(q):
    q = mpq(q)
    if q < 0:
        return None
    if is_square(q.numerator) and is_square(q.denominator):
        return mpq(isqrt(q.numerator), isqrt(q.denominator))
    return None


def _two_squares(q):
    """(x, y) rationals with x^2 + y^2 = q, searched on q = N / den^2; or None."""
    q = mpq(q)
    if q < 0:
        return None
    den = q.denominator
    N = q.numerator * den
    x = 0
    while x * x <= N:
        r = N - x * x
        if is_square(r):
            return mpq(x, den), mpq(isqrt(r), den)
        x += 1
        if x > 10000:
            return None
    return None


def is_positive(C: Category, d: DaggerStructure, f: Arrow) -> tuple[bool | None, Arrow | None]:
    """Is f = d(g) g for an isomorphism g: a -> b?  Returns (verdict, g).

    Finite categories are searched exhaustively.  The strictified hermitian
    fixture is decided by congruence diagonalisation; plain matrix daggers by
    LDL^H with rational square-root detection (None = undetermined).
    """
    if f.dom != f.cod or d(f) != f or not C.is_iso(f):
        return False, None
    if C.finite:
        for b in C.objects():
            for g in C.hom(f.dom, b):
                if C.is_iso(g) and C.compose(d(g), g) == f:
                    return True, g
        return False, None
    if isinstance(C, Strictification) and isinstance(C.base, MatCategory):
        (n, theta) = f.dom
        H = theta.value @ base_matrix(f)
        S, D = congruence_diagonalize(H)
        g = S.inverse()
        target = (n, Arrow(n, n, D))
        if not C.has_object(target):
            return None, None
        u = Arrow(f.dom, target, Arrow(n, n, g))
        if C.compose(d(u), u) == f:
            return True, u
        return None, None
    if isinstance(C, MatCategory):
        return _matrix_positive(C, d, f)
    return None, None


def _matrix_positive(C: MatCategory, d: DaggerStructure, f: Arrow):
    F = f.value
    n = F.rows
    S, D = congruence_diagonalize(F)
    diag = [D[i, i] for i in range(n)]
    reals = [x.re if isinstance(x, GaussQ) else x for x in diag]
    if any(r <= 0 for r in reals):
        return False, None
    roots = []
    for r in reals:
        if C.field == "Q":
            s = _rational_sqrt(r)
            if s is None:
                return None, None
            roots.append(s)
        else:
            s = _rational_sqrt(r)
            if s is not None:
                roots.append(GaussQ(s, 0))
                continue
            xy = _two_squares(r)
            if xy is None:
                return None, None
            roots.append(GaussQ(*xy))
    R = Matrix.diag(roots, C.field)
    g = R @ S.inverse()
    u = Arrow(n, n, g)
    if C.compose(d(u), u) == f:
        return True, u
    return None, None


# ---------------------------------------------------------------------------
# JSON loading for finite categories with optional volution block


def load_finite(data: dict) -> tuple[FiniteCategory, O1Volution | None]:
    C = FiniteCategory.from_json(data)
    vol = data.get("volution")
    if vol is None:
        return C, None
    d_obj = dict(vol.get("d_obj") or {a: a for a in C.objects()})
    d_mor_tab = dict(vol["d_mor"])
    eta_tab = dict(vol.get("eta") or {a: C._ids[a] for a in C.objects()})
    names = {f.value for f in C.morphisms()}
    for a in C.objects():
        if d_obj.get(a) not in C.objects() or eta_tab.get(a) not in names:
            raise ValueError(f"volution block incomplete at object {a!r}")
    for m in names:
        if d_mor_tab.get(m) not in names:
            raise ValueError(f"volution block has no valid image for morphism {m!r}")

    def d_mor(f):
        return C.arrow(d_mor_tab[f.value])

    def eta(a):
        return C.arrow(eta_tab[a])

    return C, O1Volution(C, lambda a: d_obj[a], d_mor, eta, vol.get("name", "d"))


def volution_is_strict_dagger(C: Category, v: O1Volution) -> bool:
    return all(v.d_obj(a) == a and v.eta(a) == C.identity(a) for a in C.objects())


def volution_as_dagger(C: Category, v: O1Volution) -> DaggerStructure:
    return DaggerStructure(C, v.d_mor, v.name)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# fixtures and further witnesses


DEFAULT_HERM_FORMS = (
    [[0, 1], [1, 0]],
    [[2, "i"], ["-i", 1]],
    [[1, "1+i"], ["1-i", -1]],
    [[1, 0, 0], [0, 0, 1], [0, 1, 0]],
    [[2, 1, 0], [1, 1, "i"], [0, "-i", 3]],
)


def herm_category(max_dim: int = 3, extra_forms: Iterable = DEFAULT_HERM_FORMS,
                  sample_limit: int = 2) -> tuple[Strictification, DaggerStructure]:
    """Hermitian forms over Q(i): S of the conjugate-transpose dagger on matrices.

    The object sample holds the signed diagonal forms and the given extra forms.
    """
    M = MatCategory("Qi", max_dim)
    _, vol = t_o1(M, conjugate_transpose_dagger(M))
    thetas = []
    for F in extra_forms:
        T = Matrix(F, "Qi")
        if T.rows <= max_dim:
            thetas.append(Arrow(T.rows, T.rows, T))
    return s_o1(M, vol, thetas, sample_limit)


def check_idempotents_split(I: IdempotentCompletion, objects=None) -> ValidationReport:
    """Every idempotent endomorphism p of (a, e) in the sample splits through (a, p)."""
    rep = ValidationReport("idempotent-complete")
    C = I.base
    obs = list(objects) if objects is not None else I.objects()
    for x in obs:
        a, e = x
        if I.finite:
            cands = I.hom(x, x)
        else:
            cands = list(I.hom(x, x)) + [I.identity(x)]
            cands += [I.wrap(x, x, M) for M in small_combinations(I.hom(x, x))]
        for p in cands:
            if I.compose(p, p) != p:
                continue
            rep.count("split")
            y = (a, p.value)
            r = Arrow(x, y, p.value)
            s = Arrow(y, x, p.value)
            ok = I.has_object(y) and I.contains(r) and I.contains(s) \
                and I.compose(r, s) == I.identity(y) and I.compose(s, r) == p
            if not ok:
                rep.fail("split", object=x, idempotent=p)
    return rep


def mat_ide_equivalence(M: MatCategory) -> dict:
    """n -> (n, I) is an equivalence Mat -> Ide Mat; (n, e) ~ (rank e, I) via e = Z Y."""
    from .exactnum import split_idempotent

    I = idempotent_completion(M)

    def on_obj(n):
        return (n, M.identity(n))

    def on_mor(f):
        return Arrow(on_obj(f.dom), on_obj(f.cod), f)

    F = StructuredFunctor(M, I, on_obj, on_mor, name="Mat->IdeMat")

    def pre(y):
        n, e = y
        Y, Z = split_idempotent(e.value)
        k = Y.rows
        return k, Arrow(on_obj(k), y, Arrow(k, n, Z))

    reports = {
        "functor": check_functor(F),
        "fully_faithful": check_fully_faithful(F),
        "essentially_surjective": check_essentially_surjective(F, pre),
    }
    return {"functor": F, "reports": reports, "valid": all(r.valid for r in reports.values())}


def herm_round_trip(max_dim: int = 3, extra_forms: Iterable = DEFAULT_HERM_FORMS,
                    extra_outer: Iterable[Matrix] = ()) -> dict:
    """Witness that S T (Herm) is dagger equivalent to Herm.

    The unit (n, theta) -> ((n, theta), id) is checked to be a fully faithful
    dagger functor; every sampled ((n, theta), Theta) is matched with a unitary
    onto the image of (n, D), where S^H (theta Theta) S = D is a congruence
    diagonalisation and the comparison map is S^-1.
    """
    H, dH = herm_category(max_dim, extra_forms)
    _, vH = t_o1(H, dH)
    outer = []
    for x in H.objects():
        n = x[0]
        for T in extra_outer:
            if T.rows == n:
                outer.append(Arrow(x, x, Arrow(n, n, x[1].value.inverse() @ T)))
    ST, dST = s_o1(H, vH, outer, sample_limit=2)

    def on_obj(x):
        return (x, H.identity(x))

    def on_mor(f):
        return Arrow(on_obj(f.dom), on_obj(f.cod), f)

    F = StructuredFunctor(H, ST, on_obj, on_mor, name="Herm->ST(Herm)")

    def pre(y):
        x, Theta = y
        n, theta = x
        Hm = theta.value @ base_matrix(Theta)
        S, D = congruence_diagonalize(Hm)
        g = S.inverse()
        target = (n, Arrow(n, n, D))
        u = Arrow(on_obj(target), y, Arrow(target, x, Arrow(n, n, S)))
        return target, u

    reports = {
        "herm_dagger": check_dagger(H, dH),
        "st_dagger": check_dagger(ST, dST),
        "functor": check_functor(F),
        "fully_faithful": check_fully_faithful(F),
        "dagger_functor": check_dagger_functor(F, dH, dST),
        "essentially_surjective": check_essentially_surjective(F, pre, unitary_dagger=dST),
    }
    return {"functor": F, "source": H, "target": ST, "reports": reports,
            "valid": all(r.valid for r in reports.values())}


# finite fixtures ------------------------------------------------------------


def _finite_with_dagger(C: FiniteCategory, dmap: dict) -> tuple[FiniteCategory, DaggerStructure]:
    return C, DaggerStructure(C, lambda f: C.arrow(dmap[f.value]), "d")


def fixture_point():
    C = FiniteCategory.monoid(["1"], lambda g, f: "1", "1", "point")
    return _finite_with_dagger(C, {"1": "1"})


def fixture_idempotent():
    """One object, End = {1, e} with e e = e; d = id."""
    C = FiniteCategory.monoid(["1", "e"], lambda g, f: f if g == "1" else g if f == "1" else "e",
                              "1", "idempotent")
    return _finite_with_dagger(C, {"1": "1", "e": "e"})


def fixture_z2():
    C = FiniteCategory.monoid(["1", "s"], lambda g, f: "1" if g == f else "s", "1", "z2")
    return _finite_with_dagger(C, {"1": "1", "s": "s"})


def fixture_groupoid():
    """Two objects joined by u: a -> b and its inverse v; d(u) = v."""
    mors = {"1a": ("a", "a"), "1b": ("b", "b"), "u": ("a", "b"), "v": ("b", "a")}
    table = {}
    for g, (gs, gt) in mors.items():
        for f, (fs, ft) in mors.items():
            if ft != gs:
                continue
            if g.startswith("1"):
                h = f
            elif f.startswith("1"):
                h = g
            else:
                h = "1" + fs
            table[(g, f)] = h
    C = FiniteCategory(["a", "b"], mors, table, {"a": "1a", "b": "1b"}, "groupoid")
    return _finite_with_dagger(C, {"1a": "1a", "1b": "1b", "u": "v", "v": "u"})


def fixture_s3():
    """Symmetric group on three letters with d = inverse."""
    perms = list(itertools.permutations(range(3)))
    name = {p: "".join(map(str, p)) for p in perms}
    mult = {}
    for g in perms:
        for f in perms:
            mult[(name[g], name[f])] = name[tuple(g[f[i]] for i in range(3))]
    inv = {name[p]: name[tuple(sorted(range(3), key=lambda i: p[i]))] for p in perms}
    C = FiniteCategory.monoid([name[p] for p in perms], lambda g, f: mult[(g, f)], "012", "s3")
    return _finite_with_dagger(C, inv)


def fixture_matrix_units():
    """{1, 0, E11, E12, E21, E22} with E_ij E_kl = delta_jk E_il; d(E_ij) = E_ji."""
    els = ["1", "0", "E11", "E12", "E21", "E22"]

    def mult(g, f):
        if g == "1":
            return f
        if f == "1":
            return g
        if "0" in (g, f):
            return "0"
        return f"E{g[1]}{f[2]}" if g[2] == f[1] else "0"

    C = FiniteCategory.monoid(els, mult, "1", "matrix-units")
    d = {"1": "1", "0": "0", "E11": "E11", "E22": "E22", "E12": "E21", "E21": "E12"}
    return _finite_with_dagger(C, d)


def fixture_rectangular_band():
    """2x2 rectangular band (i,j)(k,l) = (i,l) with a unit; d(i,j) = (j,i).

    Every element is idempotent but only the diagonal ones are d-idempotents.
    """
    els = ["1"] + [f"r{i}{j}" for i in range(2) for j in range(2)]

    def mult(g, f):
        if g == "1":
            return f
        if f == "1":
            return g
        return f"r{g[1]}{f[2]}"

    C = FiniteCategory.monoid(els, mult, "1", "rectangular-band")
    d = {"1": "1"}
    d.update({f"r{i}{j}": f"r{j}{i}" for i in range(2) for j in range(2)})
    return _finite_with_dagger(C, d)


def fixture_two_idempotents():
    """Commutative monoid {1, e, f, z}: e, f idempotent, ef = z absorbing; d = id."""
    els = ["1", "e", "f", "z"]

    def mult(g, h):
        if g == "1":
            return h
        if h == "1":
            return g
        return g if g == h else "z"

    C = FiniteCategory.monoid(els, mult, "1", "two-idempotents")
    return _finite_with_dagger(C, {x: x for x in els})


def fixture_empty():
    C = FiniteCategory([], {}, {}, {}, "empty")
    return _finite_with_dagger(C, {})


FINITE_FIXTURES = {
    "point": fixture_point,
    "idempotent": fixture_idempotent,
    "z2": fixture_z2,
    "groupoid": fixture_groupoid,
    "s3": fixture_s3,
    "matrix-units": fixture_matrix_units,
    "rectangular-band": fixture_rectangular_band,
    "two-idempotents": fixture_two_idempotents,
    "empty": fixture_empty,
}


def fixture_s3_twisted() -> tuple[FiniteCategory, O1Volution]:
    """S3 with d(g) = (c g c^-1)^-1 for the 3-cycle c and eta = c.

    d^2 is conjugation by c^2, so eta = c is natural, and d(c) = c^-1 gives
    the coherence; d is not a dagger since d^2 != id.
    """
    C, _ = fixture_s3()
    names = {f.value for f in C.morphisms()}
    c = "120"
    cinv = next(x for x in names if C._table[(x, c)] == "012")

    def conj(g):
        return C._table[(C._table[(c, g)], cinv)]

    inv = {g: next(x for x in names if C._table[(x, g)] == "012") for g in names}
    dmap = {g: inv[conj(g)] for g in names}
    v = O1Volution(C, lambda a: a, lambda f: C.arrow(dmap[f.value]), lambda a: C.arrow(c),
                   "twisted")
    return C, v


def noncommutative_identity_volution() -> tuple[FiniteCategory, O1Volution]:
    """Left-zero band {1, a, b} (xy = x) with d = identity on morphisms: not contravariant."""
    C = FiniteCategory.monoid(["1", "a", "b"], lambda g, f: f if g == "1" else g, "1", "left-zero")
    return C, O1Volution(C, lambda x: x, lambda f: f, C.identity, "id")


def finite_to_json(C: FiniteCategory, v: O1Volution | DaggerStructure | None = None) -> dict:
    data = C.to_json()
    if v is None:
        return data
    if isinstance(v, DaggerStructure):
        v = v.as_volution()
    data["volution"] = {
        "name": v.name,
        "d_obj": {a: v.d_obj(a) for a in C.objects()},
        "d_mor": {f.value: v.d_mor(f).value for f in C.morphisms()},
        "eta": {a: v.eta(a).value for a in C.objects()},
    }
    return data
