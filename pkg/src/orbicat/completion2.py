"""Object classifications in the completed 2-category of algebras and bimodules.

In the skeletal model an object of the idempotent completion is a Frobenius
algebra, endomorphisms of its identity 1-morphism are central elements, and
2-morphisms are intertwiners.  This module decides the orbifold, Spin(2)^r and
O(2) conditions, computes the data on both sides of the SIT / Euler
comparison, and builds the volution induced on a Hom category by a pair of O(2)
objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import cat1
from .cat1 import Arrow, O1Volution
from .exactnum import Matrix, format_scalar, span_basis
from .frobenius import (AlgebraMap, Bimodule, FrobeniusAlgebra, Intertwiner, Vec,
                        check_delta_separable, intertwiner_space, is_r_spin, is_symmetric,
                        make_bimodule, nakayama_automorphism, regular_bimodule, twist_bimodule)


class O2Error(ValueError):
    kind = "O2Error"

    def __init__(self, witness, detail: str = ""):
        super().__init__(f"{self.kind}: {witness} {detail}".strip())
        self.witness = witness


class NotAntiHomomorphism(O2Error):
    kind = "NotAntiHomomorphism"


class NotInvolutive(O2Error):
    kind = "NotInvolutive"


class CounitMismatch(O2Error):
    kind = "CounitMismatch"


class NotSymmetric(O2Error):
    kind = "NotSymmetric"


class NotSeparable(O2Error):
    kind = "NotSeparable"


def _vec_json(v: Vec) -> list[str]:
    return [format_scalar(x) for x in v]


def check_orbifold_object(F: FrobeniusAlgebra) -> bool:
    return check_delta_separable(F) and is_symmetric(F)


@dataclass
class SpinObject:
    F: FrobeniusAlgebra
    r: int
    mode: str
    strict: bool
    separable: bool
    witness: Vec | None = None
    lam: Intertwiner | None = None

    def to_json(self) -> dict:
        d = {"algebra": self.F.name, "r": self.r, "mode": self.mode, "strict_trivial": self.strict,
             "delta_separable": self.separable}
        if self.witness is not None:
            d["witness_u"] = _vec_json(self.witness)
        if self.lam is not None:
            d["lambda"] = self.lam.mat.to_json()
        return d


def lambda_from_witness(F: FrobeniusAlgebra, nur: AlgebraMap, w: Vec) -> Intertwiner:
    """Right multiplication by w^-1, an intertwiner A_{(nu^r)^-1} -> A."""
    A = F.alg
    reg = regular_bimodule(F)
    src = twist_bimodule(reg, None, nur.inverse())
    T = Intertwiner(src, reg, A.right_matrix(A.inverse(w)))
    return T


def check_spin_object(F: FrobeniusAlgebra, r: int, mode: str = "strict") -> SpinObject | None:
    v = is_r_spin(F, r, mode)
    if not v.holds:
        return None
    if mode == "strict":
        return SpinObject(F, r, mode, True, v.separable)
    nur = nakayama_automorphism(F).power(r)
    lam = lambda_from_witness(F, nur, v.witness)
    if not lam.is_valid() or not lam.is_invertible():
        raise AssertionError("inner witness does not give an invertible intertwiner")
    return SpinObject(F, r, mode, nur.is_identity(), v.separable, v.witness, lam)


@dataclass
class O2Object:
    """Simple form: theta an algebra map A -> A^op with Pi, lambda, phi identities."""

    F: FrobeniusAlgebra
    theta: AlgebraMap
    pi: Matrix
    lam: Matrix
    phi: Matrix

    def to_json(self) -> dict:
        return {"algebra": self.F.name, "theta": self.theta.mat.to_json(),
                "pi": "identity", "lambda": "identity", "phi": "identity"}


def _anti_hom_failures(F: FrobeniusAlgebra, theta: AlgebraMap):
    A = F.alg
    out = []
    for i in range(A.dim):
        for j in range(A.dim):
            ei, ej = A.basis(i), A.basis(j)
            lhs = theta(A.mul(ei, ej))
            rhs = A.scale(A.sign(i, j), A.mul(theta(ej), theta(ei)))
            if lhs != rhs:
                out.append((i, j, lhs, rhs))
    return out


def check_o2_object(F: FrobeniusAlgebra, theta: AlgebraMap) -> O2Object:
    """Raises the first failing condition, in the order anti-homomorphism,
    involutivity, counit compatibility, symmetry, separability.

    Among failing anti-homomorphism pairs the reported witness prefers one
    where both theta(ab) and theta(b)theta(a) are non-zero.
    """
    A = F.alg
    labels = A.labels
    bad = _anti_hom_failures(F, theta)
    if theta(A.unit) != A.unit:
        raise NotAntiHomomorphism(("unit",), "theta(1) != 1")
    if bad:
        both = [b for b in bad if any(b[2]) and any(b[3])]
        i, j, lhs, rhs = (both or bad)[0]
        raise NotAntiHomomorphism((labels[i], labels[j]),
                                  f"theta(ab)={_vec_json(lhs)} theta(b)theta(a)={_vec_json(rhs)}")
    sq = theta.power(2)
    if not sq.is_identity():
        k = next(k for k in range(A.dim) if sq(A.basis(k)) != A.basis(k))
        raise NotInvolutive((labels[k],))
    for k in range(A.dim):
        if F.counit(theta(A.basis(k))) != F.eps[k]:
            raise CounitMismatch((labels[k],))
    if not is_symmetric(F):
        for i in range(A.dim):
            for j in range(A.dim):
                ei, ej = A.basis(i), A.basis(j)
                if F.pair(ei, ej) != A.sign(i, j) * F.pair(ej, ei):
                    raise NotSymmetric((labels[i], labels[j]))
        raise NotSymmetric(())
    if not check_delta_separable(F):
        raise NotSeparable(())
    I = Matrix.identity(F.dim, F.field)
    return O2Object(F, theta, I, I, I)


# ---------------------------------------------------------------------------
# SIT versus Euler completion


@dataclass
class SITReport:
    algebra: str
    separable: bool
    symmetric: bool
    lambda_space: list[Vec]
    psi_space: list[Vec]
    lambda_sample: Vec | None
    psi_sample: Vec | None
    coincide: bool
    strict_inner_flag: bool

    def to_json(self) -> dict:
        return {
            "algebra": self.algebra,
            "delta_separable": self.separable,
            "symmetric": self.symmetric,
            "lambda_set": {"span": [_vec_json(v) for v in self.lambda_space],
                           "condition": "invertible", "sample": None if self.lambda_sample is None
                           else _vec_json(self.lambda_sample)},
            "psi_set": {"span": [_vec_json(v) for v in self.psi_space],
                        "condition": "invertible central", "sample": None if self.psi_sample is None
                        else _vec_json(self.psi_sample)},
            "bijection": "identity on underlying elements" if self.coincide else "none",
            "coincide": self.coincide,
            "strict_inner_discrepancy": self.strict_inner_flag,
        }


def _first_invertible(F: FrobeniusAlgebra, basis: list[Vec]) -> Vec | None:
    from .frobenius import _small_combos
    for v in _small_combos(basis, F.alg):
        if F.alg.is_invertible(v):
            return v
    return None


def _same_span(U: list[Vec], V: list[Vec], field: str) -> bool:
    if len(U) != len(V):
        return False
    if not U:
        return True
    cols = [Matrix.column(list(u), field) for u in U]
    both = cols + [Matrix.column(list(v), field) for v in V]
    return len(span_basis(both, len(both))) == len(U)


def sit_equivalence_so2(F: FrobeniusAlgebra) -> SITReport:
    """lambda data: t = T(1) for intertwiners T: A_{nu^-1} -> A, i.e. nu^-1(b) t = t b,
    with T invertible iff t is.  psi data (strict symmetric reading): invertible
    central elements when nu = id, nothing otherwise.
    """
    A = F.alg
    nu = nakayama_automorphism(F)
    reg = regular_bimodule(F)
    src = twist_bimodule(reg, None, nu.inverse())
    lam_basis = []
    for T in intertwiner_space(src, reg):
        lam_basis.append(tuple((T.mat @ A.as_column(A.unit)).flat()))
    sym = nu.is_identity()
    psi_basis = A.center_basis() if sym else []
    lam_s = _first_invertible(F, lam_basis)
    psi_s = _first_invertible(F, psi_basis) if psi_basis else None
    coincide = _same_span(lam_basis, psi_basis, F.field) and \
        ((lam_s is None) == (psi_s is None))
    flag = lam_s is not None and psi_s is None
    return SITReport(F.name, check_delta_separable(F), sym, lam_basis, psi_basis, lam_s, psi_s,
                     coincide, flag)


# ---------------------------------------------------------------------------
# volution on Hom categories


def dagger_bimodule(X: Bimodule, oA: O2Object, oB: O2Object) -> Bimodule:
    """X over (B, A) -> X^dagger over (B, A): the dual, turned around through theta.

    Left action b -> (lambda_X(theta_B b))^T, right action a -> (rho_X(theta_A a))^T.
    """
    B, A = X.left.alg, X.right.alg
    L = [X.lact(oB.theta(B.basis(i))).T for i in range(B.dim)]
    R = [X.ract(oA.theta(A.basis(i))).T for i in range(A.dim)]
    return make_bimodule(X.left, X.right, L, R, X.name + "+")


class BimoduleCategory(cat1.Category):
    """Bimodules over a fixed algebra pair with intertwiners; a linear category."""

    finite = False
    linear = True

    def __init__(self, objects: list[Bimodule]):
        self._objects = list(dict.fromkeys(objects))
        self._hom: dict = {}
        self.field = self._objects[0].field if self._objects else "Q"

    def objects(self):
        return list(self._objects)

    def has_object(self, a):
        return isinstance(a, Bimodule)

    def hom(self, a, b):
        key = (a, b)
        if key not in self._hom:
            self._hom[key] = [Arrow(a, b, T.mat) for T in intertwiner_space(a, b)]
        return list(self._hom[key])

    def wrap(self, a, b, M):
        return Arrow(a, b, M)

    def compose(self, g, f):
        if f.cod != g.dom:
            raise ValueError("not composable")
        return Arrow(f.dom, g.cod, g.value @ f.value)

    def identity(self, a):
        return Arrow(a, a, Matrix.identity(a.dim, a.field))

    def contains(self, f):
        return isinstance(f.value, Matrix) and f.value.shape == (f.cod.dim, f.dom.dim) and \
            Intertwiner(f.dom, f.cod, f.value).is_valid()

    def inverse(self, f):
        M = f.value
        if not M.is_square() or not M.is_invertible():
            return None
        return Arrow(f.cod, f.dom, M.inverse())

    def hom_size(self, a, b):
        return len(self.hom(a, b))


@dataclass
class HomDagger:
    X: Bimodule
    dual: Bimodule
    dagger: Bimodule
    eta: Intertwiner                  # X^{dagger dagger} -> X
    category: BimoduleCategory
    volution: O1Volution
    report: cat1.ValidationReport
    strict: tuple = field(default=())  # (S, dS)

    @property
    def valid(self) -> bool:
        return self.report.valid and self.eta.is_valid() and self.eta.is_invertible()


def hom_volution(C: BimoduleCategory, oA: O2Object, oB: O2Object) -> O1Volution:
    def d_obj(X):
        return dagger_bimodule(X, oA, oB)

    def d_mor(f):
        return Arrow(d_obj(f.cod), d_obj(f.dom), f.value.T)

    def eta(X):
        XX = d_obj(d_obj(X))
        return Arrow(XX, X, Matrix.identity(X.dim, X.field))

    return O1Volution(C, d_obj, d_mor, eta, "hom-dagger")


def hom_dagger(X: Bimodule, oA: O2Object, oB: O2Object, others: list[Bimodule] = ()) -> HomDagger:
    """X^dagger with its eta component X^{dagger dagger} -> X, the volution checked on
    the category spanned by X, the given bimodules and their daggers, and its
    strictification."""
    from .frobenius import dual_bimodule
    if X.left.alg != oB.F.alg or X.right.alg != oA.F.alg:
        raise ValueError("O2 objects do not match the algebras of X")
    D = dagger_bimodule(X, oA, oB)
    DD = dagger_bimodule(D, oA, oB)
    eta = Intertwiner(DD, X, Matrix.identity(X.dim, X.field))
    obs = [X, D] + list(others) + [dagger_bimodule(Y, oA, oB) for Y in others]
    C = BimoduleCategory(obs)
    vol = hom_volution(C, oA, oB)
    rep = cat1.check_o1_volution(C, vol)
    S = cat1.s_o1(C, vol, sample_limit=2)
    return HomDagger(X, dual_bimodule(X), D, eta, C, vol, rep, S)
