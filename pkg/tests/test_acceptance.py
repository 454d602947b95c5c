"""Acceptance criteria, one check each.

Run with pytest (a summary line per criterion is printed at the end) or
directly: ``python3 tests/test_acceptance.py``.
"""

import itertools
import sys
import time
from pathlib import Path

import pytest
import sympy as sp

sys.path.insert(0, str(Path(__file__).parent))

from orbicat import cat1, completion2 as c2, frobenius as fr, statesum as ss  # noqa: E402
from orbicat.exactnum import Matrix  # noqa: E402
import oracles  # noqa: E402

RESULTS: dict[int, tuple[bool, str]] = {}
TITLES = {
    1: "Herm round trip S.T(Herm) ~ Herm",
    2: "psi embedding fully faithful dagger functor",
    3: "completion idempotency Ide Ide ~ Ide, I I ~ I",
    4: "Frobenius engine on the algebra corpus",
    5: "Nakayama conjugation nu(a) = u^-1 a u",
    6: "relative tensor calculus, unitors, associator, Zorro",
    7: "SIT bijection and strict/inner flag",
    8: "r-spin verdicts",
    9: "O(2) objects",
    10: "state-sum invariance",
}


def m2u():
    return fr.matrix_algebra(2, u=Matrix.diag([1, 2]))


def _failed(reports: dict) -> list[str]:
    return [k for k, r in reports.items() if not r.valid]


# 1 ---------------------------------------------------------------------------

def criterion_1():
    w = cat1.herm_round_trip(max_dim=3)
    bad = _failed(w["reports"])
    n = len(w["source"].objects())
    return not bad and w["valid"], f"{n} Herm objects, failing reports: {bad or 'none'}"


# 2 ---------------------------------------------------------------------------

def criterion_2():
    bad, sizes = [], []
    for name, make in sorted(cat1.FINITE_FIXTURES.items()):
        C, d = make()
        assert len(C.objects()) <= 4 and len(C.morphisms()) <= 40
        w = cat1.psi_embed(C, d)
        sizes.append(len(C.morphisms()))
        if not w["valid"]:
            bad.append((name, _failed(w["reports"])))
    M = cat1.MatCategory("Qi", 2)
    d = cat1.conjugate_transpose_dagger(M)
    proj = cat1.orthogonal_projection(Matrix.column([1, "i"], "Qi"))
    w = cat1.psi_embed(M, d, [cat1.Arrow(2, 2, proj)])
    if not w["valid"]:
        bad.append(("Mat/Qi", _failed(w["reports"])))
    H, dH = cat1.herm_category(max_dim=3)
    w = cat1.psi_embed(H, dH)
    if not w["valid"]:
        bad.append(("Herm", _failed(w["reports"])))
    n = len(w["source"].objects())
    return not bad, (f"{len(sizes)} finite fixtures, Mat/Qi, Herm ({n} Karoubi objects); "
                     f"failures: {bad or 'none'}")


# 3 ---------------------------------------------------------------------------

def criterion_3():
    bad = []
    fixtures = [(k, *m()) for k, m in sorted(cat1.FINITE_FIXTURES.items())]
    for name, C, d in fixtures:
        if not cat1.ide_idempotency_witness(C)["valid"]:
            bad.append(("Ide", name))
        if not cat1.io1_idempotency_witness(C, d.as_volution())["valid"]:
            bad.append(("I_O(1)", name))
    C, v = cat1.fixture_s3_twisted()
    if not cat1.io1_idempotency_witness(C, v)["valid"]:
        bad.append(("I_O(1)", "s3-twisted"))
    return not bad, f"{len(fixtures) + 1} fixtures; failures: {bad or 'none'}"


# 4 ---------------------------------------------------------------------------

def frobenius_corpus():
    out = {"Q": fr.trivial_algebra()}
    out.update({f"Q[Z{n}]": fr.group_algebra(n) for n in range(2, 6)})
    out.update({f"M{n}": fr.matrix_algebra(n) for n in range(1, 4)})
    out["M2 trace"] = fr.matrix_algebra(2, scale=1)
    out["QxQ"] = fr.product_algebra()
    out["M2/u"] = m2u()
    out["Cl1"] = fr.clifford_algebra(1)
    out["Cl2"] = fr.clifford_algebra(2)
    return out


def nakayama_residual(F) -> int:
    A = F.alg
    nu = fr.nakayama_automorphism(F)
    bad = 0
    for i, j in itertools.product(range(A.dim), repeat=2):
        a, b = A.basis(i), A.basis(j)
        if F.pair(nu(a), b) - A.sign(i, j) * F.pair(b, a) != 0:
            bad += 1
    return bad


def criterion_4():
    bad = []
    for name, F in frobenius_corpus().items():
        if fr.frobenius_report(F)["frobenius_identity_failures"]:
            bad.append((name, "frobenius identity"))
        oracle_sep = oracles.mu_delta(F) == sp.eye(F.dim)
        if fr.check_delta_separable(F) != oracle_sep:
            bad.append((name, "separability"))
        if nakayama_residual(F):
            bad.append((name, "nakayama residual"))
    return not bad, f"{len(frobenius_corpus())} algebras; failures: {bad or 'none'}"


# 5 ---------------------------------------------------------------------------

def criterion_5():
    F = m2u()
    u = Matrix.diag([1, 2])
    nu = fr.nakayama_automorphism(F)
    ref = oracles.nakayama(F)
    ok = oracles.to_sympy(nu.mat) == ref
    for i in range(4):
        a = fr.vec_to_matrix(F.alg.basis(i), 2)
        ok = ok and fr.vec_to_matrix(nu(F.alg.basis(i)), 2) == u.inverse() @ a @ u
    return ok, f"nu matrix diag = {[str(ref[i, i]) for i in range(4)]}"


# 6 ---------------------------------------------------------------------------

def tensor_corpus():
    M2, Z2, Q = fr.matrix_algebra(2), fr.group_algebra(2), fr.trivial_algebra()
    return {
        "col": fr.column_module(M2, 2),
        "row": fr.row_module(M2, 2),
        "M2": fr.regular_bimodule(M2),
        "Z2": fr.regular_bimodule(Z2),
        "QxQ": fr.regular_bimodule(fr.product_algebra()),
        "Q^2": fr.vector_bimodule(Q, 2),
    }


def criterion_6():
    B = tensor_corpus()
    bad, pairs, triples = [], 0, 0
    for x, X in B.items():
        if not (fr.left_unitor(X).verified() and fr.right_unitor(X).verified()):
            bad.append(("unitor", x))
        adj = fr.star_adjoint(X)
        if adj.zorro != (True, True) or adj.star.dim != X.dim:
            bad.append(("zorro", x))
    for (x, X), (y, Y) in itertools.product(B.items(), repeat=2):
        if X.right.alg != Y.left.alg:
            continue
        pairs += 1
        T = fr.rel_tensor(X, Y)
        tr = T.idempotent.trace()
        if tr != T.dim or tr.denominator != 1:
            bad.append(("dim", x, y))
        for z, Z in B.items():
            if Y.right.alg != Z.left.alg:
                continue
            triples += 1
            if not fr.associator(X, Y, Z).verified():
                bad.append(("associator", x, y, z))
    return not bad, f"{pairs} pairs, {triples} triples; failures: {bad or 'none'}"


# 7 ---------------------------------------------------------------------------

def criterion_7():
    bad = []
    for F in (fr.trivial_algebra(), fr.group_algebra(2), fr.matrix_algebra(2)):
        rep = c2.sit_equivalence_so2(F)
        centre = F.alg.center_basis()
        if not (rep.coincide and len(rep.lambda_space) == len(centre)
                and F.alg.is_invertible(rep.lambda_sample) and F.alg.is_invertible(rep.psi_sample)):
            bad.append(F.name)
    rep = c2.sit_equivalence_so2(m2u())
    flag_ok = rep.psi_space == [] and rep.lambda_sample is not None and rep.strict_inner_flag
    if not flag_ok:
        bad.append("M2/u flag")
    return not bad, f"M2/u lambda sample {[str(x) for x in rep.lambda_sample]}; failures: {bad or 'none'}"


# 8 ---------------------------------------------------------------------------

def criterion_8():
    bad = []
    cl1 = fr.clifford_algebra(1)
    if not fr.is_r_spin(cl1, 2, "strict").holds or fr.is_r_spin(cl1, 1, "strict").holds:
        bad.append("Cl1")
    symmetric = [(k, F) for k, F in frobenius_corpus().items() if fr.is_symmetric(F)]
    for name, F in symmetric:
        nu = fr.nakayama_automorphism(F)
        ref = oracles.nakayama(F)
        acc = sp.eye(F.dim)
        for r in range(1, 5):
            acc = acc * ref
            if oracles.to_sympy(nu.power(r).mat) != acc:
                bad.append((name, r, "power"))
            if not (fr.is_r_spin(F, r, "strict").holds and fr.is_r_spin(F, r, "inner").holds):
                bad.append((name, r))
    return not bad, f"{len(symmetric)} symmetric algebras x r<=4; failures: {bad or 'none'}"


# 9 ---------------------------------------------------------------------------

def o2_valid(F, M) -> tuple[bool, object]:
    try:
        c2.check_o2_object(F, fr.AlgebraMap(F.alg, F.alg, M))
        return True, None
    except c2.O2Error as exc:
        return False, exc


def criterion_9():
    M2, Z2 = fr.matrix_algebra(2), fr.group_algebra(2)
    T, I4, I2 = fr.named_map(M2, "transpose").mat, Matrix.identity(4), Matrix.identity(2)
    cases = [(M2, T, True), (Z2, I2, True), (M2, I4, False)]
    bad = []
    for F, M, want in cases:
        ok, exc = o2_valid(F, M)
        if ok != want:
            bad.append((F.name, want))
        if ok != o2_valid(fr.opposite_algebra(F), M)[0]:
            bad.append((F.name, "opposite"))
    _, exc = o2_valid(M2, I4)
    witness_ok = isinstance(exc, c2.NotAntiHomomorphism) and tuple(exc.witness) == ("E12", "E21")
    if not witness_ok:
        bad.append("witness")
    return not bad, f"identity on M2 fails at {tuple(exc.witness)}; failures: {bad or 'none'}"


# 10 --------------------------------------------------------------------------

def criterion_10():
    F = fr.matrix_algebra(2)
    O = c2.check_o2_object(F, fr.named_map(F, "transpose"))
    bad, values = [], {}

    def oriented(S, label):
        v = ss.evaluate_oriented(F, S).value
        ref = oracles.state_sum(F, S.oriented())
        if sp.Rational(str(v)) != ref:
            bad.append((label, "oracle"))
        values[label] = ref
        return ref

    for kind, pair in (("sphere", (ss.sphere(), ss.sphere("tetrahedron"))),
                       ("torus", (ss.torus("fan"), ss.torus("cone")))):
        a = oriented(pair[0], f"{kind} 1")
        b = oriented(pair[1], f"{kind} 2")
        c = oriented(ss.pachner_22(pair[0].oriented()), f"{kind} 2-2")
        d = oriented(ss.pachner_13(pair[0]), f"{kind} 1-3")
        if len({a, b, c, d}) != 1:
            bad.append(kind)
    k = []
    for S in (ss.klein_bottle("fan"), ss.klein_bottle("cone")):
        v = ss.evaluate_unoriented(O, S).value
        ref = oracles.state_sum(F, S, O.theta)
        if sp.Rational(str(v)) != ref:
            bad.append(("klein", "oracle"))
        k.append(ref)
    values["klein"] = k[0]
    if k[0] != k[1]:
        bad.append("klein")
    U = ss.disjoint_union(ss.torus(), ss.sphere())
    u = oracles.state_sum(F, U.oriented())
    if u != values["torus 1"] * values["sphere 1"] or \
            sp.Rational(str(ss.evaluate_oriented(F, U).value)) != u:
        bad.append("disjoint union")
    shown = {k: str(v) for k, v in values.items() if not k.endswith(("2", "2-2", "1-3"))}
    return not bad, f"values {shown}; failures: {bad or 'none'}"


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 11)}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, detail = CRITERIA[number]()
    RESULTS[number] = (ok, detail)
    assert ok, detail


def summary_lines():
    lines = []
    for i in sorted(CRITERIA):
        if i in RESULTS:
            ok, detail = RESULTS[i]
            lines.append(f"[{'PASS' if ok else 'FAIL'}] criterion {i:2d}: {TITLES[i]} -- {detail}")
    return lines


if __name__ == "__main__":
    failed = 0
    for i, fn in CRITERIA.items():
        t = time.perf_counter()
        ok, detail = fn()
        RESULTS[i] = (ok, detail)
        failed += not ok
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {i:2d}: {TITLES[i]} -- {detail} "
              f"({time.perf_counter() - t:.1f}s)")
    sys.exit(1 if failed else 0)
