import pytest
import sympy as sp
from hypothesis import given, strategies as st

from orbicat import completion2 as c2, frobenius as fr, statesum as ss
import oracles

SURFACES = {
    "sphere": ss.sphere,
    "sphere-tet": lambda: ss.sphere("tetrahedron"),
    "torus-fan": ss.torus,
    "torus-cone": lambda: ss.torus("cone"),
    "klein-fan": ss.klein_bottle,
    "klein-cone": lambda: ss.klein_bottle("cone"),
    "rp2-cone": ss.projective_plane,
    "rp2-fan": lambda: ss.projective_plane("fan"),
}
ORIENTABLE = ["sphere", "sphere-tet", "torus-fan", "torus-cone"]
EULER = {"sphere": 2, "sphere-tet": 2, "torus-fan": 0, "torus-cone": 0, "klein-fan": 0,
         "klein-cone": 0, "rp2-cone": 1, "rp2-fan": 1}

ALGEBRAS = {"Q": fr.trivial_algebra, "M2": lambda: fr.matrix_algebra(2), "Z2": lambda: fr.group_algebra(2),
            "Z3": lambda: fr.group_algebra(3), "QxQ": fr.product_algebra}
THETA = {"Q": "identity", "M2": "transpose", "Z2": "identity", "Z3": "identity", "QxQ": "identity"}


def o2(name):
    F = ALGEBRAS[name]()
    return c2.check_o2_object(F, fr.named_map(F, THETA[name]))


def value(x):
    return sp.Rational(str(x.value if isinstance(x, ss.Invariant) else x))


# -- topology -----------------------------------------------------------------

@pytest.mark.parametrize("name", sorted(SURFACES))
def test_euler_characteristic(name):
    S = SURFACES[name]()
    assert S.euler_characteristic() == EULER[name]
    assert S.is_orientable() == (name in ORIENTABLE)


def test_open_surface_rejected():
    with pytest.raises(ss.NotClosed):
        ss.CombSurface.make([("a", "b", "c")], [("a", "b", 1)])


def test_oriented_evaluation_refuses_non_orientable():
    with pytest.raises(ss.NotOrientable):
        ss.evaluate_oriented(fr.matrix_algebra(2), ss.klein_bottle())


@pytest.mark.parametrize("name", sorted(SURFACES))
def test_json_round_trip(name):
    S = SURFACES[name]()
    assert ss.load_surface(S.to_json()) == S


def test_json_sign_strings():
    data = ss.torus().to_json()
    assert {g[2] for g in data["gluings"]} <= {"+1", "-1"}


# -- oriented values against the oracle --------------------------------------

@pytest.mark.parametrize("alg", sorted(ALGEBRAS))
@pytest.mark.parametrize("name", ORIENTABLE)
def test_oriented_matches_oracle(alg, name):
    F, S = ALGEBRAS[alg](), SURFACES[name]()
    got = value(ss.evaluate_oriented(F, S))
    assert got == oracles.state_sum(F, S.oriented())
    assert got == value(ss.brute_force(F, S.oriented()))


@pytest.mark.parametrize("name", ORIENTABLE)
def test_trivial_algebra_gives_one(name):
    assert value(ss.evaluate_oriented(fr.trivial_algebra(), SURFACES[name]())) == 1


@pytest.mark.parametrize("alg", sorted(ALGEBRAS))
def test_two_sphere_triangulations_agree(alg):
    F = ALGEBRAS[alg]()
    assert ss.evaluate_oriented(F, ss.sphere()) == ss.evaluate_oriented(F, ss.sphere("tetrahedron"))
    assert ss.evaluate_oriented(F, ss.torus()) == ss.evaluate_oriented(F, ss.torus("cone"))


def test_disjoint_union_multiplies():
    F = fr.matrix_algebra(2)
    S, T = ss.torus(), ss.sphere("tetrahedron")
    U = ss.disjoint_union(S, T)
    assert U.components() == 2
    assert value(ss.evaluate_oriented(F, U)) == \
        value(ss.evaluate_oriented(F, S)) * value(ss.evaluate_oriented(F, T))


# -- unoriented ---------------------------------------------------------------

@pytest.mark.parametrize("alg", sorted(ALGEBRAS))
@pytest.mark.parametrize("name", sorted(SURFACES))
def test_unoriented_matches_oracle(alg, name):
    O, S = o2(alg), SURFACES[name]()
    assert value(ss.evaluate_unoriented(O, S)) == oracles.state_sum(O.F, S, O.theta)


@pytest.mark.parametrize("alg", ["Q", "Z2", "Z3", "QxQ"])
@pytest.mark.parametrize("name", ORIENTABLE)
def test_commutative_identity_theta_agrees_with_oriented(alg, name):
    O, S = o2(alg), SURFACES[name]()
    assert ss.evaluate_unoriented(O, S) == ss.evaluate_oriented(O.F, S)


def test_klein_triangulations_agree():
    O = o2("M2")
    assert ss.evaluate_unoriented(O, ss.klein_bottle()) == \
        ss.evaluate_unoriented(O, ss.klein_bottle("cone"))


def test_rp2_z2_against_crosscap_oracle():
    O = o2("Z2")
    for S in (ss.projective_plane(), ss.projective_plane("fan")):
        assert value(ss.evaluate_unoriented(O, S)) == oracles.state_sum(O.F, S, O.theta)


@pytest.mark.parametrize("name", sorted(SURFACES))
def test_flipping_a_triangle_is_a_gauge(name):
    O = o2("M2")
    S = SURFACES[name]()
    for t in range(len(S.triangles)):
        assert ss.evaluate_unoriented(O, S.flip(t)) == ss.evaluate_unoriented(O, S)


# -- Pachner moves ------------------------------------------------------------

def test_single_moves_on_sphere_and_torus():
    F = fr.matrix_algebra(2)
    for S in (ss.sphere(), ss.torus()):
        base = ss.evaluate_oriented(F, S)
        S22, S13 = ss.pachner_22(S.oriented()), ss.pachner_13(S)
        assert S22.euler_characteristic() == S13.euler_characteristic() == S.euler_characteristic()
        assert len(S13.triangles) == len(S.triangles) + 2
        assert ss.evaluate_oriented(F, S22) == base
        assert ss.evaluate_oriented(F, S13) == base


def test_non_separable_algebra_is_not_invariant():
    F = fr.matrix_algebra(2, scale=1)
    S = ss.sphere()
    assert ss.evaluate_oriented(F, S) != ss.evaluate_oriented(F, ss.pachner_13(S))


@st.composite
def move_sequences(draw):
    moves = []
    for _ in range(draw(st.integers(1, 3))):
        kind = draw(st.sampled_from(["22", "13"]))
        moves.append((kind, draw(st.integers(0, 100))))
    return moves


def apply_moves(S, moves):
    for kind, k in moves:
        if kind == "13":
            S = ss.pachner_13(S, k % len(S.triangles))
        else:
            idx = S.side_index()
            plus = [i for i, (a, b, s) in enumerate(S.gluings)
                    if s == 1 and idx[a][0] != idx[b][0]]
            S = ss.pachner_22(S, plus[k % len(plus)]) if plus else S
    return S


@given(st.sampled_from(ORIENTABLE), move_sequences(), st.sampled_from(["M2", "Z2", "QxQ"]))
def test_random_moves_preserve_oriented_value(name, moves, alg):
    F = ALGEBRAS[alg]()
    S = SURFACES[name]().oriented()
    T = apply_moves(S, moves)
    assert T.euler_characteristic() == S.euler_characteristic()
    assert ss.evaluate_oriented(F, T) == ss.evaluate_oriented(F, S)


@given(st.sampled_from(sorted(SURFACES)), move_sequences())
def test_random_moves_preserve_unoriented_value(name, moves):
    O = o2("M2")
    S = SURFACES[name]()
    T = apply_moves(S, moves)
    assert ss.evaluate_unoriented(O, T) == ss.evaluate_unoriented(O, S)


@given(st.sampled_from(sorted(SURFACES)), st.randoms(use_true_random=False))
def test_relabelling_sides_changes_nothing(name, rnd):
    O = o2("M2")
    S = SURFACES[name]()
    labels = [s for t in S.triangles for s in t]
    fresh = [f"q{i}" for i in range(len(labels))]
    rnd.shuffle(fresh)
    T = S.relabel(dict(zip(labels, fresh)))
    assert ss.evaluate_unoriented(O, T) == ss.evaluate_unoriented(O, S)
