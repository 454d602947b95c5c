import itertools

import pytest
from hypothesis import given, strategies as st

from orbicat import cat1
from orbicat.cat1 import Arrow
from orbicat.exactnum import GaussQ, Matrix

FINITE = sorted(cat1.FINITE_FIXTURES)


def finite(name):
    return cat1.FINITE_FIXTURES[name]()


def fixed_points_by_hand(C, v):
    """theta: a -> d a invertible with eta_a . d(theta)^-1 . theta = id_a."""
    out = []
    for a in C.objects():
        for t in C.hom(a, v.d_obj(a)):
            tinv, dtinv = C.inverse(t), C.inverse(v.d_mor(t))
            if tinv is None or dtinv is None:
                continue
            if C.compose(v.eta(a), C.compose(dtinv, t)) == C.identity(a):
                out.append((a, t))
    return out


# -- volutions and daggers -----------------------------------------------

def test_mat_transpose_is_volution():
    M = cat1.MatCategory("Q", 3)
    assert cat1.check_o1_volution(M, cat1.transpose_volution(M)).valid


def test_mat_conjugate_transpose_is_volution():
    M = cat1.MatCategory("Qi", 2)
    assert cat1.check_o1_volution(M, cat1.conjugate_transpose_volution(M)).valid
    assert cat1.check_dagger(M, cat1.conjugate_transpose_dagger(M)).valid


def test_identity_map_on_noncommutative_monoid_is_not_contravariant():
    C, v = cat1.noncommutative_identity_volution()
    rep = cat1.check_o1_volution(C, v)
    assert not rep.valid
    assert rep.failures[0].axiom == "contravariance"
    assert rep.failures[0].witness


@pytest.mark.parametrize("name", FINITE)
def test_finite_fixtures_are_daggers(name):
    C, d = finite(name)
    assert C.check_axioms() == []
    assert cat1.check_dagger(C, d).valid


def test_twisted_s3_is_volution_but_not_dagger():
    C, v = cat1.fixture_s3_twisted()
    assert cat1.check_o1_volution(C, v).valid
    assert not cat1.volution_is_strict_dagger(C, v)
    f = C.arrow("102")
    assert v.d_mor(v.d_mor(f)) != f


def test_t_o1_keeps_category_and_trivial_eta():
    C, d = finite("point")
    C2, v = cat1.t_o1(C, d)
    assert C2 is C
    assert v.eta("*") == C.identity("*")


def test_t_o1_rejects_non_dagger():
    C, v = cat1.noncommutative_identity_volution()
    with pytest.raises(cat1.InvalidDagger):
        cat1.t_o1(C, cat1.DaggerStructure(C, v.d_mor))


# -- strictification ---------------------------------------------------

def test_s_o1_z2_has_exactly_two_objects():
    C, d = finite("z2")
    _, v = cat1.t_o1(C, d)
    S, dS = cat1.s_o1(C, v)
    assert sorted(t.value for _, t in S.objects()) == ["1", "s"]
    assert cat1.check_dagger(S, dS).valid


@pytest.mark.parametrize("name", FINITE)
def test_s_o1_objects_match_enumeration(name):
    C, d = finite(name)
    _, v = cat1.t_o1(C, d)
    S, dS = cat1.s_o1(C, v)
    assert S.objects() == fixed_points_by_hand(C, v)
    assert cat1.check_dagger(S, dS).valid


def test_s_o1_twisted_s3():
    C, v = cat1.fixture_s3_twisted()
    S, dS = cat1.s_o1(C, v)
    assert S.objects() == fixed_points_by_hand(C, v)
    assert len(S.objects()) == 4
    assert cat1.check_dagger(S, dS).valid


@pytest.mark.parametrize("name", FINITE)
def test_s_o1_t_o1_contains_identity_fixed_points(name):
    C, d = finite(name)
    _, v = cat1.t_o1(C, d)
    S, dS = cat1.s_o1(C, v)
    for a in C.objects():
        x = (a, C.identity(a))
        assert x in S.objects()
        for b in C.objects():
            y = (b, C.identity(b))
            for f in C.hom(a, b):
                assert dS(Arrow(x, y, f)).value == d(f)


def test_herm_objects_are_hermitian_forms():
    H, dH = cat1.herm_category(max_dim=2)
    for n, theta in H.objects():
        T = cat1.base_matrix(theta)
        assert T == T.H and T.is_invertible()


hermitian_entries = st.tuples(st.integers(-3, 3), st.integers(-3, 3))


@st.composite
def hermitian_forms(draw):
    a, d = draw(st.integers(-3, 3)), draw(st.integers(-3, 3))
    re, im = draw(hermitian_entries)
    T = Matrix([[a, GaussQ(re, im)], [GaussQ(re, -im), d]], "Qi")
    return T


@st.composite
def qi_matrices(draw):
    return Matrix([[GaussQ(draw(st.integers(-2, 2)), draw(st.integers(-2, 2))) for _ in range(2)]
                   for _ in range(2)], "Qi")


@given(hermitian_forms(), hermitian_forms(), qi_matrices(), qi_matrices())
def test_form_adjoint_is_a_dagger(ta, tb, f, g):
    if not ta.is_invertible() or not tb.is_invertible():
        return
    M = cat1.MatCategory("Qi", 2)
    v = cat1.conjugate_transpose_volution(M)
    A, B = Arrow(2, 2, ta), Arrow(2, 2, tb)
    S, dS = cat1.s_o1(M, v, extra_thetas=[A, B], sample_limit=0)
    x, y = (2, A), (2, B)
    F, G = S.wrap(x, y, f), S.wrap(y, x, g)
    assert dS(dS(F)) == F
    assert dS(S.compose(G, F)) == S.compose(dS(F), dS(G))
    # form adjoint: <f u, w>_b = <u, f+ w>_a
    assert tb @ f == (ta @ cat1.base_matrix(dS(F))).H


# -- idempotent completion and Karoubi envelopes ---------------------------

def test_ide_of_one_idempotent():
    C, _ = finite("idempotent")
    I = cat1.idempotent_completion(C)
    assert [e.value for _, e in I.objects()] == ["1", "e"]
    x = ("*", C.arrow("e"))
    assert [f.value.value for f in I.hom(x, x)] == ["e"]
    assert I.identity(x).value == C.arrow("e")


def test_i_o1_eta_is_e():
    C, d = finite("idempotent")
    _, v = cat1.t_o1(C, d)
    I = cat1.idempotent_completion(C)
    vI = cat1.i_o1(I, v)
    for x in I.objects():
        assert vI.d_obj(x) == x
        assert vI.eta(x).value == x[1]
    assert cat1.check_o1_volution(I, vI).valid


def test_mat_i_o1_transposes_idempotents():
    M = cat1.MatCategory("Q", 2)
    I = cat1.idempotent_completion(M)
    vI = cat1.i_o1(I, cat1.transpose_volution(M))
    for n, e in I.objects():
        assert vI.d_obj((n, e))[1].value == e.value.T


@pytest.mark.parametrize("name", FINITE)
def test_i_o1_coherence_exhaustive(name):
    C, d = finite(name)
    _, v = cat1.t_o1(C, d)
    I = cat1.idempotent_completion(C)
    vI = cat1.i_o1(I, v)
    for x in I.objects():
        lhs = vI.d_mor(vI.eta(x))
        assert I.compose(lhs, vI.eta(vI.d_obj(x))) == I.identity(vI.d_obj(x))


def test_karoubi_mat_excludes_non_orthogonal_idempotent():
    M = cat1.MatCategory("Qi", 2)
    d = cat1.conjugate_transpose_dagger(M)
    K, _ = cat1.d_karoubi(M, d)
    good = Arrow(2, 2, Matrix([[1, 0], [0, 0]], "Qi"))
    bad = Arrow(2, 2, Matrix([[1, 1], [0, 0]], "Qi"))
    assert K.has_object((2, good))
    assert not K.has_object((2, bad))
    for _, e in K.objects():
        assert e.value == e.value.H


def test_karoubi_with_identity_dagger_keeps_every_idempotent():
    C, d = finite("two-idempotents")
    K, _ = cat1.d_karoubi(C, d)
    I = cat1.idempotent_completion(C)
    assert K.objects() == I.objects()


def test_rectangular_band_only_diagonal_d_idempotents():
    C, d = finite("rectangular-band")
    K, _ = cat1.d_karoubi(C, d)
    assert sorted(e.value for _, e in K.objects()) == ["1", "r00", "r11"]
    assert len(cat1.idempotent_completion(C).objects()) == 5


@pytest.mark.parametrize("name", FINITE)
def test_psi_embed_every_fixture(name):
    C, d = finite(name)
    w = cat1.psi_embed(C, d)
    assert w["valid"], {k: r.to_json() for k, r in w["reports"].items()}


def test_psi_embed_groupoid_hom_bijections():
    C, d = finite("groupoid")
    w = cat1.psi_embed(C, d)
    K, F = w["source"], w["functor"]
    pairs = [(x, y) for x in K.objects() for y in K.objects() if x[1].value.startswith("1")
             and y[1].value.startswith("1")]
    assert len(pairs) == 4
    for x, y in pairs:
        assert len({F(f) for f in K.hom(x, y)}) == len(K.hom(x, y)) == \
            len(w["target"].hom(F(x), F(y)))


def test_psi_embed_empty():
    C, d = finite("empty")
    w = cat1.psi_embed(C, d)
    assert w["source"].objects() == [] and w["valid"]


def test_psi_embed_projection_in_mat():
    M = cat1.MatCategory("Qi", 2)
    d = cat1.conjugate_transpose_dagger(M)
    e = Arrow(2, 2, cat1.orthogonal_projection(Matrix.column([1, "i"], "Qi")))
    w = cat1.psi_embed(M, d, [e])
    assert w["valid"]
    img = w["functor"]((2, e))
    assert img[0] == (2, e) and img[1].value == e


@pytest.mark.parametrize("name", FINITE)
def test_ide_idempotency(name):
    C, _ = finite(name)
    assert cat1.ide_idempotency_witness(C)["valid"]


def test_mat_is_idempotent_complete():
    M = cat1.MatCategory("Q", 3)
    assert cat1.mat_ide_equivalence(M)["valid"]
    assert cat1.check_idempotents_split(cat1.idempotent_completion(M)).valid


# -- predicates ---------------------------------------------------------

@pytest.mark.parametrize("name", FINITE)
def test_unitary_implies_isometry(name):
    C, d = finite(name)
    for f in C.morphisms():
        if cat1.is_unitary(C, d, f):
            assert cat1.is_isometry(C, d, f)
        if cat1.is_isometry(C, d, f):
            assert C.compose(d(f), f) == C.identity(f.dom)


def test_positive_finite_exhaustive():
    C, d = finite("z2")
    ok, g = cat1.is_positive(C, d, C.arrow("1"))
    assert ok and C.compose(d(g), g) == C.arrow("1")
    assert cat1.is_positive(C, d, C.arrow("s")) == (False, None)


def test_positive_identity_matrix():
    M = cat1.MatCategory("Q", 2)
    d = cat1.transpose_dagger(M)
    ok, g = cat1.is_positive(M, d, M.identity(2))
    assert ok
    ok, _ = cat1.is_positive(M, d, Arrow(2, 2, Matrix.diag([1, -1])))
    assert ok is False or ok is None


def test_congruence_diagonalize():
    H = Matrix([[2, "i"], ["-i", 1]], "Qi")
    S, D = cat1.congruence_diagonalize(H)
    assert S.H @ H @ S == D
    assert all(D[i, j] == 0 for i in range(2) for j in range(2) if i != j)


# -- json ---------------------------------------------------------------

@pytest.mark.parametrize("name", FINITE)
def test_finite_json_round_trip(name):
    C, d = finite(name)
    data = cat1.finite_to_json(C, d)
    C2, v2 = cat1.load_finite(data)
    assert cat1.finite_to_json(C2, v2) == data


def test_load_finite_rejects_incomplete_volution():
    C, d = finite("z2")
    data = cat1.finite_to_json(C, d)
    del data["volution"]["d_mor"]["s"]
    with pytest.raises(ValueError):
        cat1.load_finite(data)
