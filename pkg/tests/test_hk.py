from itertools import permutations

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from hkschubert import hk

coef = st.integers(-5, 5)
vec3 = st.tuples(coef, coef, coef)
G3 = hk.HKGram.make(("H", "lam", "mu"), [[22, 2, 2], [2, -10, 2], [2, 2, -10]])


@given(vec3, vec3, vec3, vec3)
def test_fujiki_symmetric_and_multilinear(a, b, c, d):
    base = hk.fujiki_quartic(G3, a, b, c, d)
    for p in permutations((a, b, c, d)):
        assert hk.fujiki_quartic(G3, *p) == base
    two_a = tuple(2 * x for x in a)
    assert hk.fujiki_quartic(G3, two_a, b, c, d) == 2 * base


@given(vec3)
def test_fujiki_fourth_power(x):
    assert hk.fujiki_quartic(G3, x, x, x, x) == 3 * G3.pair(x, x) ** 2


@given(st.integers(1, 12), st.integers(-8, 8), st.integers(-12, 12))
def test_gram_roundtrip(a, b, c):
    g = hk.HKGram.make(("H", "D"), [[2 * a, b], [b, c]])
    H, D = g.basis("H"), g.basis("D")
    data = {"H4": hk.fujiki_quartic(g, H, H, H, H), "H3D": hk.fujiki_quartic(g, H, H, H, D),
            "H2D2": hk.fujiki_quartic(g, H, H, D, D), "HD3": hk.fujiki_quartic(g, H, D, D, D),
            "D4": hk.fujiki_quartic(g, D, D, D, D)}
    assert hk.gram_from_degree4(data).q == g.q


def test_gram_from_divisor_numbers():
    g = hk.gram_from_degree4({"H4": 1452, "H3D": 132, "H2D2": -36, "HD3": -12, "D4": 12})
    assert [[int(x) for x in r] for r in g.q] == [[22, 2], [2, -2]]


def test_gram_inconsistent_data():
    with pytest.raises(hk.HKError):
        hk.gram_from_degree4({"H4": 1452, "H3D": 132, "H2D2": -36, "HD3": -12, "D4": 13})
    with pytest.raises(hk.HKError):
        hk.gram_from_degree4({"H4": 5, "H3D": 0, "H2D2": 0, "HD3": 0, "D4": 0})
    with pytest.raises(hk.BranchError):
        hk.gram_from_degree4({"H4": 0, "H3D": 0, "H2D2": 0, "HD3": 0, "D4": 0})


def test_plane_class_numbers():
    lam, mu = G3.basis("lam"), G3.basis("mu")
    P = hk.plane_class(lam)
    assert hk.hk4_eval(G3, P * P) == 3
    assert hk.hk4_eval(G3, hk.qv() * hk.divisor_product(lam, lam)) == -250
    assert hk.hk4_eval(G3, hk.qv() * hk.qv()) == 575


def test_disjoint_planes():
    assert hk.disjoint_planes_solve() == frozenset({mpq(2), mpq(-2)})
    # coincident planes: [P]·[P] = 3 forces q(λ, λ')² = 100
    assert hk.disjoint_planes_solve(target=3) == frozenset({mpq(10), mpq(-10)})
    assert hk.disjoint_planes_solve(target=1) == frozenset({mpq(6), mpq(-6)})
    assert hk.disjoint_planes_solve(target=2) == frozenset()   # 68 is not a square


@given(st.sampled_from([-2, 2]))
def test_disjoint_solution_consistent_with_evaluator(q):
    g = hk.HKGram.make(("lam", "mu"), [[-10, q], [q, -10]])
    P, P2 = hk.plane_class(g.basis("lam")), hk.plane_class(g.basis("mu"))
    assert hk.hk4_eval(g, P * P2) == 0


def test_case1_constants():
    r = hk.dv28_constants(hk.Case.CASE1, mpq(5, 11))
    assert r.values == {"q_ll'": 2, "c": mpq(1, 22), "z_sq": 3, "x0_sq": mpq(28, 11)}
    assert r.rejected[-2] == {"c": mpq(-5, 132), "z_sq": mpq(-5, 3)}


def test_case2_constants():
    r = hk.dv28_constants(hk.Case.CASE2, mpq(27, 11))
    assert (r.values["c"], r.values["zh_sq"], r.values["x1_coeff"]) == (mpq(1, 22), 5, mpq(3, 11))
    m = hk.h3_pi_z_matrix(r)
    assert [[int(x) for x in row] for row in m] == [[15, 7, 6], [7, 4, 3], [6, 3, 5]]
    with pytest.raises(hk.BranchError):
        hk.dv28_constants(hk.Case.CASE2, mpq(5, 11))


def test_x0_square_matches_norm():
    g = hk.HKGram.make(("H", "lam"), [[22, 2], [2, -10]])
    w = g.vec(H=1, lam=-11)
    assert mpq(1, 22) ** 2 * g.pair(w, w) == mpq(-28, 11)


def test_rational_sqrt():
    assert hk.rational_sqrt(mpq(9, 4)) == mpq(3, 2)
    assert hk.rational_sqrt(2) is None and hk.rational_sqrt(-1) is None


def test_gram_validation():
    with pytest.raises(hk.HKError):
        hk.HKGram.make(("a", "b"), [[1, 2], [3, 4]])
    with pytest.raises(hk.HKError):
        G3.vec(nope=1)
