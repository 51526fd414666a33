import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from hkschubert import trivector as tv

F7, F101 = tv.GF(7), tv.GF(101)
vec10 = st.lists(st.integers(-3, 3), min_size=10, max_size=10)


@st.composite
def trivectors(draw, F=tv.QQ):
    triples = draw(st.lists(st.sampled_from(list(itertools.combinations(range(10), 3))),
                            min_size=1, max_size=8, unique=True))
    return tv.Trivector.make({t: draw(st.integers(-3, 3)) for t in triples}, F)


@given(trivectors(), vec10, vec10, vec10)
def test_alternating(s, u, v, w):
    x = s.eval(u, v, w)
    assert s.eval(v, u, w) == -x == s.eval(u, w, v)
    assert s.eval(u, u, w) == 0


@given(trivectors(), vec10)
def test_contraction_skew_and_consistent(s, v):
    m = tv.contract_matrix(s, v)
    e = lambda i: [int(i == j) for j in range(10)]
    for j in range(10):
        for k in range(10):
            assert m[j][k] == -m[k][j] == s.eval(v, e(j), e(k))


@given(trivectors(), vec10)
def test_rank_over_fp_at_most_rank_over_q(s, v):
    if not any(v):
        return
    rq = tv.contract_rank_kernel(s, v)[0]
    sp = s.reduce(F101)
    if not any(x % 101 for x in v):
        return
    rp = tv.contract_rank_kernel(sp, v)[0]
    assert rp <= rq and rq % 2 == 0 and rp % 2 == 0


@given(trivectors(), vec10)
def test_kernel_annihilated(s, v):
    if not any(v):
        return
    r, ker = tv.contract_rank_kernel(s, v)
    assert r + ker.dim == 10
    e = lambda i: [int(i == j) for j in range(10)]
    for k in ker.basis:
        assert all(s.eval(v, k, e(j)) == 0 for j in range(10))


def test_parse_sign_conventions():
    assert tv.parse_trivector("[021]").coefficient(0, 1, 2) == -1
    assert tv.parse_trivector("−[237]").coefficient(2, 3, 7) == -1
    s = tv.parse_trivector("[056]+[037]-[237]+2[047]")
    assert tv.parse_trivector(str(s)).coeffs == s.coeffs


@pytest.mark.parametrize("bad", ["[001]", "[01]", "[012][345]", "x[012]", "[01a]"])
def test_parse_rejects(bad):
    with pytest.raises(tv.TrivectorError):
        tv.parse_trivector(bad)


def test_support_rank():
    assert tv.support_rank(tv.parse_trivector("[012]+[345]")) == 6
    assert tv.support_rank(tv.parse_trivector("[012]+[034]")) == 5
    assert tv.support_rank(tv.parse_trivector("[012]")) == 3
    assert tv.support_rank(tv.parse_trivector("0")) == 0


def test_contraction_ranks():
    s = tv.parse_trivector("[012]")
    assert tv.contract_rank_kernel(s, [1] + [0] * 9)[0] == 2
    g = tv.random_trivector(tv.GF(10007), random.Random(1))
    assert tv.contract_rank_kernel(g, [1, 2, 3, 4, 5, 6, 7, 8, 9, 10])[0] == 8
    with pytest.raises(tv.TrivectorError):
        tv.contract_rank_kernel(g, [0] * 10)


def test_locus_membership():
    s = tv.parse_trivector("[012]+[345]+[678]+[129]")
    V3 = tv.Subspace.coordinate([0, 3, 6])
    assert tv.locus_membership(s, V3).member
    assert not tv.locus_membership(s, tv.Subspace.coordinate([0, 1, 2])).member
    r = tv.locus_membership(s, tv.Subspace.coordinate([9]))
    assert r.locus == "X1" and r.value == 2 and r.member
    with pytest.raises(tv.TrivectorError):
        tv.locus_membership(s, tv.Subspace.coordinate(range(4)))


def test_x7_witness():
    s = tv.parse_trivector("[012]+[034]")
    r = tv.locus_membership(s, tv.Subspace.coordinate(range(7)))
    assert r.member and r.value == 5
    assert r.witness.dim == 2 and r.witness.contains(tv.Subspace.coordinate([5, 6]))


def test_hm_weights():
    w = [3] * 7 + [-7] * 3
    assert tv.hm_weight_max(tv.parse_trivector("[789]+[179]"), w) == -11
    assert tv.hm_weight_max(tv.parse_trivector("0"), w) == float("-inf")
    with pytest.raises(tv.TrivectorError):
        tv.hm_weight_max(tv.parse_trivector("[012]"), [1] * 10)


@pytest.mark.parametrize("case,name", [(1, "planes_case1.tri"), (2, "planes_case2.tri")])
def test_plane_fixtures(case, name):
    fx = tv.bundled_fixture(name)
    assert fx.meta["case"] == case
    r = tv.plane_fixture_check(case, fx.sigma, fx.subspaces or None)
    assert r.ok, r.failures
    assert r.intersection.dim == case - 1


def test_plane_check_detects_failure():
    fx = tv.bundled_fixture("planes_case1.tri")
    broken = fx.sigma + tv.parse_trivector("[156]")
    r = tv.plane_fixture_check(1, broken)
    assert not r.ok and "sigma(V4,V7,V7)=0" in r.failures


def test_fixture_file_errors(tmp_path):
    p = tmp_path / "x.tri"
    p.write_text("V4 = 1 2 3 4\n")
    with pytest.raises(tv.FixtureError):
        tv.load_fixture(p)
    p.write_text("[012] # comment\nV3 = [[1,0,0,0,0,0,0,0,0,0],[0,1,0,0,0,0,0,0,0,0]]\ncase = 2\n")
    fx = tv.load_fixture(p)
    assert fx.subspaces["V3"].dim == 2 and fx.meta == {"case": 2}


@pytest.mark.parametrize("case", [1, 2])
def test_pointwise_rank_exhaustive_f7(case):
    """rank σ(x,−,−) ≤ 6 exactly on the degeneracy hypersurface plus the special components."""
    fx = tv.bundled_fixture(f"planes_case{case}.tri", F7)
    s = fx.sigma
    for x in itertools.product(range(7), repeat=4):
        if not any(x):
            continue
        low = tv.skew_matrix_rank_at_point(case, s, x) <= 6
        expected = tv.on_special_components(case, x, F7) or tv.degeneracy_equation(case, s, x) == 0
        assert low == expected, x


def test_x3_sampling_is_seeded():
    s = tv.random_trivector(tv.GF(10007), random.Random(5))
    assert tv.sample_x3_singular(s, 20, seed=3) == tv.sample_x3_singular(s, 20, seed=3) == 0
    with pytest.raises(tv.TrivectorError):
        tv.sample_x3_singular(tv.parse_trivector("[012]"), 1)
