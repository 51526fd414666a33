import random

import pytest
from gmpy2 import mpq
from hypothesis import assume, given, strategies as st

from hkschubert import lattice as lat
from hkschubert.linalg import det_exact

U3 = lat.lattice_build("U^3")
vec6 = st.lists(st.integers(-4, 4), min_size=6, max_size=6)


def test_build_k3_type_lattices():
    e8 = lat.lattice_build("E8(-1)")
    assert e8.rank == 8 and e8.det() == 1 and e8.is_even()
    k3 = lat.lattice_build("U^3 ⊕ E8(-1)^2")
    assert k3.rank == 22 and abs(k3.det()) == 1
    lam = lat.lattice_build("U^3 + E8(-1)^2 + <-2>")
    assert (lam.rank, lam.det(), lam.is_even()) == (23, 2, True)
    assert lat.lattice_build("[[2,1],[1,2]] + <4>").det() == 12


@pytest.mark.parametrize("bad", ["V", "U^x", "E7(-1)", "[[1,2],[3,4]]"])
def test_build_rejects(bad):
    with pytest.raises(Exception):
        lat.lattice_build(bad)


def test_disc_groups():
    assert lat.disc_and_group([[22, 2], [2, -10]]) == (224, [2, 112])
    assert lat.disc_and_group([[22, 2], [2, -2]]) == (48, [2, 24])
    assert lat.disc_and_group([[22, 0], [0, -2]]) == (44, [2, 22])
    with pytest.raises(lat.LatticeError):
        lat.disc_and_group([[1, 1], [1, 1]])


@given(st.lists(vec6, min_size=1, max_size=2))
def test_complement_discriminants_agree_in_unimodular(rows):
    S = lat.Sublattice.of(U3, rows) if _independent(rows) else None
    assume(S is not None and S.gram and det_exact(S.gram) != 0)
    sat, idx = lat.saturate_and_index(S)
    perp = lat.orthogonal_complement(sat)
    assert perp.rank == 6 - sat.rank
    assert lat.disc_and_group(sat) == lat.disc_and_group(perp)
    for p in perp.rows():
        assert all(U3.pair(p, s) == 0 for s in S.rows())


def _independent(rows):
    from hkschubert.linalg import rank_rational
    return rank_rational(rows) == len(rows)


@given(st.lists(vec6, min_size=1, max_size=3), st.integers(0, 10 ** 6))
def test_saturation_invariant_under_basis_change(rows, seed):
    assume(_independent(rows))
    S = lat.Sublattice.of(U3, rows)
    sat, idx = lat.saturate_and_index(S)
    rng = random.Random(seed)
    rows2 = [list(r) for r in rows]
    for _ in range(6):
        if len(rows2) < 2:
            break
        i, j = rng.sample(range(len(rows2)), 2)
        f = rng.randint(-3, 3)
        rows2[i] = [a + f * b for a, b in zip(rows2[i], rows2[j])]
    sat2, idx2 = lat.saturate_and_index(lat.Sublattice.of(U3, rows2))
    assert idx == idx2
    assert lat.relative_index(sat, sat2) == 1
    assert lat.relative_index(S, sat) == idx


def test_saturation_of_scaled_vector():
    S = lat.Sublattice.of(U3, [[2, 4, 0, 0, 0, 0]])
    sat, idx = lat.saturate_and_index(S)
    assert idx == 2 and sat.rows() == [[1, 2, 0, 0, 0, 0]]


def test_divisibility():
    lam, H, D = lat.d24_fixture()
    assert lat.divisibility(lam, H) == 2 and lat.divisibility(lam, D) == 1
    with pytest.raises(lat.LatticeError):
        lat.divisibility(lam, [0] * 23)


def test_half_sum_glue():
    L = lat.Lattice.from_rows([[22, 2], [2, -10]])
    glued = lat.adjoin_rational_vectors(L.whole(), [[mpq(1, 2), mpq(1, 2)]])
    assert glued.gram.to_rows() == [[4, -4], [-4, -10]]
    assert glued.rows()[0] == [mpq(1, 2), mpq(1, 2)]
    assert glued.lattice().is_even()


def test_glue_rejected_when_pairing_is_fractional():
    with pytest.raises(lat.GlueError):
        lat.adjoin_rational_vectors(lat.Lattice.from_rows([[22]]).whole(), [[mpq(1, 2)]])


@given(st.integers(-6, 6), st.integers(-6, 6), st.integers(-6, 6), st.integers(-30, 30),
       st.sampled_from([2, 3, 4, 5, 7, 8, 9, 25]))
def test_search_hit_forbids_obstruction(a, b, c, t, m):
    form = [[a, b], [b, c]]
    hits = lat.bounded_search(form, t, 6)
    v = lat.nonrepresentability_mod(form, t, m)
    if hits:
        assert not v.obstructed
    if v.obstructed:
        assert hits == []
    else:
        x, y = v.witness
        assert (a * x * x + 2 * b * x * y + c * y * y - t) % m == 0


def test_modular_obstructions():
    assert lat.nonrepresentability_mod([[22, 2], [2, -2]], -10, 25).obstructed
    assert not lat.nonrepresentability_mod([[22, 2], [2, -2]], -10, 5).obstructed
    assert lat.nonrepresentability_mod([[4, -4], [-4, -10]], 28, 49).obstructed
    assert lat.nonrepresentability_mod([[1, 0], [0, 1]], 3, 4).label == "obstructed"


def test_kernel_mod_pairing_index():
    uu = lat.lattice_build("U^2")
    _, idx = lat.kernel_mod_pairing(uu, [mpq(1, 2), 0, 0, 0], 1)
    assert idx == 2
    _, idx = lat.kernel_mod_pairing(uu, [1, 2, 1, 1], 3)
    assert idx == 3
    S, idx = lat.kernel_mod_pairing(uu, [0, 0, 0, 0], 1)
    assert idx == 1 and S.rank == 4


def test_mukai_pairing():
    k3 = lat.lattice_build("U^2")
    a = lat.MukaiVector.make(0, [0] * 4, 1, k3)
    b = lat.MukaiVector.make(1, [0] * 4, 0, k3)
    assert lat.mukai_pairing(a, b) == -1
    h = lat.MukaiVector.make(0, [1, 3, 0, 0], 0, k3)
    assert lat.mukai_pairing(h, h) == 6


@given(st.tuples(*[st.integers(-3, 3)] * 6), st.tuples(*[st.integers(-3, 3)] * 6))
def test_mukai_pairing_symmetric(x, y):
    k3 = lat.lattice_build("U^2")
    a = lat.MukaiVector.make(x[0], x[1:5], x[5], k3)
    b = lat.MukaiVector.make(y[0], y[1:5], y[5], k3)
    assert lat.mukai_pairing(a, b) == lat.mukai_pairing(b, a)


@pytest.mark.parametrize("A", [(1, 2, 1, 1), (2, 1, 1, 1), (3, 2, 1, 1), (1, 4, 3, 1), (2, 3, 1, 1)])
def test_bfield_normal_forms(A):
    B = lat.bfield_normalize((1, 3, 0, 0), A)
    uu = lat.lattice_build("U^2")
    assert uu.pair(B, B) == mpq(1, 2) == uu.pair(B, (1, 3, 0, 0))
    assert lat.glue_in_kernel((1, 3, 0, 0), B, A)


@pytest.mark.parametrize("A", [(1, 1, 1, 1), (0, 0, 0, 0), (1, 2, 0, 1)])
def test_bfield_rejects_bad_input(A):
    with pytest.raises(lat.LatticeError):
        lat.bfield_normalize((1, 3, 0, 0), A)


def test_twisted_index_on_full_k3_lattice():
    k3 = lat.lattice_build("U^3 + E8(-1)^2")
    B = lat.bfield_normalize((1, 3, 0, 0), (1, 2, 1, 1))
    fx = lat.EmbeddingFixture((1, 3, 0, 0), tuple(B), k3)
    idx, w = lat.twisted_embedding_index(fx)
    assert idx == 24
    assert (w.r, w.s, any(w.c)) == (24, 0, False)


def test_twisted_index_needs_nonzero_b():
    with pytest.raises(lat.LatticeError):
        lat.twisted_embedding_index(lat.EmbeddingFixture((1, 3, 0, 0), (0, 0, 0, 0)))
