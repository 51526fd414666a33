import random

import pytest
import sympy
from gmpy2 import mpq
from hypothesis import given, strategies as st

from hkschubert.linalg import (IntMatrix, det_exact, hermite_kernel, rank_rational,
                               smith_normal_form, solve_rational)

small = st.integers(-6, 6)


def matrices(n_min=1, n_max=5, square=True):
    return st.integers(n_min, n_max).flatmap(
        lambda n: st.lists(st.lists(small, min_size=n, max_size=n), min_size=n, max_size=n))


def random_unimodular(n, rng, steps=12):
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            continue
        f = rng.randint(-3, 3)
        m[i] = [a + f * b for a, b in zip(m[i], m[j])]
    return m


@given(matrices())
def test_det_matches_sympy(rows):
    assert det_exact(rows) == sympy.Matrix(rows).det()


@given(matrices())
def test_snf_transforms(rows):
    d, U, V = smith_normal_form(rows)
    n = len(rows)
    m = IntMatrix.from_rows(rows)
    prod = (U @ m @ V).to_rows()
    diag = [[d[i] if i == j else 0 for j in range(n)] for i in range(n)]
    assert prod == diag
    assert abs(det_exact(U)) == 1 and abs(det_exact(V)) == 1
    nz = [x for x in d if x]
    assert all(b % a == 0 for a, b in zip(nz, nz[1:]))


@given(matrices(2, 4), st.integers(0, 10 ** 6))
def test_snf_invariant_under_unimodular_change(rows, seed):
    rng = random.Random(seed)
    n = len(rows)
    a, b = random_unimodular(n, rng), random_unimodular(n, rng)
    changed = (IntMatrix.from_rows(a) @ IntMatrix.from_rows(rows) @ IntMatrix.from_rows(b)).to_rows()
    assert smith_normal_form(changed)[0] == smith_normal_form(rows)[0]
    assert abs(det_exact(changed)) == abs(det_exact(rows))


@given(st.lists(st.lists(small, min_size=4, max_size=4), min_size=1, max_size=3))
def test_hermite_kernel_is_left_kernel(rows):
    k = hermite_kernel(rows)
    m = IntMatrix.from_rows(rows)
    for r in k.to_rows():
        assert all(sum(r[i] * rows[i][j] for i in range(len(rows))) == 0 for j in range(4))
    assert k.rows == len(rows) - rank_rational(rows)


def test_solve_rational_exact():
    x = solve_rational([[2, 1], [1, 3]], [1, 0])
    assert x == [mpq(3, 5), mpq(-1, 5)]


def test_solve_singular_inconsistent():
    assert solve_rational([[1, 1], [1, 1]], [1, 2]) is None


def test_det_rejects_nonsquare():
    with pytest.raises(Exception):
        det_exact([[1, 2, 3], [4, 5, 6]])
