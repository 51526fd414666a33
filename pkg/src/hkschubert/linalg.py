"""Exact rational numbers and integer/rational matrix algorithms.

Rationals are ``gmpy2.mpq`` values: always reduced, positive denominator,
and considerably faster than ``fractions.Fraction`` in the inner loops of
the Chow ring code.  Matrices are small immutable row-major values.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from gmpy2 import mpq

__all__ = [
    "BigRational", "Q", "IntMatrix", "RatMatrix", "DimensionError",
    "rref_rational", "det_exact", "smith_normal_form", "hermite_kernel",
    "rank_rational", "solve_rational",
]

BigRational = type(mpq(0))


def Q(x, den: int = 1) -> BigRational:
    """Coerce an int, Fraction, mpq or 'a/b' string to an exact rational."""
    if isinstance(x, str):
        return mpq(x)
    if den != 1:
        return mpq(x, den)
    return mpq(x)


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError("entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        rows = [list(r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), ncols, tuple(int(x) for r in rows for x in r))

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([[self[i, j] for i in range(self.rows)] for j in range(self.cols)],
                                   cols=self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionError("shape mismatch in product")
        b = other.to_rows()
        out = []
        for i in range(self.rows):
            a = self.row(i)
            out.append([sum(a[k] * b[k][j] for k in range(self.cols)) for j in range(other.cols)])
        return IntMatrix.from_rows(out, cols=other.cols)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and all(
            self[i, j] == self[j, i] for i in range(self.rows) for j in range(i))


@dataclass(frozen=True)
class RatMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError("entry count does not match shape")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: int | None = None) -> "RatMatrix":
        rows = [list(r) for r in rows]
        ncols = cols if cols is not None else (len(rows[0]) if rows else 0)
        if any(len(r) != ncols for r in rows):
            raise DimensionError("ragged rows")
        return cls(len(rows), ncols, tuple(Q(x) for r in rows for x in r))

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> list[list]:
        return [list(self.row(i)) for i in range(self.rows)]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def transpose(self) -> "RatMatrix":
        return RatMatrix.from_rows([[self[i, j] for i in range(self.rows)] for j in range(self.cols)],
                                   cols=self.rows)

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise DimensionError("shape mismatch in product")
        b = other.to_rows()
        out = []
        for i in range(self.rows):
            a = self.row(i)
            out.append([sum((a[k] * b[k][j] for k in range(self.cols)), mpq(0))
                        for j in range(other.cols)])
        return RatMatrix.from_rows(out, cols=other.cols)


def _as_rows(m) -> list[list]:
    if isinstance(m, (IntMatrix, RatMatrix)):
        return m.to_rows()
    return [list(r) for r in m]


def rref_rational(m) -> tuple[RatMatrix, list[int]]:
    """Reduced row-echelon form over Q and its pivot columns."""
    a = [[Q(x) for x in r] for r in _as_rows(m)]
    nrows = len(a)
    ncols = m.cols if isinstance(m, (IntMatrix, RatMatrix)) else (len(a[0]) if a else 0)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(nrows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == nrows:
            break
    return RatMatrix.from_rows(a, cols=ncols), pivots


def rank_rational(m) -> int:
    return len(rref_rational(m)[1])


def solve_rational(a, b) -> list | None:
    """One solution x of a·x = b (a: list of rows), or None if inconsistent."""
    rows = _as_rows(a)
    n = len(rows[0]) if rows else 0
    aug = [list(r) + [bi] for r, bi in zip(rows, b)]
    red, piv = rref_rational(RatMatrix.from_rows(aug, cols=n + 1))
    if n in piv:
        return None
    x = [mpq(0)] * n
    for i, c in enumerate(piv):
        x[c] = red[i, n]
    return x


def det_exact(m) -> int:
    """Determinant of a square integer matrix by Bareiss elimination."""
    a = [[int(x) for x in r] for r in _as_rows(m)]
    n = len(a)
    if isinstance(m, IntMatrix) and m.rows != m.cols or any(len(r) != n for r in a):
        raise DimensionError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            p = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if p is None:
                return 0
            a[k], a[p] = a[p], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def smith_normal_form(m) -> tuple[list[int], IntMatrix, IntMatrix]:
    """Smith form with transforms: returns d, U, V with U·m·V = diag(d).

    d has length min(rows, cols), entries nonnegative with d[i] | d[i+1].
    """
    a = [[int(x) for x in r] for r in _as_rows(m)]
    nr = m.rows if isinstance(m, IntMatrix) else len(a)
    nc = m.cols if isinstance(m, IntMatrix) else (len(a[0]) if a else 0)
    u, v = _identity(nr), _identity(nc)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, f):  # row dst += f * row src
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + f * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, f):
        for r in a:
            r[dst] += f * r[src]
        for r in v:
            r[dst] += f * r[src]

    t = 0
    while t < min(nr, nc):
        nz = [(abs(a[i][j]), i, j) for i in range(t, nr) for j in range(t, nc) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            done = True
            for i in range(t + 1, nr):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // a[t][t]))
                    if a[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, nc):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // a[t][t]))
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: fold any entry not divisible by the pivot into row t
            bad = next(((i, j) for i in range(t + 1, nr) for j in range(t + 1, nc)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    d = [a[i][i] for i in range(min(nr, nc))]
    return d, IntMatrix.from_rows(u, cols=nr), IntMatrix.from_rows(v, cols=nc)


def hermite_kernel(m) -> IntMatrix:
    """Saturated basis (as rows) of the integer left kernel {x : x·m = 0}."""
    a = _as_rows(m)
    nr = m.rows if isinstance(m, IntMatrix) else len(a)
    nc = m.cols if isinstance(m, IntMatrix) else (len(a[0]) if a else 0)
    if nr == 0:
        return IntMatrix(0, 0, ())
    # U·m·V = D, so x·m = 0 iff (x·U^{-1})·D = 0; rows of U beyond rank span the kernel.
    d, u, _ = smith_normal_form(IntMatrix.from_rows(a, cols=nc))
    r = sum(1 for x in d if x)
    rows = hermite_rows([list(u.row(i)) for i in range(r, nr)])
    return IntMatrix.from_rows(rows, cols=nr) if rows else IntMatrix(0, nr, ())


def hermite_rows(rows: list[list[int]]) -> list[list[int]]:
    """Row Hermite normal form of an integer row basis (zero rows dropped)."""
    a = [list(r) for r in rows]
    if not a:
        return []
    nc = len(a[0])
    out: list[list[int]] = []
    pivcols: list[int] = []
    for c in range(nc):
        live = [r for r in a if r[c]]
        if not live:
            continue
        while len(live) > 1:
            live.sort(key=lambda r: abs(r[c]))
            p = live[0]
            for r in live[1:]:
                q = r[c] // p[c]
                r[:] = [x - q * y for x, y in zip(r, p)]
            live = [r for r in live if r[c]]
        p = live[0]
        if p[c] < 0:
            p[:] = [-x for x in p]
        a = [r for r in a if r is not p and any(r)]
        out.append(p)
        pivcols.append(c)
    # reduce entries above each pivot into [0, pivot)
    for i, c in enumerate(pivcols):
        for k in range(i):
            q = out[k][c] // out[i][c]
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return out


def int_vec_gcd(v: Iterable[int]) -> int:
    from math import gcd
    g = 0
    for x in v:
        g = gcd(g, int(x))
    return g
