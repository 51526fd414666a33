"""Torus-localization integrals on partial flag varieties (test oracle).

Independent of the package: fixed points of the torus acting on Fl(r1, r2, ...; n)
are ordered set partitions of {0..n-1}; the tangent space at a fixed point
has weights w_j - w_i for i in an earlier block and j in a later one.  Bundles
are represented by their lists of Chern roots at the fixed point, and
integrals are sums of (top-degree class) / (Euler class of the tangent space).
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

WEIGHTS = (0, 3, 11, 29, 71, 173, 401, 937, 2053, 4567)


def fixed_points(ranks, n=None):
    n = sum(ranks) if n is None else n
    assert sum(ranks) == n

    def rec(remaining, rs):
        if not rs:
            yield ()
            return
        for block in itertools.combinations(remaining, rs[0]):
            rest = [i for i in remaining if i not in block]
            for tail in rec(rest, rs[1:]):
                yield (block,) + tail

    yield from rec(list(range(n)), list(ranks))


def tangent_euler(blocks, w):
    e = 1
    for a, b in itertools.combinations(range(len(blocks)), 2):
        for i in blocks[a]:
            for j in blocks[b]:
                e *= w[j] - w[i]
    return e


def dual(roots):
    return [-x for x in roots]


def ext(k, roots):
    return [sum(c) for c in itertools.combinations(roots, k)]


def tensor(a, b):
    return [x + y for x in a for y in b]


def chern_series(pos, neg=(), upto=None):
    """Coefficients c_0..c_upto of prod(1 + x) / prod(1 + y)."""
    upto = len(pos) if upto is None else upto
    c = [1] + [0] * upto
    for x in pos:
        for d in range(upto, 0, -1):
            c[d] += c[d - 1] * x
    for y in neg:
        # divide by (1 + y): c_d -= y c_{d-1}
        for d in range(1, upto + 1):
            c[d] -= c[d - 1] * y
    return c


def integrate(ranks, integrand, w=WEIGHTS):
    """Σ integrand(blocks of weights) / e(T) over the fixed points."""
    n = sum(ranks)
    w = w[:n]
    tot = Fraction(0)
    for blocks in fixed_points(ranks, n):
        roots = [[w[i] for i in b] for b in blocks]
        tot += Fraction(integrand(roots)) / tangent_euler(blocks, w)
    return tot


def flag_dim(ranks):
    return sum(a * b for a, b in itertools.combinations(ranks, 2))


def euler_number(ranks):
    n, out = sum(ranks), 1
    for r in ranks:
        out *= comb(n, r)
        n -= r
    return out
