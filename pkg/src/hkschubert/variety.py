"""Towers of flag bundles over the point, cut by zero loci of sections.

A multi-step flag bundle Flag(r_1, ..., r_s; E) is built as the iterated
Grassmannian bundle Gr(r_1, E), Gr(r_2, Q_1), ...; its ring generators are
the Chern classes of the first s-1 subquotients and the last one is
c(E)/Π c(others).  Zero loci keep the ambient ring; integrals and
equalities are taken after multiplying by the top Chern classes of the
section bundles.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, factorial
from typing import Sequence

from gmpy2 import mpq

from .chern import (Atom, BundleExpr, ChernData, Diff, Dual, Sum, Tensor, Trivial,
                    bundle_chern, segre_inverse, split_degrees)
from .linalg import IntMatrix
from .ring import POINT_RING, RingClass, RingError, TowerRing

__all__ = [
    "Variety", "point", "make_flag_bundle", "projective_space", "grassmannian",
    "make_zero_locus", "tangent_bundle", "integral", "schubert_cycle", "class_equal",
    "euler_characteristic", "invariant_divisor_degree", "schubert_gram", "RankMismatchError",
]


class RankMismatchError(ValueError):
    pass


_counter = itertools.count()


@dataclass(eq=False)
class Variety:
    kind: str                     # "point" | "flag" | "zero"
    dim: int
    ring: object
    base: "Variety | None" = None
    carrier: BundleExpr | None = None
    ranks: tuple = ()
    section: BundleExpr | None = None
    name: str = ""
    pieces: tuple = ()            # Atom per subquotient (flag bundles)
    factors: tuple = ()           # c_top of section bundles, in self.ring
    _local: dict = field(default_factory=dict)
    _cache: dict = field(default_factory=dict)

    def bundles(self) -> tuple:
        if self.kind != "flag":
            raise ValueError("only flag bundles carry tautological pieces")
        return self.pieces

    def chern_data(self, name: str) -> ChernData:
        """Resolve an atom name anywhere below this variety, pulled back here."""
        got = self._cache.get(name)
        if got is not None:
            return got
        if name in self._local:
            cd = self._local[name]
        elif self.base is not None:
            low = self.base.chern_data(name)
            cd = ChernData(low.rank, tuple(self.ring.lift(x) for x in low.total)) \
                if low.ring is not self.ring else low
        else:
            raise KeyError(name)
        self._cache[name] = cd
        return cd

    def chern(self, expr: BundleExpr) -> ChernData:
        return bundle_chern(expr, self.chern_data, self.ring)

    def c(self, i: int, expr: BundleExpr) -> RingClass:
        return self.chern(expr).c(i)

    def lift(self, x: RingClass) -> RingClass:
        return self.ring.lift(x)

    def __repr__(self):
        return f"Variety({self.kind}, dim={self.dim}, name={self.name!r})"


def point() -> Variety:
    return Variety("point", 0, POINT_RING, name="pt")


def make_flag_bundle(base: Variety, carrier: BundleExpr | int, ranks: Sequence[int],
                     name: str | None = None) -> Variety:
    """Flag bundle of subquotients of the given ranks in ``carrier``."""
    if isinstance(carrier, int):
        carrier = Trivial(carrier)
    ranks = tuple(int(r) for r in ranks)
    if not ranks or any(r < 0 for r in ranks):
        raise RankMismatchError("ranks must be a nonempty list of nonnegative integers")
    E = base.chern(carrier)
    if E.rank != sum(ranks):
        raise RankMismatchError(f"carrier rank {E.rank} differs from sum of ranks {sum(ranks)}")
    label = name or f"F{next(_counter)}"
    ring, pieces_c = _build_flag(base.ring, [E.c(i) for i in range(1, E.rank + 1)], ranks, label)
    dim = base.dim + sum(ranks[i] * ranks[j] for i in range(len(ranks)) for j in range(i + 1, len(ranks)))
    atoms = tuple(Atom(f"{label}.{i}") for i in range(len(ranks)))
    v = Variety("flag", dim, ring, base=base, carrier=carrier, ranks=ranks, name=label,
                pieces=atoms, factors=tuple(ring.lift(f) for f in base.factors))
    T = ring.top_degree
    for atom, r, cl in zip(atoms, ranks, pieces_c):
        total = [ring.one()] + [ring.lift(x) for x in cl[:T]]
        total += [ring.zero()] * (T + 1 - len(total))
        v._local[atom.name] = ChernData(r, tuple(total))
    return v


def _build_flag(ring, chern: list[RingClass], ranks: tuple, label: str):
    """Iterated Grassmannian bundles realizing Flag(ranks) of a bundle.

    The split V_i ⊂ E chosen first is the one with the largest Grassmannian,
    so the biggest fiber sits lowest in the tower; the flag inside V_i and
    the flag inside E/V_i are then built on top.  Returns the final ring and
    the Chern classes c_1.. of every subquotient (as classes of some ring in
    the tower; callers lift).
    """
    if len(ranks) == 1:
        return ring, [chern]
    n = sum(ranks)
    partial = [sum(ranks[:i]) for i in range(1, len(ranks))]
    i = max(range(len(partial)), key=lambda t: (comb(n, partial[t]), -t))
    k = partial[i]
    ring = TowerRing(ring, k, n, [ring.lift(x) for x in chern], label=f"{label}{k}")
    sub, quo = ring.sub_chern(), ring.quotient_chern()
    ring, low = _build_flag(ring, sub, ranks[:i + 1], label)
    quo = [ring.lift(x) for x in quo]
    ring, high = _build_flag(ring, quo, ranks[i + 1:], label)
    return ring, low + high


def _conv(a: list[RingClass], b: list[RingClass], d: int) -> RingClass:
    out = a[0].ring.zero()
    for i in range(0, d + 1):
        if i < len(a) and d - i < len(b) and a[i] and b[d - i]:
            out = out + a[i] * b[d - i]
    return out


def projective_space(n: int, base: Variety | None = None, name: str | None = None) -> Variety:
    """P(V_n) as lines in Trivial(n): pieces (O(-1), quotient of rank n-1)."""
    return make_flag_bundle(base or point(), Trivial(n), [1, n - 1], name=name)


def grassmannian(k: int, n: int, base: Variety | None = None, name: str | None = None) -> Variety:
    return make_flag_bundle(base or point(), Trivial(n), [k, n - k], name=name)


def make_zero_locus(ambient: Variety, section: BundleExpr, name: str | None = None) -> Variety:
    """Zero locus of a general section of ``section`` on ``ambient``."""
    cd = ambient.chern(section)
    dim = ambient.dim - cd.rank
    if cd.rank < 0 or dim < 0:
        raise RankMismatchError("negative expected dimension")
    top = cd.top() if cd.rank else ambient.ring.one()
    v = Variety("zero", dim, ambient.ring, base=ambient, section=section,
                name=name or f"Z{next(_counter)}", factors=ambient.factors + (top,))
    return v


def tangent_bundle(v: Variety) -> BundleExpr:
    if v.kind == "point":
        return Trivial(0)
    if v.kind == "zero":
        return Diff(tangent_bundle(v.base), v.section)
    expr = tangent_bundle(v.base)
    p = v.pieces
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            expr = Sum(expr, Tensor(Dual(p[i]), p[j]))
    return expr


def _factor_product(v: Variety) -> RingClass | None:
    prod = None
    for f in v.factors:
        f = v.ring.lift(f)
        prod = f if prod is None else prod * f
    return prod


def integral(v: Variety, a: RingClass):
    """Degree of the dim(v) component of ``a`` (exact rational)."""
    ring = v.ring
    a = ring.lift(a)
    a = a.component(v.dim)
    if not a:
        return mpq(0)
    f = _factor_product(v)
    if f is not None:
        a = (a * f).component(ring.top_degree)
    return ring.integrate_terms(a.terms)


def class_equal(v: Variety, a: RingClass, b: RingClass) -> bool:
    d = v.ring.lift(a) - v.ring.lift(b)
    f = _factor_product(v)
    if f is not None:
        d = d * f
    return d.is_zero()


def euler_characteristic(v: Variety) -> int:
    if v.kind == "zero":
        raise ValueError("Euler characteristic of zero loci is not supported")
    if v.kind == "point":
        return 1
    n = sum(v.ranks)
    m = factorial(n)
    for r in v.ranks:
        m //= factorial(r)
    return m * euler_characteristic(v.base)


def _grassmannian_node(v: Variety) -> Variety:
    while v.kind == "zero":
        v = v.base
    if v.kind != "flag" or len(v.ranks) != 2:
        raise ValueError("Schubert cycles need a Grassmannian-bundle level")
    return v


def schubert_cycle(v: Variety, lam: Sequence[int]) -> RingClass:
    """Giambelli determinant det(c_{λ_i + j - i}(Q_rel)) in the relative quotient."""
    g = _grassmannian_node(v)
    k, m = g.ranks
    lam = [int(x) for x in lam]
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)) or (lam and lam[-1] < 0):
        raise ValueError("not a partition")
    if len(lam) > k and any(lam[k:]) or (lam and lam[0] > m):
        raise ValueError("partition does not fit the k x (n-k) box")
    lam = [x for x in lam if x]
    q = g.chern_data(g.pieces[-1].name)
    n = len(lam)
    mat = [[q.c(lam[i] + j - i) for j in range(n)] for i in range(n)]
    return v.ring.lift(_det(mat, g.ring))


def _det(mat: list[list[RingClass]], ring) -> RingClass:
    n = len(mat)
    if n == 0:
        return ring.one()
    if n == 1:
        return mat[0][0]
    out = ring.zero()
    for j in range(n):
        if not mat[0][j]:
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = mat[0][j] * _det(minor, ring)
        out = out + term if j % 2 == 0 else out - term
    return out


def invariant_divisor_degree(v: Variety, expr: BundleExpr) -> int:
    """∫ of the total Chern class of ``expr`` (top-degree part) over ``v``."""
    cd = v.chern(expr)
    total = cd.c(v.dim)
    val = integral(v, total)
    if val.denominator != 1:
        raise RingError("non-integral degree")
    return int(val)


def schubert_gram(v: Variety, basis: Sequence[Sequence[int]], shift: Sequence[int] = (),
                  other: Sequence[Sequence[int]] | None = None) -> IntMatrix:
    """Matrix of ∫ σ_a·σ_b·σ_shift (rows: basis, columns: other or basis)."""
    other = basis if other is None else other
    sh = schubert_cycle(v, shift)
    rows_c = [schubert_cycle(v, a) * sh for a in basis]
    cols_c = [schubert_cycle(v, b) for b in other]
    for a in basis:
        for b in other:
            if sum(a) + sum(b) + sum(shift) != v.dim:
                raise ValueError("degrees do not add up to the dimension")
    out = []
    for ra in rows_c:
        row = []
        for cb in cols_c:
            val = integral(v, ra * cb)
            if val.denominator != 1:
                raise RingError("non-integral intersection number")
            row.append(int(val))
        out.append(row)
    return IntMatrix.from_rows(out, cols=len(other))
