"""Chern classes, Chern characters and the lambda-ring calculus.

Bundle expressions are evaluated in Chern character space: sums and
differences add, tensor products multiply, the dual flips the sign of odd
components, and exterior/symmetric powers come from the generating series

    log Λ_t(E) = Σ (-1)^(n-1) ψ^n(E) t^n / n,    log S_t(E) = Σ ψ^n(E) t^n / n,

with ψ^n scaling ch_d by n^d.  Total Chern classes are recovered by Newton's
identities at the end.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Mapping, Sequence

from gmpy2 import mpq

from .linalg import Q
from .ring import RingClass, RingError

__all__ = [
    "ChernData", "chern_to_ch", "ch_to_chern", "bundle_chern", "bundle_ch",
    "BundleExpr", "Atom", "Trivial", "Sum", "Diff", "Dual", "Tensor", "Ext", "Sym", "Det",
    "Line", "UnboundAtomError", "total_chern", "segre_inverse",
]


class UnboundAtomError(KeyError):
    pass


@dataclass(frozen=True)
class ChernData:
    rank: int
    total: tuple  # c_0 = 1, c_1, ..., c_T as RingClass

    @property
    def ring(self):
        return self.total[0].ring

    def c(self, i: int) -> RingClass:
        if i < 0:
            return self.ring.zero()
        return self.total[i] if i < len(self.total) else self.ring.zero()

    def top(self) -> RingClass:
        """c_rank (zero if the rank exceeds the truncation)."""
        return self.c(self.rank)

    def total_class(self) -> RingClass:
        out = self.ring.zero()
        for x in self.total:
            out = out + x
        return out

    def __eq__(self, other):
        if not isinstance(other, ChernData):
            return NotImplemented
        n = max(len(self.total), len(other.total))
        return self.rank == other.rank and all(self.c(i) == other.c(i) for i in range(n))

    __hash__ = None


def _trunc(ring) -> int:
    return ring.top_degree


def split_degrees(x: RingClass, T: int) -> list[RingClass]:
    ring = x.ring
    deg = ring.key_degree
    parts = [dict() for _ in range(T + 1)]
    for k, v in x.terms.items():
        d = deg(k)
        if d <= T:
            parts[d][k] = v
    return [RingClass(ring, p) for p in parts]


def _combine(xs: Sequence[RingClass], ring) -> RingClass:
    out: dict = {}
    for x in xs:
        for k, v in x.terms.items():
            out[k] = out.get(k, 0) + v
    return RingClass(ring, out)


def chern_to_ch(c: ChernData) -> list[RingClass]:
    """ch_0..ch_T from Chern classes via Newton's identities."""
    ring = c.ring
    T = _trunc(ring)
    e = [c.c(i) for i in range(T + 1)]
    p: list[RingClass] = [ring.scalar(c.rank)]
    for k in range(1, T + 1):
        acc = e[k] * ((-1) ** (k - 1) * k)
        for i in range(1, k):
            if e[i] and p[k - i]:
                acc = acc + (e[i] * p[k - i]) * ((-1) ** (i - 1))
        p.append(acc)
    return [p[0]] + [p[k] / factorial(k) for k in range(1, T + 1)]


def ch_to_chern(ch: Sequence[RingClass], rank: int) -> ChernData:
    """Inverse of chern_to_ch: k·c_k = Σ_{i=1..k} (-1)^(i-1) p_i c_(k-i), p_i = i!·ch_i."""
    ring = ch[0].ring
    if ch[0] != ring.scalar(rank):
        raise ValueError("ch_0 does not equal the rank")
    T = _trunc(ring)
    ch = list(ch) + [ring.zero()] * (T + 1 - len(ch))
    p = [None] + [ch[i] * factorial(i) for i in range(1, T + 1)]
    c = [ring.one()]
    for k in range(1, T + 1):
        acc = ring.zero()
        for i in range(1, k + 1):
            if p[i] and c[k - i]:
                term = p[i] * c[k - i]
                acc = acc + term if i % 2 else acc - term
        c.append(acc / k)
    return ChernData(rank, tuple(c))


def total_chern(ring, classes: Sequence[RingClass], rank: int) -> ChernData:
    T = _trunc(ring)
    cs = [ring.one()] + [ring.lift(x) if x.ring is not ring else x for x in classes]
    cs = cs[:T + 1] + [ring.zero()] * (T + 1 - len(cs))
    return ChernData(rank, tuple(cs))


def segre_inverse(c: Sequence[RingClass], ring) -> list[RingClass]:
    """Components of 1/c as a truncated series (c[0] must be 1)."""
    T = _trunc(ring)
    s = [ring.one()]
    for j in range(1, T + 1):
        acc = ring.zero()
        for a in range(1, min(j, len(c) - 1) + 1):
            if c[a] and s[j - a]:
                acc = acc - c[a] * s[j - a]
        s.append(acc)
    return s


# ----------------------------------------------------------------- ch algebra


def _ch_mul(a: list[RingClass], b: list[RingClass]) -> list[RingClass]:
    ring = a[0].ring
    T = _trunc(ring)
    return split_degrees(_combine(a, ring) * _combine(b, ring), T)


def _ch_scale(a: list[RingClass], s) -> list[RingClass]:
    return [x * s for x in a]


def _ch_add(a, b):
    return [x + y for x, y in zip(a, b)]


def _adams(a: list[RingClass], n: int) -> list[RingClass]:
    return [x * (n ** d) for d, x in enumerate(a)]


def _power_series(ch: list[RingClass], k: int, alternating: bool) -> list[RingClass]:
    """ch of the k-th exterior (alternating) or symmetric power."""
    ring = ch[0].ring
    T = _trunc(ring)
    lam = [[ring.one()] + [ring.zero()] * T]
    psi = {}
    for j in range(1, k + 1):
        acc = [ring.zero()] * (T + 1)
        for n in range(1, j + 1):
            if n not in psi:
                psi[n] = _adams(ch, n)
            term = _ch_mul(psi[n], lam[j - n])
            sign = -1 if (alternating and n % 2 == 0) else 1
            acc = _ch_add(acc, _ch_scale(term, sign))
        lam.append(_ch_scale(acc, mpq(1, j)))
    return lam[k]


def _exp_ch(x: RingClass, T: int) -> list[RingClass]:
    ring = x.ring
    out = [ring.one()] + [ring.zero()] * T
    if not x:
        return out
    d = x.degrees()
    if d != [1]:
        raise RingError("exponential of a non-degree-1 class")
    p = ring.one()
    for i in range(1, T + 1):
        p = p * x
        if not p:
            break
        out[i] = p / factorial(i)
    return out


# ----------------------------------------------------------------- expressions


class BundleExpr:
    """Symbolic virtual bundle."""

    def __add__(self, other):
        return Sum(self, _coerce(other))

    def __radd__(self, other):
        return Sum(_coerce(other), self)

    def __sub__(self, other):
        return Diff(self, _coerce(other))

    def __rsub__(self, other):
        return Diff(_coerce(other), self)

    def __mul__(self, other):
        return Tensor(self, _coerce(other))

    def __rmul__(self, other):
        return Tensor(_coerce(other), self)

    def dual(self):
        return Dual(self)

    def ext(self, k: int):
        return Ext(k, self)

    def sym(self, k: int):
        return Sym(k, self)

    def det(self):
        return Det(self)


def _coerce(x) -> BundleExpr:
    if isinstance(x, BundleExpr):
        return x
    if isinstance(x, int):
        return Trivial(x)
    raise TypeError(f"cannot treat {x!r} as a bundle")


@dataclass(frozen=True, eq=True)
class Atom(BundleExpr):
    name: str


@dataclass(frozen=True, eq=True)
class Trivial(BundleExpr):
    rank: int


@dataclass(frozen=True, eq=True)
class Line(BundleExpr):
    """Line bundle with first Chern class given by a named class."""
    name: str


@dataclass(frozen=True, eq=True)
class Sum(BundleExpr):
    a: BundleExpr
    b: BundleExpr


@dataclass(frozen=True, eq=True)
class Diff(BundleExpr):
    a: BundleExpr
    b: BundleExpr


@dataclass(frozen=True, eq=True)
class Dual(BundleExpr):
    a: BundleExpr


@dataclass(frozen=True, eq=True)
class Tensor(BundleExpr):
    a: BundleExpr
    b: BundleExpr


@dataclass(frozen=True, eq=True)
class Ext(BundleExpr):
    k: int
    a: BundleExpr


@dataclass(frozen=True, eq=True)
class Sym(BundleExpr):
    k: int
    a: BundleExpr


@dataclass(frozen=True, eq=True)
class Det(BundleExpr):
    a: BundleExpr


Resolver = Callable[[str], ChernData] | Mapping[str, ChernData]


class _Evaluator:
    def __init__(self, ring, env):
        self.ring = ring
        self.env = env
        self.T = _trunc(ring)
        self.memo: dict = {}

    def atom(self, name) -> ChernData:
        try:
            return self.env(name) if callable(self.env) else self.env[name]
        except KeyError as exc:
            raise UnboundAtomError(name) from exc

    def __call__(self, e: BundleExpr) -> tuple[int, list[RingClass]]:
        got = self.memo.get(e)
        if got is None:
            got = self._eval(e)
            self.memo[e] = got
        return got

    def _eval(self, e):
        ring, T = self.ring, self.T
        if isinstance(e, Atom):
            cd = self.atom(e.name)
            return cd.rank, chern_to_ch(cd)
        if isinstance(e, Line):
            x = self.atom(e.name)
            return 1, _exp_ch(x.c(1), T)
        if isinstance(e, Trivial):
            return e.rank, [ring.scalar(e.rank)] + [ring.zero()] * T
        if isinstance(e, Sum):
            (ra, a), (rb, b) = self(e.a), self(e.b)
            return ra + rb, _ch_add(a, b)
        if isinstance(e, Diff):
            (ra, a), (rb, b) = self(e.a), self(e.b)
            return ra - rb, [x - y for x, y in zip(a, b)]
        if isinstance(e, Dual):
            r, a = self(e.a)
            return r, [x if d % 2 == 0 else -x for d, x in enumerate(a)]
        if isinstance(e, Tensor):
            (ra, a), (rb, b) = self(e.a), self(e.b)
            return ra * rb, _ch_mul(a, b)
        if isinstance(e, (Ext, Sym)):
            if e.k < 0:
                raise ValueError("negative exterior/symmetric power")
            r, a = self(e.a)
            alt = isinstance(e, Ext)
            out = _power_series(a, e.k, alt)
            rank = _binom(r, e.k) if alt else _binom(r + e.k - 1, e.k)
            return rank, out
        if isinstance(e, Det):
            r, a = self(e.a)
            return 1, _exp_ch(a[1], T)
        raise TypeError(f"unknown bundle node {e!r}")


def _binom(n: int, k: int) -> int:
    """Generalized binomial coefficient (n may be negative)."""
    num = 1
    for i in range(k):
        num *= n - i
    return num // factorial(k)


def bundle_ch(expr: BundleExpr, env: Resolver, ring) -> tuple[int, list[RingClass]]:
    return _Evaluator(ring, env)(expr)


def bundle_chern(expr: BundleExpr, env: Resolver, ring=None) -> ChernData:
    """Total Chern class of a virtual bundle expression."""
    if ring is None:
        ring = _first_ring(expr, env)
    rank, ch = bundle_ch(expr, env, ring)
    return ch_to_chern(ch, rank)


def _first_ring(expr, env):
    if isinstance(expr, (Atom, Line)):
        cd = env(expr.name) if callable(env) else env[expr.name]
        return cd.ring
    for f in ("a", "b"):
        sub = getattr(expr, f, None)
        if sub is not None:
            try:
                return _first_ring(sub, env)
            except LookupError:
                continue
    raise LookupError("cannot infer the ring from an expression without atoms")
