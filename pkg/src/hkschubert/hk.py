"""Degree-4 intersection numbers on fourfolds of K3^[2]-type.

Quadruple products of divisor classes follow the Fujiki relation
x1·x2·x3·x4 = q12 q34 + q13 q24 + q14 q23 for the BBF form q.  The class
q^∨ (five sixths of c2) enters only through q^∨·x·y = 25 q(x, y) and
q^∨·q^∨ = 575.  Plane classes are [P] = q^∨/20 + λ²/8.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence

import gmpy2
from gmpy2 import mpq

from .linalg import BigRational, DimensionError

__all__ = [
    "HKGram", "Deg2", "HK4Expr", "HKError", "BranchError",
    "fujiki_quartic", "gram_from_degree4", "hk4_eval", "qv", "divisor_product",
    "plane_class", "disjoint_planes_square", "disjoint_planes_solve",
    "Case", "DV28Result", "dv28_constants", "rational_sqrt", "h3_pi_z_matrix",
]

QV_XY = 25
QV_QV = 575


class HKError(ValueError):
    pass


class BranchError(HKError):
    pass


def rational_sqrt(x) -> BigRational | None:
    """Nonnegative rational square root, or None when irrational."""
    x = mpq(x)
    if x < 0:
        return None
    n, d = int(x.numerator), int(x.denominator)
    if not (gmpy2.is_square(n) and gmpy2.is_square(d)):
        return None
    return mpq(int(gmpy2.isqrt(n)), int(gmpy2.isqrt(d)))


@dataclass(frozen=True)
class HKGram:
    names: tuple
    q: tuple

    def __post_init__(self):
        n = len(self.names)
        if len(self.q) != n or any(len(r) != n for r in self.q):
            raise DimensionError("Gram shape does not match the basis")
        if any(self.q[i][j] != self.q[j][i] for i in range(n) for j in range(n)):
            raise HKError("Gram matrix must be symmetric")

    @classmethod
    def make(cls, names: Sequence[str], rows) -> "HKGram":
        return cls(tuple(names), tuple(tuple(mpq(x) for x in r) for r in rows))

    @property
    def dim(self) -> int:
        return len(self.names)

    def vec(self, **coords) -> tuple:
        """Coordinate vector from keyword coefficients, e.g. vec(H=1, lam=-11)."""
        unknown = set(coords) - set(self.names)
        if unknown:
            raise HKError(f"unknown basis names {sorted(unknown)}")
        return tuple(mpq(coords.get(n, 0)) for n in self.names)

    def basis(self, name: str) -> tuple:
        return self.vec(**{name: 1})

    def pair(self, x, y) -> BigRational:
        if len(x) != self.dim or len(y) != self.dim:
            raise DimensionError("coordinate vector of the wrong length")
        return sum((mpq(x[i]) * self.q[i][j] * mpq(y[j])
                    for i in range(self.dim) for j in range(self.dim) if x[i] and y[j]), mpq(0))


def fujiki_quartic(g: HKGram, x1, x2, x3, x4) -> BigRational:
    p = g.pair
    return p(x1, x2) * p(x3, x4) + p(x1, x3) * p(x2, x4) + p(x1, x4) * p(x2, x3)


def gram_from_degree4(data: Mapping[str, int], names=("H", "D")) -> HKGram:
    """BBF Gram of span{H, D} from (H⁴, H³D, H²D², HD³, D⁴).

    Keys: ``H4``, ``H3D``, ``H2D2``, ``HD3``, ``D4``.  q(H,H) is the
    positive root of H⁴ = 3q(H,H)²; the rest follow linearly and all five
    equations are re-checked.
    """
    d = {k: mpq(v) for k, v in data.items()}
    missing = {"H4", "H3D", "H2D2", "HD3", "D4"} - set(d)
    if missing:
        raise HKError(f"missing entries {sorted(missing)}")
    a = rational_sqrt(d["H4"] / 3)
    if a is None:
        raise HKError("H^4/3 is not a rational square: no solution")
    if a == 0:
        raise BranchError("no branch with positive polarization square")
    b = d["H3D"] / (3 * a)
    c = (d["H2D2"] - 2 * b * b) / a
    g = HKGram.make(names, [[a, b], [b, c]])
    H, D = g.basis(names[0]), g.basis(names[1])
    checks = {"H4": (H, H, H, H), "H3D": (H, H, H, D), "H2D2": (H, H, D, D),
              "HD3": (H, D, D, D), "D4": (D, D, D, D)}
    for key, args in checks.items():
        if fujiki_quartic(g, *args) != d[key]:
            raise HKError(f"inconsistent data: {key} does not fit any Gram matrix")
    return g


# --- formal degree-2 and degree-4 expressions -----------------------------

def _key(v) -> tuple:
    return tuple(mpq(x) for x in v)


@dataclass(frozen=True)
class Deg2:
    """Linear combination of q^∨ and products x·y of divisor classes."""
    terms: Mapping = field(default_factory=dict)   # ("qv",) or ("xy", x, y) -> coeff

    def __add__(self, o: "Deg2") -> "Deg2":
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out.get(k, mpq(0)) + v
        return Deg2({k: v for k, v in out.items() if v})

    def __neg__(self) -> "Deg2":
        return self.scale(-1)

    def __sub__(self, o: "Deg2") -> "Deg2":
        return self + (-o)

    def scale(self, c) -> "Deg2":
        c = mpq(c)
        return Deg2({k: c * v for k, v in self.terms.items() if c * v})

    def __rmul__(self, c):
        return self.scale(c)

    def __mul__(self, o):
        if not isinstance(o, Deg2):
            return self.scale(o)
        out: dict = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in o.terms.items():
                if k1 == ("qv",) and k2 == ("qv",):
                    k = ("qq",)
                elif k1 == ("qv",) or k2 == ("qv",):
                    other = k2 if k1 == ("qv",) else k1
                    k = ("qxy", other[1], other[2])
                else:
                    k = ("xxxx", k1[1], k1[2], k2[1], k2[2])
                out[k] = out.get(k, mpq(0)) + c1 * c2
        return HK4Expr({k: v for k, v in out.items() if v})


@dataclass(frozen=True)
class HK4Expr:
    terms: Mapping = field(default_factory=dict)

    def __add__(self, o: "HK4Expr") -> "HK4Expr":
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out.get(k, mpq(0)) + v
        return HK4Expr({k: v for k, v in out.items() if v})

    def scale(self, c) -> "HK4Expr":
        c = mpq(c)
        return HK4Expr({k: c * v for k, v in self.terms.items() if c * v})


def qv() -> Deg2:
    return Deg2({("qv",): mpq(1)})


def divisor_product(x, y) -> Deg2:
    return Deg2({("xy", _key(x), _key(y)): mpq(1)})


def plane_class(lam) -> Deg2:
    """[P] = q^∨/20 + λ²/8 for a plane with associated class λ."""
    return qv().scale(mpq(1, 20)) + divisor_product(lam, lam).scale(mpq(1, 8))


def hk4_eval(g: HKGram, e: HK4Expr) -> BigRational:
    total = mpq(0)
    for k, c in e.terms.items():
        kind = k[0] if k else None
        if kind == "qq" and len(k) == 1:
            total += c * QV_QV
        elif kind == "qxy" and len(k) == 3:
            total += c * QV_XY * g.pair(k[1], k[2])
        elif kind == "xxxx" and len(k) == 5:
            total += c * fujiki_quartic(g, *k[1:])
        else:
            raise HKError(f"malformed monomial {k!r}")
    return total


def disjoint_planes_square(q_ll=-10, q_mm=-10, target=0) -> BigRational:
    """q(λ, λ')² forced by [P]·[P'] = target."""
    g = HKGram.make(("lam", "mu"), [[q_ll, 0], [0, q_mm]])
    lam, mu = g.basis("lam"), g.basis("mu")
    # [P]·[P'] = const + q(λ,λ')²/32: evaluate with q(λ,λ') = 0 for the constant
    const = hk4_eval(g, plane_class(lam) * plane_class(mu))
    return 32 * (mpq(target) - const)


def disjoint_planes_solve(q_ll=-10, q_mm=-10, target=0) -> frozenset:
    """Rational values of q(λ, λ') with [P]·[P'] = target."""
    sq = disjoint_planes_square(q_ll, q_mm, target)
    r = rational_sqrt(sq)
    if r is None:
        return frozenset()
    return frozenset({r, -r})


# --- correspondence constants --------------------------------------------

class Case(Enum):
    CASE1 = 1
    CASE2 = 2


@dataclass(frozen=True)
class DV28Result:
    case: Case
    values: dict
    rejected: dict
    notes: tuple = ()


Q_LL = -10   # square of the class attached to a plane


def _l_pair(q_value) -> BigRational:
    # l·(H − 11λ') = 1 − (11/2) q(λ, λ')
    return 1 - mpq(11, 2) * mpq(q_value)


def dv28_constants(case: Case, z1_sq) -> DV28Result:
    """Constants of the correspondence between the two fourfolds.

    CASE1 takes the square 5/11 of the Schubert part of a Σ443 class and
    picks q(λ, λ') from {±2} by integrality of z² = x0² + z1².
    CASE2 takes x1² for the X1 route and solves the two-case linear system
    -10c + x1² = 2, 12c + x1² = 3.
    """
    z1_sq = mpq(z1_sq)
    x0_coeff = _l_pair(Q_LL)   # x0² = c·56
    if case is Case.CASE1:
        kept, rejected = None, {}
        for q in (2, -2):
            c = -z1_sq / _l_pair(q)
            z_sq = x0_coeff * c + z1_sq
            if z_sq.denominator == 1 and kept is None:
                kept = {"q_ll'": mpq(q), "c": c, "z_sq": z_sq, "x0_sq": x0_coeff * c}
            else:
                rejected[q] = {"c": c, "z_sq": z_sq}
        if kept is None:
            raise BranchError("no branch gives an integral z^2")
        return DV28Result(case, kept, rejected)
    # z·z'·h² = c·l_pair(q) + x1² with q = 2 (value 2) and q = -2 (value 3)
    a1, a2 = _l_pair(2), _l_pair(-2)
    c = (mpq(3) - 2) / (a2 - a1)
    x1_sq = 2 - a1 * c
    if x1_sq != z1_sq:
        raise BranchError(f"x1^2 = {z1_sq} disagrees with the solved value {x1_sq}")
    x0_sq = x0_coeff * c
    zh_sq = x0_sq + x1_sq
    if zh_sq.denominator != 1:
        raise BranchError("(z·h)^2 is not integral")
    vals = {"c": c, "x1_sq": x1_sq, "x0_sq": x0_sq, "zh_sq": zh_sq}
    vals.update(_x1_branch(x1_sq))
    return DV28Result(case, vals, {"x1_sign": "-"}, ("x1 sign + chosen as in the effectivity argument",))


H3_PI_GRAM = ((15, 7), (7, 4))   # h³·h³, h³·π, π·π on the Peskine threefold


def _x1_branch(x1_sq) -> dict:
    """x1 = t(h³ + π) with t² (h³+π)² = x1²; the + root is the one kept."""
    g = H3_PI_GRAM
    s = g[0][0] + 2 * g[0][1] + g[1][1]
    t = rational_sqrt(mpq(x1_sq) / s)
    if t is None:
        raise BranchError("x1 is not a rational multiple of h³ + π")
    zh_h3 = t * (g[0][0] + g[0][1])
    zh_pi = t * (g[0][1] + g[1][1])
    return {"x1_coeff": t, "zh.h3": zh_h3, "zh.pi": zh_pi}


def h3_pi_z_matrix(result: DV28Result) -> list[list[BigRational]]:
    v = result.values
    g = H3_PI_GRAM
    return [[mpq(g[0][0]), mpq(g[0][1]), v["zh.h3"]],
            [mpq(g[1][0]), mpq(g[1][1]), v["zh.pi"]],
            [v["zh.h3"], v["zh.pi"], v["zh_sq"]]]
