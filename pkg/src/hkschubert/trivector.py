"""Alternating 3-forms on a 10-space over Q or a prime field.

A trivector is stored as {(i, j, k): coefficient} with i < j < k, where
(i, j, k) stands for e_i^∨ ∧ e_j^∨ ∧ e_k^∨.  Subspaces are row bases.
All rank and kernel computations are exact Gaussian elimination.
"""
from __future__ import annotations

import ast
import itertools
import math
import random
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from gmpy2 import mpq

__all__ = [
    "Field", "QQ", "GF", "Trivector", "Subspace", "TrivectorError", "FixtureError",
    "parse_trivector", "contract_matrix", "contract_rank_kernel", "support_rank",
    "vanishing_check", "locus_membership", "MembershipReport", "hm_weight_max",
    "plane_fixture_check", "PlaneReport", "skew_matrix_rank_at_point",
    "load_fixture", "Fixture", "random_trivector", "sample_x3_singular",
    "matrix_rank", "nullspace",
]

N = 10


class TrivectorError(ValueError):
    pass


class FixtureError(TrivectorError):
    pass


@dataclass(frozen=True)
class Field:
    """Q when p == 0, otherwise the prime field F_p."""
    p: int = 0

    def __post_init__(self):
        if self.p < 0 or (self.p and self.p >= 2 ** 63):
            raise TrivectorError("unsupported field characteristic")

    def el(self, x):
        if not self.p:
            return mpq(x)
        if isinstance(x, int):
            return x % self.p
        x = mpq(x)
        return int(x.numerator) * pow(int(x.denominator), -1, self.p) % self.p

    def zero(self):
        return 0 if self.p else mpq(0)

    def inv(self, x):
        if self.p:
            return pow(int(x), -1, self.p)
        return 1 / x

    def norm(self, x):
        return x % self.p if self.p else x

    def __str__(self):
        return f"F_{self.p}" if self.p else "Q"


QQ = Field(0)


def GF(p: int) -> Field:
    return Field(p)


# --- linear algebra over a Field -------------------------------------------

def _rref(rows: list[list], F: Field) -> tuple[list[list], list[int]]:
    a = [[F.el(x) for x in r] for r in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    piv, r = [], 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        inv = F.inv(a[r][c])
        a[r] = [F.norm(x * inv) for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [F.norm(x - f * y) for x, y in zip(a[i], a[r])]
        piv.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], piv


def matrix_rank(rows: list[list], F: Field = QQ) -> int:
    return len(_rref(rows, F)[1])


def nullspace(rows: list[list], ncols: int, F: Field = QQ) -> list[list]:
    """Basis of {x : M x = 0}."""
    red, piv = _rref(rows, F)
    free = [c for c in range(ncols) if c not in piv]
    out = []
    for f in free:
        x = [F.zero()] * ncols
        x[f] = F.el(1)
        for i, c in enumerate(piv):
            x[c] = F.norm(-red[i][f])
        out.append(x)
    return out


# --- trivectors --------------------------------------------------------------

def _sort_sign(idx: tuple) -> tuple[int, tuple]:
    if len(set(idx)) != len(idx):
        return 0, idx
    s = list(idx)
    sign = 1
    for i in range(len(s)):
        for j in range(len(s) - 1 - i):
            if s[j] > s[j + 1]:
                s[j], s[j + 1] = s[j + 1], s[j]
                sign = -sign
    return sign, tuple(s)


@dataclass(frozen=True)
class Trivector:
    field: Field
    coeffs: dict
    n: int = N

    @classmethod
    def make(cls, coeffs: dict, F: Field = QQ, n: int = N) -> "Trivector":
        out: dict = {}
        for idx, c in coeffs.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != 3 or any(not 0 <= i < n for i in idx):
                raise TrivectorError(f"bad index triple {idx}")
            s, key = _sort_sign(idx)
            if s == 0:
                raise TrivectorError(f"repeated index in {idx}")
            out[key] = F.norm(out.get(key, F.zero()) + s * F.el(c))
        return cls(F, {k: v for k, v in sorted(out.items()) if v}, n)

    def reduce(self, F: Field) -> "Trivector":
        return Trivector.make(self.coeffs, F, self.n)

    def coefficient(self, i: int, j: int, k: int):
        s, key = _sort_sign((i, j, k))
        if s == 0:
            return self.field.zero()
        return self.field.norm(s * self.coeffs.get(key, self.field.zero()))

    def eval(self, u, v, w):
        """σ(u, v, w) for coordinate vectors."""
        F = self.field
        u, v, w = ([F.el(x) for x in t] for t in (u, v, w))
        tot = F.zero()
        for (i, j, k), c in self.coeffs.items():
            det = (u[i] * (v[j] * w[k] - v[k] * w[j]) - u[j] * (v[i] * w[k] - v[k] * w[i])
                   + u[k] * (v[i] * w[j] - v[j] * w[i]))
            tot += c * det
        return F.norm(tot)

    def __add__(self, o: "Trivector") -> "Trivector":
        d = dict(self.coeffs)
        for k, v in o.coeffs.items():
            d[k] = d.get(k, self.field.zero()) + v
        return Trivector.make(d, self.field, self.n)

    def support(self) -> list[tuple]:
        return list(self.coeffs)

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for (i, j, k), c in self.coeffs.items():
            sgn = "-" if (not self.field.p and c < 0) else "+"
            a = abs(c) if not self.field.p else c
            parts.append(f"{sgn}{'' if a == 1 else a}[{i}{j}{k}]")
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s


_TOKEN = re.compile(r"\s*([+-]?)\s*(\d*)\s*\[\s*(\d)\s*(\d)\s*(\d)\s*\]\s*")


def parse_trivector(text: str, F: Field = QQ, n: int = N) -> Trivector:
    """Parse '[056]+[037]-[237]+2[047]'-style text (unicode minus accepted)."""
    s = text.replace("−", "-").replace("\n", " ").strip()
    pos, coeffs = 0, {}
    if s in ("", "0"):
        return Trivector(F, {}, n)
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise TrivectorError(f"malformed token at {s[pos:pos + 12]!r}")
        if pos > 0 and not m.group(1):
            raise TrivectorError("tokens must be separated by + or -")
        sign = -1 if m.group(1) == "-" else 1
        mult = int(m.group(2)) if m.group(2) else 1
        idx = (int(m.group(3)), int(m.group(4)), int(m.group(5)))
        if len(set(idx)) < 3:
            raise TrivectorError(f"repeated index in [{''.join(map(str, idx))}]")
        sg, key = _sort_sign(idx)
        coeffs[key] = coeffs.get(key, 0) + sign * sg * mult
        pos = m.end()
    return Trivector.make(coeffs, F, n)


def random_trivector(F: Field, rng: random.Random, allowed=None, n: int = N, bound: int = 5) -> Trivector:
    """Random coefficients on the allowed triples (all sorted triples by default)."""
    triples = allowed if allowed is not None else itertools.combinations(range(n), 3)
    hi = F.p - 1 if F.p else bound
    lo = 0 if F.p else -bound
    return Trivector.make({t: rng.randint(lo, hi) for t in triples}, F, n)


# --- subspaces ---------------------------------------------------------------

@dataclass(frozen=True)
class Subspace:
    field: Field
    basis: tuple
    n: int = N

    @classmethod
    def span(cls, vectors: Iterable[Sequence], F: Field = QQ, n: int = N) -> "Subspace":
        vecs = [list(v) for v in vectors]
        if any(len(v) != n for v in vecs):
            raise TrivectorError("vector length differs from the ambient dimension")
        red, _ = _rref(vecs, F) if vecs else ([], [])
        return cls(F, tuple(tuple(r) for r in red), n)

    @classmethod
    def coordinate(cls, indices: Iterable[int], F: Field = QQ, n: int = N) -> "Subspace":
        return cls.span([[int(i == j) for j in range(n)] for i in indices], F, n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __add__(self, o: "Subspace") -> "Subspace":
        return Subspace.span(list(self.basis) + list(o.basis), self.field, self.n)

    def intersect(self, o: "Subspace") -> "Subspace":
        if not self.basis or not o.basis:
            return Subspace(self.field, (), self.n)
        # x·A = y·B: null space of the transpose of [A; -B]
        F = self.field
        stack = [list(r) for r in self.basis] + [[F.norm(-x) for x in r] for r in o.basis]
        cols = [[stack[i][j] for i in range(len(stack))] for j in range(self.n)]
        ker = nullspace(cols, len(stack), F)
        vecs = [[F.norm(sum(k[i] * self.basis[i][j] for i in range(self.dim))) for j in range(self.n)]
                for k in ker]
        return Subspace.span(vecs, F, self.n)

    def contains(self, o: "Subspace") -> bool:
        return (self + o).dim == self.dim

    def reduce(self, F: Field) -> "Subspace":
        return Subspace.span(self.basis, F, self.n)


def _as_subspace(x, F: Field) -> Subspace:
    if isinstance(x, Subspace):
        return x
    return Subspace.span(x, F)


# --- contractions --------------------------------------------------------------

def contract_matrix(sigma: Trivector, v: Sequence) -> list[list]:
    """M_jk = σ(v, e_j, e_k)."""
    F = sigma.field
    v = [F.el(x) for x in v]
    n = sigma.n
    m = [[F.zero()] * n for _ in range(n)]
    for (i, j, k), c in sigma.coeffs.items():
        # the six orderings of (i, j, k) with the contracted slot first
        for a, b, d, s in ((i, j, k, 1), (j, k, i, 1), (k, i, j, 1)):
            if v[a]:
                t = c * v[a] * s
                m[b][d] += t
                m[d][b] -= t
    return [[F.norm(x) for x in r] for r in m]


def contract_rank_kernel(sigma: Trivector, v: Sequence) -> tuple[int, Subspace]:
    F = sigma.field
    if not any(F.el(x) for x in v):
        raise TrivectorError("contraction by the zero vector")
    m = contract_matrix(sigma, v)
    ker = nullspace(m, sigma.n, F)
    return sigma.n - len(ker), Subspace.span(ker, F, sigma.n)


def _restricted(sigma: Trivector, W: Subspace):
    b = W.basis
    return {(a, c, d): sigma.eval(b[a], b[c], b[d])
            for a, c, d in itertools.combinations(range(W.dim), 3)}


def support_rank(sigma: Trivector, W: Subspace | None = None) -> int:
    """Dimension of the smallest subspace carrying σ restricted to W."""
    F = sigma.field
    W = W if W is not None else Subspace.coordinate(range(sigma.n), F, sigma.n)
    m = W.dim
    omega = Trivector.make(_restricted(sigma, W), F, max(m, 3)) if m >= 3 else None
    if omega is None or not omega.coeffs:
        return 0
    rows = [[omega.coefficient(a, b, c) for c in range(m)]
            for a, b in itertools.combinations(range(m), 2)]
    return matrix_rank(rows, F)


def vanishing_check(sigma: Trivector, A, B, C) -> bool:
    F = sigma.field
    A, B, C = (_as_subspace(x, F) for x in (A, B, C))
    return all(not sigma.eval(a, b, c) for a in A.basis for b in B.basis for c in C.basis)


def _full(F: Field, n: int) -> Subspace:
    return Subspace.coordinate(range(n), F, n)


@dataclass(frozen=True)
class MembershipReport:
    locus: str
    member: bool
    value: int | None = None     # contraction or support rank where relevant
    witness: Subspace | None = None


_LOCI = {1: "X1", 2: "X2", 3: "X3", 6: "X6", 7: "X7"}


def locus_membership(sigma: Trivector, point: Subspace, locus: str | None = None) -> MembershipReport:
    """Membership of a subspace in the degeneracy locus of its dimension.

    X1: rank σ(V1,−,−) ≤ 6 (witness: the kernel, 4-dimensional at rank 6);
    X2: σ(V2,V2,−) = 0; X3: σ|V3 = 0; X6: σ|V6 = 0; X7: σ|V7 has support
    rank ≤ 5 (witness at rank 5: the unique V2 with σ(V2,V7,V7) = 0).
    """
    F = sigma.field
    name = _LOCI.get(point.dim)
    if name is None or (locus is not None and locus != name):
        raise TrivectorError(f"a {point.dim}-dimensional subspace does not fit locus {locus or '?'}")
    b = point.basis
    if name == "X1":
        r, ker = contract_rank_kernel(sigma, b[0])
        return MembershipReport(name, r <= 6, r, ker)
    if name == "X2":
        ok = vanishing_check(sigma, point, point, _full(F, sigma.n))
        return MembershipReport(name, ok)
    if name in ("X3", "X6"):
        ok = vanishing_check(sigma, point, point, point)
        return MembershipReport(name, ok)
    r = support_rank(sigma, point)
    witness = None
    if r == 5:
        witness = _x7_witness(sigma, point)
    return MembershipReport(name, r <= 5, r, witness)


def _x7_witness(sigma: Trivector, V: Subspace) -> Subspace:
    """{v ∈ V : σ(v, V, V) = 0} as a subspace of the ambient space."""
    F = sigma.field
    b = V.basis
    m = V.dim
    # rows: pairs (c, d); columns: basis index a; entry σ(b_a, b_c, b_d)
    rows = [[sigma.eval(b[a], b[c], b[d]) for a in range(m)]
            for c, d in itertools.combinations(range(m), 2)]
    ker = nullspace(rows, m, F)
    vecs = [[F.norm(sum(k[a] * b[a][j] for a in range(m))) for j in range(sigma.n)] for k in ker]
    return Subspace.span(vecs, F, sigma.n)


def hm_weight_max(sigma: Trivector, weights: Sequence[int]) -> float | int:
    """max over the support of w_i + w_j + w_k (−inf for σ = 0).

    A monomial [ijk] scales by t^{-(w_i+w_j+w_k)} under t ↦ diag(t^{w});
    σ is destabilized by the one-parameter subgroup when the max is < 0.
    """
    if len(weights) != sigma.n:
        raise TrivectorError("weight vector of the wrong length")
    if sum(weights) != 0:
        raise TrivectorError("weights must sum to zero")
    if not sigma.coeffs:
        return -math.inf
    return max(weights[i] + weights[j] + weights[k] for i, j, k in sigma.coeffs)


# --- plane configurations ------------------------------------------------------

@dataclass(frozen=True)
class PlaneReport:
    case: int
    checks: dict
    intersection: Subspace | None = None

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]


CASE_FLAGS = {
    1: {"V7": range(0, 7), "V7'": range(3, 10), "V4": range(1, 5), "V4'": range(5, 9)},
    2: {"V7": range(0, 7), "V7'": range(3, 10), "V4": range(0, 4), "V4'": (3, 7, 8, 9)},
}


def case_flags(case: int, F: Field = QQ) -> dict:
    return {k: Subspace.coordinate(v, F) for k, v in CASE_FLAGS[case].items()}


def plane_fixture_check(case: int, sigma: Trivector, flags: dict | None = None) -> PlaneReport:
    """Flag vanishings and intersection pattern for two disjoint planes."""
    if case not in (1, 2):
        raise TrivectorError("case must be 1 or 2")
    F = sigma.field
    fl = flags if flags is not None else case_flags(case, F)
    V7, W7, V4, W4 = fl["V7"], fl["V7'"], fl["V4"], fl["V4'"]
    meet = V4.intersect(W4)
    big = V7.intersect(W7)
    join = V4 + W4
    # P and P' meet iff some U6 has V4 + V4' ⊆ U6 ⊆ V7 ∩ V7'
    meets = join.dim <= 6 <= big.dim and big.contains(join)
    checks = {
        "V4 in V7": V7.contains(V4),
        "V4' in V7'": W7.contains(W4),
        "sigma(V4,V7,V7)=0": vanishing_check(sigma, V4, V7, V7),
        "sigma(V4',V7',V7')=0": vanishing_check(sigma, W4, W7, W7),
        "dim(V7 cap V7')=4": big.dim == 4,
        f"dim(V4 cap V4')={case - 1}": meet.dim == case - 1,
        "planes disjoint": not meets,
    }
    return PlaneReport(case, checks, meet)


def skew_matrix_rank_at_point(case: int, sigma: Trivector, x: Sequence) -> int:
    """Rank of σ(x, −, −) for x = x3 e3 + x4 e4 + x5 e5 + x6 e6."""
    if case not in (1, 2):
        raise TrivectorError("case must be 1 or 2")
    if len(x) != 4:
        raise TrivectorError("expected coordinates (x3, x4, x5, x6)")
    F = sigma.field
    if not any(F.el(t) for t in x):
        raise TrivectorError("zero point")
    v = [0, 0, 0, *x, 0, 0, 0]
    return contract_rank_kernel(sigma, v)[0]


def linear_form(sigma: Trivector, i: int, j: int, x: Sequence):
    """f_ij(x) = σ(e_i, e_j, x) for x in ⟨e3, ..., e6⟩."""
    F = sigma.field
    return F.norm(sum(sigma.coefficient(i, j, 3 + t) * F.el(x[t]) for t in range(4)))


def degeneracy_equation(case: int, sigma: Trivector, x: Sequence):
    """Case 1: f17 f28 − f27 f18.  Case 2: det(f_ij), i ∈ {0,1,2}, j ∈ {7,8,9}."""
    F = sigma.field
    f = lambda i, j: linear_form(sigma, i, j, x)
    if case == 1:
        return F.norm(f(1, 7) * f(2, 8) - f(2, 7) * f(1, 8))
    m = [[f(i, j) for j in (7, 8, 9)] for i in (0, 1, 2)]
    det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    return F.norm(det)


def on_special_components(case: int, x: Sequence, F: Field = QQ) -> bool:
    """The two lines (Case 1) or the point e3 (Case 2)."""
    x = [F.el(t) for t in x]
    if case == 1:
        return (not x[0] and not x[1]) or (not x[2] and not x[3])
    return not x[1] and not x[2] and not x[3]


# --- fixtures -----------------------------------------------------------------

@dataclass(frozen=True)
class Fixture:
    sigma: Trivector
    subspaces: dict
    meta: dict = field(default_factory=dict)


_DECL = re.compile(r"^\s*([A-Za-z][\w']*)\s*=\s*(.+?)\s*$")


def load_fixture(path, F: Field = QQ) -> Fixture:
    """Read a trivector file: token lines plus 'V4 = 1 2 3 4' declarations.

    A declaration right-hand side is either basis indices or a list of row
    vectors '[[...], [...]]'.  'case = 1' style integer metadata is kept in
    ``meta``; '#' starts a comment.
    """
    text = Path(path).read_text()
    body, subs, meta = [], {}, {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _DECL.match(line)
        if not m:
            body.append(line)
            continue
        name, rhs = m.groups()
        if name.lower() in ("case", "n"):
            meta[name.lower()] = int(rhs)
            continue
        if rhs.startswith("["):
            rows = ast.literal_eval(rhs)
            subs[name] = Subspace.span([[F.el(x) for x in r] for r in rows], F)
        else:
            try:
                idx = [int(t) for t in rhs.split()]
            except ValueError as e:
                raise FixtureError(f"bad declaration {raw!r}") from e
            subs[name] = Subspace.coordinate(idx, F)
    if not body:
        raise FixtureError("fixture has no trivector")
    return Fixture(parse_trivector(" ".join(body), F), subs, meta)


DATA = Path(__file__).with_name("data")


def bundled_fixture(name: str, F: Field = QQ) -> Fixture:
    return load_fixture(DATA / name, F)


def sample_x3_singular(sigma: Trivector, samples: int, seed: int = 0) -> int:
    """Heuristic: random points of X3 and how many are singular.

    V3 = ⟨v1, v2, v3⟩ with v3 in the kernel of σ(v1, v2, −) lies on X3; it
    is a singular point iff σ(V3, V3, V10) = 0.  Over a prime field.
    """
    F = sigma.field
    if not F.p:
        raise TrivectorError("sampling needs a prime field")
    rng = random.Random(seed)
    full = _full(F, sigma.n)
    bad = 0
    for _ in range(samples):
        v1 = [rng.randrange(F.p) for _ in range(sigma.n)]
        v2 = [rng.randrange(F.p) for _ in range(sigma.n)]
        row = [sigma.eval(v1, v2, [int(i == j) for j in range(sigma.n)]) for i in range(sigma.n)]
        ker = nullspace([row], sigma.n, F)
        coeffs = [rng.randrange(F.p) for _ in ker]
        v3 = [sum(c * k[j] for c, k in zip(coeffs, ker)) % F.p for j in range(sigma.n)]
        V = Subspace.span([v1, v2, v3], F)
        if V.dim == 3 and vanishing_check(sigma, V, V, full):
            bad += 1
    return bad
