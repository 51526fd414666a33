"""Integral quadratic forms: discriminants, complements, saturation, glue.

Vectors are rows of ambient coordinates.  A :class:`Sublattice` may carry
rational basis rows as long as the induced Gram matrix is integral, which
is how overlattices obtained by adjoining glue vectors such as (H + λ)/2
are represented.  Mukai vectors live on U ⊕ K where K is a K3-type lattice
given by its Gram matrix.
"""
from __future__ import annotations

import ast
import itertools
import re
from dataclasses import dataclass
from math import gcd, lcm
from typing import Sequence

from gmpy2 import mpq

from .linalg import (BigRational, DimensionError, IntMatrix, RatMatrix, det_exact,
                     hermite_kernel, hermite_rows, int_vec_gcd, rank_rational,
                     smith_normal_form, solve_rational)

__all__ = [
    "Lattice", "Sublattice", "MukaiVector", "LatticeError", "GlueError", "Verdict",
    "lattice_build", "E8_NEG", "U_GRAM", "disc_and_group", "divisibility",
    "orthogonal_complement", "saturate_and_index", "adjoin_rational_vectors",
    "kernel_mod_pairing", "nonrepresentability_mod", "bounded_search",
    "mukai_pairing", "twisted_embedding_index", "bfield_normalize", "glue_in_kernel",
    "EmbeddingFixture", "d24_fixture",
]


class LatticeError(ValueError):
    pass


class GlueError(LatticeError):
    pass


U_GRAM = ((0, 1), (1, 0))


def _e8_neg() -> tuple:
    # Dynkin diagram: chain 1-3-4-5-6-7-8 with node 2 attached to 4
    edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)]
    g = [[-2 if i == j else 0 for j in range(8)] for i in range(8)]
    for i, j in edges:
        g[i][j] = g[j][i] = 1
    return tuple(tuple(r) for r in g)


E8_NEG = _e8_neg()


def _frac_rows(rows) -> list[list[BigRational]]:
    return [[mpq(x) for x in r] for r in rows]


def _bilinear(g: IntMatrix, x: Sequence, y: Sequence) -> BigRational:
    n = g.cols
    tot = mpq(0)
    for i in range(n):
        if not x[i]:
            continue
        row = g.row(i)
        tot += mpq(x[i]) * sum((row[j] * mpq(y[j]) for j in range(n) if y[j] and row[j]), mpq(0))
    return tot


@dataclass(frozen=True)
class Lattice:
    gram: IntMatrix
    degenerate_ok: bool = False

    def __post_init__(self):
        if self.gram.rows != self.gram.cols or not self.gram.is_symmetric():
            raise LatticeError("Gram matrix must be square and symmetric")
        if not self.degenerate_ok and self.gram.rows and det_exact(self.gram) == 0:
            raise LatticeError("degenerate Gram matrix")

    @classmethod
    def from_rows(cls, rows, degenerate_ok: bool = False) -> "Lattice":
        return cls(IntMatrix.from_rows(rows), degenerate_ok)

    @property
    def rank(self) -> int:
        return self.gram.rows

    def pair(self, x, y) -> BigRational:
        if len(x) != self.rank or len(y) != self.rank:
            raise DimensionError("vector length differs from lattice rank")
        return _bilinear(self.gram, x, y)

    def det(self) -> int:
        return det_exact(self.gram)

    def is_even(self) -> bool:
        return all(self.gram[i, i] % 2 == 0 for i in range(self.rank))

    def direct_sum(self, other: "Lattice") -> "Lattice":
        return Lattice(_block([self.gram, other.gram]), self.degenerate_ok or other.degenerate_ok)

    def whole(self) -> "Sublattice":
        return Sublattice(self, RatMatrix.from_rows(
            [[int(i == j) for j in range(self.rank)] for i in range(self.rank)], cols=self.rank))


def _block(blocks: list[IntMatrix]) -> IntMatrix:
    n = sum(b.rows for b in blocks)
    out = [[0] * n for _ in range(n)]
    o = 0
    for b in blocks:
        for i in range(b.rows):
            for j in range(b.cols):
                out[o + i][o + j] = b[i, j]
        o += b.rows
    return IntMatrix.from_rows(out, cols=n)


_TERM = re.compile(r"^(U|E8\(-1\)|<\s*-?\d+\s*>|\[.*\])(?:\^(\d+))?$", re.S)


def lattice_build(spec) -> Lattice:
    """Block-diagonal lattice from terms joined by '+' or '⊕'.

    Terms: ``U``, ``E8(-1)``, ``<k>`` and Gram literals ``[[a,b],[b,c]]``,
    each optionally raised to a power ``^n`` meaning n orthogonal copies.
    A list of terms or of Gram row lists is accepted too.
    """
    if isinstance(spec, Lattice):
        return spec
    if isinstance(spec, str):
        terms = _split_terms(spec.replace("⊕", "+").replace("−", "-"))
    else:
        terms = list(spec)
    blocks = []
    for t in terms:
        if isinstance(t, Lattice):
            blocks.append(t.gram)
            continue
        if not isinstance(t, str):
            m = IntMatrix.from_rows(t)
            if not m.is_symmetric():
                raise LatticeError("non-symmetric Gram literal")
            blocks.append(m)
            continue
        mt = _TERM.match(t.replace(" ", ""))
        if not mt:
            raise LatticeError(f"cannot parse lattice term {t!r}")
        head, power = mt.group(1), int(mt.group(2) or 1)
        if head == "U":
            g = IntMatrix.from_rows(U_GRAM)
        elif head.startswith("E8"):
            g = IntMatrix.from_rows(E8_NEG)
        elif head.startswith("<"):
            g = IntMatrix.from_rows([[int(head.strip("<> "))]])
        else:
            g = IntMatrix.from_rows(ast.literal_eval(head))
            if not g.is_symmetric():
                raise LatticeError("non-symmetric Gram literal")
        blocks.extend([g] * power)
    return Lattice(_block(blocks))


def _split_terms(s: str) -> list[str]:
    out, depth, cur = [], 0, ""
    for ch in s:
        if ch in "[<(":
            depth += 1
        elif ch in "]>)":
            depth -= 1
        if ch == "+" and depth == 0:
            out.append(cur.strip())
            cur = ""
        else:
            cur += ch
    if cur.strip():
        out.append(cur.strip())
    return out


@dataclass(frozen=True)
class Sublattice:
    ambient: Lattice
    basis: RatMatrix

    def __post_init__(self):
        if self.basis.cols != self.ambient.rank:
            raise DimensionError("basis rows must have ambient length")
        if self.basis.rows and rank_rational(self.basis) != self.basis.rows:
            raise LatticeError("basis rows are dependent")
        for x in self.gram_rational():
            for v in x:
                if v.denominator != 1:
                    raise GlueError("induced Gram matrix is not integral")

    @classmethod
    def of(cls, ambient: Lattice, rows) -> "Sublattice":
        rows = _frac_rows(rows)
        return cls(ambient, RatMatrix.from_rows(rows, cols=ambient.rank))

    @property
    def rank(self) -> int:
        return self.basis.rows

    def rows(self) -> list[list[BigRational]]:
        return [list(self.basis.row(i)) for i in range(self.rank)]

    def gram_rational(self) -> list[list[BigRational]]:
        r = self.rows()
        return [[self.ambient.pair(a, b) for b in r] for a in r]

    @property
    def gram(self) -> IntMatrix:
        return IntMatrix.from_rows([[int(v) for v in row] for row in self.gram_rational()],
                                   cols=self.rank)

    def lattice(self) -> Lattice:
        return Lattice(self.gram, degenerate_ok=True)

    def disc(self) -> int:
        return abs(det_exact(self.gram))

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for r in self.rows() for x in r)


def disc_and_group(L) -> tuple[int, list[int]]:
    """|det| and the nontrivial invariant factors of L^∨/L."""
    if isinstance(L, (Lattice, Sublattice)):
        g = L.gram
    else:
        g = L if isinstance(L, IntMatrix) else IntMatrix.from_rows(L)
    d = abs(det_exact(g))
    if d == 0:
        raise LatticeError("degenerate Gram matrix")
    inv, _, _ = smith_normal_form(g)
    return d, [x for x in inv if x != 1]


def divisibility(L: Lattice, v: Sequence[int]) -> int:
    if not any(v):
        raise LatticeError("divisibility of the zero vector")
    vals = [L.pair(v, [int(i == j) for j in range(L.rank)]) for i in range(L.rank)]
    return int_vec_gcd(int(x) for x in vals)


def _clear_denominators(rows: list[list[BigRational]]) -> list[list[int]]:
    out = []
    for r in rows:
        den = lcm(*(int(x.denominator) for x in r)) if r else 1
        out.append([int(x * den) for x in r])
    return out


def orthogonal_complement(S: Sublattice) -> Sublattice:
    """Saturated integral kernel of the pairing against S inside the ambient."""
    amb = S.ambient
    n = amb.rank
    # x·G·Bᵀ = 0 for the integer-scaled basis B
    b = _clear_denominators(S.rows())
    gbt = [[sum(amb.gram[i, k] * b[j][k] for k in range(n)) for j in range(len(b))] for i in range(n)]
    if not b:
        return amb.whole()
    ker = hermite_kernel(IntMatrix.from_rows(gbt, cols=len(b)))
    return Sublattice.of(amb, ker.to_rows())


def saturate_and_index(S: Sublattice) -> tuple[Sublattice, int]:
    """Primitive closure of an integral basis and the index [Sat : S]."""
    if not S.is_integral():
        raise LatticeError("saturation needs an integral basis")
    rows = [[int(x) for x in r] for r in S.rows()]
    if not rows:
        return S, 1
    d, u, _ = smith_normal_form(IntMatrix.from_rows(rows, cols=S.ambient.rank))
    ub = (u @ IntMatrix.from_rows(rows)).to_rows()
    r = S.rank
    # U·B = diag(d)·V^{-1}: dividing row i by d_i leaves rows of V^{-1}
    sat_rows = hermite_rows([[x // d[i] for x in ub[i]] for i in range(r)])
    index = 1
    for x in d[:r]:
        index *= x
    sat = Sublattice.of(S.ambient, sat_rows)
    ds, dsat = det_exact(S.gram), det_exact(sat.gram)
    if ds != index * index * dsat:
        raise LatticeError("saturation index check failed")
    return sat, index


def relative_index(small: Sublattice, big: Sublattice) -> int:
    """[big : small] for small ⊂ big of equal rank (coordinates solved exactly)."""
    if small.rank != big.rank:
        raise LatticeError("relative index needs equal ranks")
    bt = RatMatrix.from_rows([list(c) for c in zip(*big.rows())])
    coords = []
    for r in small.rows():
        x = solve_rational(bt, r)
        if x is None or any(v.denominator != 1 for v in x):
            raise LatticeError("not a sublattice")
        coords.append([int(v) for v in x])
    return abs(det_exact(coords))


def _rational_hnf(rows: list[list[BigRational]]) -> list[list[BigRational]]:
    den = lcm(*(int(x.denominator) for r in rows for x in r)) if rows else 1
    ints = hermite_rows([[int(x * den) for x in r] for r in rows])
    return [[mpq(x, den) for x in r] for r in ints]


def adjoin_rational_vectors(S: Sublattice, glue) -> Sublattice:
    """The lattice generated by S and the glue rows (ambient coordinates).

    The result keeps the glue vectors first when they extend a basis, so
    adjoining (H + λ)/2 to ⟨H, λ⟩ comes back in the basis ((H + λ)/2, λ).
    """
    glue = _frac_rows(glue)
    if not glue:
        return S
    for g in glue:
        if len(g) != S.ambient.rank:
            raise DimensionError("glue vector length differs from ambient rank")
        for x in S.rows() + glue:
            if S.ambient.pair(g, x).denominator != 1:
                raise GlueError("glue vector pairs non-integrally")
    gens = glue + S.rows()
    rows = _rational_hnf(gens)
    out = Sublattice.of(S.ambient, _prefer_glue(rows, glue))
    return out


def _prefer_glue(basis: list[list[BigRational]], glue: list[list[BigRational]]) -> list[list[BigRational]]:
    """Swap glue vectors into the basis when the change is unimodular."""
    basis = [list(r) for r in basis]
    n = len(basis)
    bt = RatMatrix.from_rows([list(c) for c in zip(*basis)])
    for slot, g in enumerate(glue[:n]):
        x = solve_rational(bt, g)
        if x is None or any(v.denominator != 1 for v in x):
            continue
        # replacing basis[j] by g is unimodular iff x_j = ±1
        j = next((j for j in range(slot, n) if abs(x[j]) == 1), None)
        if j is None:
            continue
        basis[j] = list(g)
        basis[slot], basis[j] = basis[j], basis[slot]
        bt = RatMatrix.from_rows([list(c) for c in zip(*basis)])
    return basis


def kernel_mod_pairing(L, w: Sequence, n: int = 1) -> tuple[Sublattice, int]:
    """{u ∈ L : q(u, w) ∈ nZ} and its index in L.

    ``L`` is a Lattice or Sublattice, ``w`` a rational vector in ambient
    coordinates.  The index equals the order of the image of u ↦ q(u, w)/n
    in Q/Z.
    """
    if n < 1:
        raise LatticeError("n must be positive")
    S = L.whole() if isinstance(L, Lattice) else L
    w = [mpq(x) for x in w]
    vals = [S.ambient.pair(b, w) / n for b in S.rows()]
    den = lcm(*(int(v.denominator) for v in vals)) if vals else 1
    a = [int(v * den) % den for v in vals]
    order = den // gcd(den, int_vec_gcd(a)) if den > 1 else 1
    if order == 1:
        return S, 1
    # x·a + y·den = 0; keep the x part
    ker = hermite_kernel(IntMatrix.from_rows([[x] for x in a] + [[den]], cols=1))
    coeffs = hermite_rows([list(r[:-1]) for r in ker.to_rows()])
    rows = [[sum(c * b[k] for c, b in zip(cf, S.rows())) for k in range(S.ambient.rank)]
            for cf in coeffs]
    return Sublattice.of(S.ambient, rows), order


@dataclass(frozen=True)
class Verdict:
    obstructed: bool
    witness: tuple | None = None

    @property
    def label(self) -> str:
        return "obstructed" if self.obstructed else "inconclusive"


def _quad(form, a: int, b: int) -> int:
    return form[0][0] * a * a + 2 * form[0][1] * a * b + form[1][1] * b * b


def nonrepresentability_mod(form, target: int, modulus: int) -> Verdict:
    """Exhaustive residue check of Q(a, b) ≡ target (mod modulus)."""
    if modulus < 2:
        raise LatticeError("modulus must be at least 2")
    form = IntMatrix.from_rows(form).to_rows()
    if form[0][1] != form[1][0]:
        raise LatticeError("form must be symmetric")
    for a, b in itertools.product(range(modulus), repeat=2):
        if (_quad(form, a, b) - target) % modulus == 0:
            return Verdict(False, (a, b))
    return Verdict(True)


def bounded_search(form, target: int, bound: int) -> list[tuple[int, int]]:
    form = IntMatrix.from_rows(form).to_rows()
    rng = range(-bound, bound + 1)
    return [(a, b) for a in rng for b in rng if _quad(form, a, b) == target]


# --- Mukai lattice -------------------------------------------------------

@dataclass(frozen=True)
class MukaiVector:
    """(r, c, s) with c in coordinates of the K3-type lattice ``k3``.

    Twist convention: entries may be rational (B-fields carry halves); a
    vector counts as integral when r, s and every coordinate of c are
    integers, which is the bookkeeping used by η_B(u) = (0, u, u·B).
    """
    r: BigRational
    c: tuple
    s: BigRational
    k3: Lattice

    @classmethod
    def make(cls, r, c, s, k3: Lattice) -> "MukaiVector":
        if len(c) != k3.rank:
            raise DimensionError("c has the wrong length for the K3 lattice")
        return cls(mpq(r), tuple(mpq(x) for x in c), mpq(s), k3)

    def __add__(self, o: "MukaiVector") -> "MukaiVector":
        _same(self, o)
        return MukaiVector(self.r + o.r, tuple(a + b for a, b in zip(self.c, o.c)), self.s + o.s, self.k3)

    def __sub__(self, o: "MukaiVector") -> "MukaiVector":
        return self + o.scale(-1)

    def scale(self, k) -> "MukaiVector":
        k = mpq(k)
        return MukaiVector(k * self.r, tuple(k * x for x in self.c), k * self.s, self.k3)

    def coords(self) -> list:
        return [self.r, *self.c, self.s]

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.coords())


def _same(v1: MukaiVector, v2: MukaiVector):
    if v1.k3 != v2.k3:
        raise LatticeError("Mukai vectors over different K3 lattices")


def mukai_pairing(v1: MukaiVector, v2: MukaiVector) -> BigRational:
    _same(v1, v2)
    return v1.k3.pair(v1.c, v2.c) - v1.r * v2.s - v2.r * v1.s


def _mukai_gram(k3: Lattice) -> list[list[int]]:
    n = k3.rank
    g = [[0] * (n + 2) for _ in range(n + 2)]
    g[0][n + 1] = g[n + 1][0] = -1
    for i in range(n):
        for j in range(n):
            g[i + 1][j + 1] = k3.gram[i, j]
    return g


# --- B-fields on U ⊕ U ------------------------------------------------------

_UU = None


def _uu() -> Lattice:
    global _UU
    if _UU is None:
        _UU = lattice_build("U^2")
    return _UU


def bfield_normalize(h: Sequence[int], A: Sequence[int]) -> tuple:
    """Normal form B ≡ A/2 modulo integral vectors with B·B = B·h = 1/2.

    Coordinates are (e1, f1, e2, f2) in U ⊕ U and h must be e1 + 3f1.
    The residues of A/2 in the first U are (1/2, 0) or (0, 1/2) and in the
    second U always (1/2, 1/2); each residue class gets a fixed integral
    correction landing on the normal form.
    """
    L = _uu()
    if tuple(int(x) for x in h) != (1, 3, 0, 0):
        raise LatticeError("h must be e1 + 3 f1")
    A = [int(x) for x in A]
    if len(A) != 4:
        raise DimensionError("A must have four coordinates")
    if int(L.pair(A, A)) % 8 != 6:
        raise LatticeError("A·A must be 6 mod 8")
    if int(L.pair(A, h)) % 2 != 1:
        raise LatticeError("A·h must be odd")
    res = tuple(mpq(x % 2, 2) for x in A)
    half = mpq(1, 2)
    if res == (half, 0, half, half):
        B = (half, mpq(-1), half, mpq(3, 2))
    elif res == (0, half, half, half):
        B = (mpq(0), half, half, half)
    else:
        raise LatticeError(f"unexpected residue pattern {res}")
    if L.pair(B, B) != half or L.pair(B, h) != half:
        raise LatticeError("normal form check failed")
    if any((b - mpq(a, 2)).denominator != 1 for a, b in zip(A, B)):
        raise LatticeError("B is not a lift of the same class")
    return B


def glue_in_kernel(h, B, A) -> bool:
    """Whether h − B − A/2 is integral and pairs integrally with B."""
    L = _uu()
    g = [mpq(a) - mpq(b) - mpq(c, 2) for a, b, c in zip(h, B, A)]
    return all(x.denominator == 1 for x in g) and L.pair(g, B).denominator == 1


# --- twisted embedding -------------------------------------------------------

@dataclass(frozen=True)
class EmbeddingFixture:
    """A polarization h and B-field B in K3-lattice coordinates.

    ``k3`` defaults to U ⊕ U: the other summands of the K3 lattice are
    orthogonal to h and B and do not change the index.
    """
    h: tuple
    B: tuple
    k3: Lattice | None = None

    def lattice(self) -> Lattice:
        return self.k3 if self.k3 is not None else _uu()


def twisted_embedding_index(fx: EmbeddingFixture) -> tuple[int, MukaiVector]:
    """Index of η_B(Λ_{B,prim}) + Zφ(H) + Zφ(D) in v^⊥, v = (2, 2B, 0).

    φ(H) = (−2, 2h − 2B, 0) and φ(D) = (2, 2B, 1).  The witness is
    η_B(u₁) − φ(H) + 11φ(D) with u₁ = 2h − 24B.
    """
    k3 = fx.lattice()
    n = k3.rank
    h = [mpq(x) for x in fx.h] + [mpq(0)] * (n - len(fx.h))
    B = [mpq(x) for x in fx.B] + [mpq(0)] * (n - len(fx.B))
    if any(x.denominator != 1 for x in h) or any((2 * x).denominator != 1 for x in B):
        raise LatticeError("fixture needs integral h and 2B")

    def eta(u):
        return MukaiVector.make(0, u, k3.pair(u, B), k3)

    v = MukaiVector.make(2, [2 * x for x in B], 0, k3)
    phiH = MukaiVector.make(-2, [2 * a - 2 * b for a, b in zip(h, B)], 0, k3)
    phiD = MukaiVector.make(2, [2 * x for x in B], 1, k3)
    prim = orthogonal_complement(Sublattice.of(k3, [h]))
    lam, _ = kernel_mod_pairing(prim, B, 1)
    gens = [eta(u) for u in lam.rows()] + [phiH, phiD]
    for g in gens:
        if not g.is_integral() or mukai_pairing(g, v) != 0:
            raise LatticeError("generator not in v-perp")
    mk = Lattice.from_rows(_mukai_gram(k3))
    vperp = orthogonal_complement(Sublattice.of(mk, [[int(x) for x in v.coords()]]))
    S = Sublattice.of(mk, [[int(x) for x in g.coords()] for g in gens])
    index = relative_index(S, vperp)
    u1 = [2 * a - 24 * b for a, b in zip(h, B)]
    witness = eta(u1) - phiH + phiD.scale(11)
    return index, witness


# --- D24 fixture ---------------------------------------------------------------

def d24_fixture() -> tuple[Lattice, list[int], list[int]]:
    """Λ = U³ ⊕ E8(−1)² ⊕ ⟨−2⟩ with explicit H (square 22, div 2) and D.

    Coordinates: U blocks at 0..5, E8 blocks at 6..21, ⟨−2⟩ generator δ
    at 22.  H = 2e1 + 6f1 + δ and D = f1 + e2 − f2, so q(H,D) = 2 and
    q(D,D) = −2.
    """
    lam = lattice_build("U^3 + E8(-1)^2 + <-2>")
    H = [0] * 23
    H[0], H[1], H[22] = 2, 6, 1
    D = [0] * 23
    D[1], D[2], D[3] = 1, 1, -1
    return lam, H, D
