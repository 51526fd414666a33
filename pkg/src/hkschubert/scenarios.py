"""Named computations with golden values and deterministic reports."""
from __future__ import annotations

import itertools
import json
import random
import signal
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Callable

from gmpy2 import mpq

from . import hk, lattice as lat, trivector as tv
from .linalg import IntMatrix, det_exact, smith_normal_form, solve_rational
from .script import run_script, run_script_file
from .variety import grassmannian, schubert_gram

__all__ = ["Scenario", "Report", "ValueRecord", "REGISTRY", "run_scenario", "emit_report",
           "canon", "load_goldens", "ScenarioError", "ScenarioTimeout", "SCHUBERT_BASIS"]

DATA = Path(__file__).with_name("data")
TOWERS = DATA / "towers"
GOLDENS = DATA / "goldens.json"


class ScenarioError(RuntimeError):
    pass


class ScenarioTimeout(ScenarioError):
    pass


def canon(v) -> str:
    """Lossless, deterministic string form of an exact value."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, type(mpq(0))):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(v, float):
        if v == float("-inf"):
            return "-inf"
        raise ScenarioError("floating point values are not reported")
    if isinstance(v, str):
        return v
    if isinstance(v, (set, frozenset)):
        return "{" + ", ".join(canon(x) for x in sorted(v)) + "}"
    if isinstance(v, tuple) and len(v) == 1:
        return "(" + canon(v[0]) + ",)"
    if isinstance(v, tuple):
        return "(" + ", ".join(canon(x) for x in v) + ")"
    if isinstance(v, list):
        return "[" + ", ".join(canon(x) for x in v) + "]"
    if isinstance(v, IntMatrix):
        return canon(v.to_rows())
    raise ScenarioError(f"cannot serialize {type(v).__name__}")


@dataclass
class Context:
    seed: int = 0
    fixture: Path | None = None


@dataclass(frozen=True)
class Scenario:
    name: str
    anchor: str
    run: Callable[[Context], list]
    slow: bool = False
    takes_fixture: bool = False


@dataclass
class ValueRecord:
    name: str
    value: str
    provenance: str
    expected: str | None = None

    @property
    def ok(self) -> bool:
        return self.expected is None or self.expected == self.value


@dataclass
class Report:
    scenario: str
    anchor: str = ""
    values: list = field(default_factory=list)
    status: str = "pass"
    elapsed_ms: int = 0
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def value(self, name: str) -> str:
        for r in self.values:
            if r.name == name:
                return r.value
        raise KeyError(name)


REGISTRY: dict[str, Scenario] = {}


def register(name: str, anchor: str, slow: bool = False, takes_fixture: bool = False):
    def deco(fn):
        if name in REGISTRY:
            raise ScenarioError(f"duplicate scenario {name}")
        REGISTRY[name] = Scenario(name, anchor, fn, slow, takes_fixture)
        return fn
    return deco


def _tower(ctx: Context, default: str) -> list:
    path = ctx.fixture or TOWERS / default
    return run_script_file(path).values


# --- Schubert lattice helpers -----------------------------------------------

SCHUBERT_BASIS = [(7, 3, 0), (7, 2, 1), (6, 4, 0), (6, 3, 1), (6, 2, 2),
                  (5, 5, 0), (5, 4, 1), (5, 3, 2), (4, 4, 2), (4, 3, 3)]


@lru_cache(maxsize=1)
def _gr310():
    return grassmannian(3, 10)


@lru_cache(maxsize=1)
def _schubert_gram() -> IntMatrix:
    return schubert_gram(_gr310(), SCHUBERT_BASIS, shift=(1,))


def _pairing_row(lam) -> list[int]:
    return schubert_gram(_gr310(), [lam], other=SCHUBERT_BASIS).to_rows()[0]


def _projection(row: list[int]) -> tuple[list, object]:
    g = _schubert_gram().to_rows()
    coeffs = solve_rational(g, row)
    sq = sum(coeffs[i] * g[i][j] * coeffs[j] for i in range(10) for j in range(10))
    return coeffs, sq


def _extended_gram(row: list[int], z_sq: int) -> list[list[int]]:
    g = _schubert_gram().to_rows()
    return [r + [x] for r, x in zip(g, row)] + [row + [int(z_sq)]]


def _div_witness(gram: list[list[int]]) -> int:
    """Divisibility of the dual-basis vector attached to the last invariant factor."""
    _, _, v = smith_normal_form(gram)
    x = [v[i, v.cols - 1] for i in range(v.rows)]
    return lat.divisibility(lat.Lattice.from_rows(gram), x)


def _z1_sq():
    return _projection(_pairing_row((4, 4, 3)))[1]


# --- scenarios -----------------------------------------------------------------

@register("divisor-degrees", "degrees of the three SL(V10)-invariant divisors", slow=True,
          takes_fixture=True)
def _divisor_degrees(ctx):
    vals = _tower(ctx, "divisor_degrees.tower")
    d = dict(vals)
    return vals + [("degrees", (d["d1"], d["d2"], d["d3"]))]


@register("schubert-gram", "intersection matrix of the restricted Schubert classes on X3")
def _schubert_gram_sc(ctx):
    g = _schubert_gram()
    return [("gram", g), ("det", det_exact(g)), ("disc_group", tuple(lat.disc_and_group(g)[1]))]


@register("vanishing-projection", "Schubert part of the Sigma443 class on X3")
def _vanishing_projection(ctx):
    row = _pairing_row((4, 4, 3))
    coeffs, sq = _projection(row)
    return [("pairing_row", tuple(row)), ("coeffs_times_11", tuple(int(11 * c) for c in coeffs)),
            ("z1_sq", sq)]


@register("sigma443-lattice", "lattice spanned by z and the restricted Schubert classes (Sigma443)")
def _sigma443(ctx):
    z1_sq = _z1_sq()
    res = hk.dv28_constants(hk.Case.CASE1, z1_sq)
    z_sq = res.values["z_sq"]
    g = _extended_gram(_pairing_row((4, 4, 3)), z_sq)
    snf, _, _ = smith_normal_form(g)
    return [("z_sq", z_sq), ("abs_det", abs(det_exact(g))), ("snf", tuple(snf)),
            ("div_witness", _div_witness(g))]


@register("sigma722-lattice", "lattice spanned by z and the restricted Schubert classes (Sigma722)")
def _sigma722(ctx):
    z_sq = dict(run_script_file(TOWERS / "k3_normal.tower").values)["c10_N"]
    row = _pairing_row((7, 2, 2))
    g = _extended_gram(row, z_sq)
    snf, _, _ = smith_normal_form(g)
    return [("pairing_row", tuple(row)), ("z_sq", z_sq), ("abs_det", abs(det_exact(g))),
            ("snf", tuple(snf)), ("div_witness", _div_witness(g))]


@register("k3-normal", "self-intersection of Gr(2,7) inside X3", takes_fixture=True)
def _k3_normal(ctx):
    return _tower(ctx, "k3_normal.tower")


@register("peskine", "relative Schubert classes on the Peskine sixfold", slow=True, takes_fixture=True)
def _peskine(ctx):
    return _tower(ctx, "peskine.tower")


@register("peskine-smoke", "small Gr(2,4)-based tower", takes_fixture=True)
def _smoke(ctx):
    return _tower(ctx, "smoke.tower")


@register("taut-check", "tautological bundles on the degree-6 K3 surface", takes_fixture=True)
def _taut(ctx):
    return _tower(ctx, "taut_check.tower")


@register("dv-divisor", "intersection numbers of H and D and the BBF Gram matrix", takes_fixture=True)
def _dv_divisor(ctx):
    vals = _tower(ctx, "dv_divisor.tower")
    d = dict(vals)
    quint = (d["d3"], d["d2h"], d["dh2"], d["h3"], d["h4"])
    data = _fujiki_data(d)
    g = hk.gram_from_degree4(data)
    q = [[int(x) for x in r] for r in g.q]
    disc, _ = lat.disc_and_group(q)
    diag = [[sum(a[i] * q[i][j] * b[j] for i in range(2) for j in range(2)) for b in ((1, 1), (0, 1))]
            for a in ((1, 1), (0, 1))]
    lam, H, D = lat.d24_fixture()
    hd = lat.Sublattice.of(lam, [H, D])
    perp = lat.orthogonal_complement(hd)
    hperp = lat.orthogonal_complement(lat.Sublattice.of(lam, [H]))
    return vals + [
        ("quintuple", quint), ("bbf_gram", q), ("disc", disc), ("gram_H+D_D", diag),
        ("fixture_gram", hd.gram), ("fixture_div_H", lat.divisibility(lam, H)),
        ("fixture_div_D", lat.divisibility(lam, D)),
        ("fixture_saturation_index", lat.saturate_and_index(hd)[1]),
        ("lambda_disc", abs(lam.det())), ("H_perp_disc", lat.disc_and_group(hperp)[0]),
        ("HD_perp_disc", lat.disc_and_group(perp)[0]),
    ]


def _fujiki_data(d: dict) -> dict:
    """Map (d³, d²h, dh², h³) on D and H⁴ on X6 to quadruple products.

    D restricted to itself has normal bundle K_D, so D·x·y·z = (x·y·z)|_D
    with D|_D = d: D⁴ = d³, D³H = d²h, D²H² = dh², DH³ = h³.
    """
    return {"D4": d["d3"], "HD3": d["d2h"], "H2D2": d["dh2"], "H3D": d["h3"], "H4": d["h4"]}


@register("plane-lattices", "lattices attached to Lagrangian planes and the Peskine classes")
def _plane_lattices(ctx):
    hl = lat.Lattice.from_rows([[22, 2], [2, -10]])
    glued = lat.adjoin_rational_vectors(hl.whole(), [[mpq(1, 2), mpq(1, 2)]])
    # H = 2g1 - g2 and λ = g2 in the glued basis
    _, idx = lat.saturate_and_index(lat.Sublattice.of(glued.lattice(), [[2, -1], [0, 1]]))
    zmat = [[15, 7, 6], [7, 4, 3], [6, 3, 5]]
    return [
        ("det_H_lambda", hl.det()),
        ("half_glue_gram", glued.gram), ("half_glue_det", det_exact(glued.gram)),
        ("half_glue_even", glued.lattice().is_even()),
        ("H_lambda_index_in_glued", idx),
        ("h3_pi_z_snf", tuple(smith_normal_form(zmat)[0])),
        ("s22_disc", lat.disc_and_group([[22, 0], [0, -2]])[0]),
        ("h3_pi_det", det_exact([[15, 7], [7, 4]])),
    ]


@register("nonrep", "modular obstructions to representing -10 and 28")
def _nonrep(ctx):
    f1, f2 = [[22, 2], [2, -2]], [[4, -4], [-4, -10]]
    out = []
    for label, f, t, mods in (("wall", f1, -10, (5, 25)), ("half_glue", f2, 28, (7, 49))):
        for m in mods:
            v = lat.nonrepresentability_mod(f, t, m)
            out.append((f"{label}_mod_{m}", v.label))
        out.append((f"{label}_search_50", len(lat.bounded_search(f, t, 50))))
    return out


def _rcs(v: lat.MukaiVector) -> tuple:
    """(r, c, s) with c written as 0 when it vanishes."""
    return (v.r, tuple(v.c) if any(v.c) else 0, v.s)


def _uu():
    return lat.lattice_build("U^2")


@register("mukai", "twisted Mukai lattice of the degree-6 K3 surface")
def _mukai(ctx):
    uu = _uu()
    h = (1, 3, 0, 0)
    out = []
    Bs = {}
    for label, A in (("A1", (1, 2, 1, 1)), ("A2", (2, 1, 1, 1))):
        B = lat.bfield_normalize(h, A)
        Bs[label] = B
        out += [(f"{label}_B", tuple(B)), (f"{label}_BB", uu.pair(B, B)), (f"{label}_Bh", uu.pair(B, h)),
                (f"{label}_glue_in_kernel", lat.glue_in_kernel(h, B, A)),
                (f"{label}_AA_mod_8", int(uu.pair(A, A)) % 8),
                (f"{label}_half_A_kernel_index", lat.kernel_mod_pairing(uu, A, 2)[1])]
    B = Bs["A1"]
    v = lat.MukaiVector.make(2, [2 * x for x in B], 0, uu)
    hv = lat.MukaiVector.make(0, h, 0, uu)
    u1 = [2 * a - 24 * b for a, b in zip(h, B)]
    eta = lat.MukaiVector.make(0, u1, uu.pair(u1, B), uu)
    out.append(("u1", tuple(u1)))
    prim = lat.orthogonal_complement(lat.Sublattice.of(uu, [h]))
    out += [("v_sq", lat.mukai_pairing(v, v)), ("h_sq", lat.mukai_pairing(hv, hv)),
            ("eta_u1", _rcs(eta)),
            ("brauer_kernel_index", lat.kernel_mod_pairing(prim, B, 1)[1]),
            ("untwisted_kernel_index", lat.kernel_mod_pairing(prim, [0, 0, 0, 0], 1)[1])]
    for label in ("A1", "A2"):
        idx, w = lat.twisted_embedding_index(lat.EmbeddingFixture(h, Bs[label]))
        out += [(f"{label}_embedding_index", idx), (f"{label}_witness", _rcs(w))]
    return out


@register("dv28-constants", "correspondence constants for the discriminant-28 divisor")
def _dv28(ctx):
    g = hk.HKGram.make(("H", "lam", "mu"), [[22, 2, 2], [2, -10, 2], [2, 2, -10]])
    lam, mu = g.basis("lam"), g.basis("mu")
    P, P2 = hk.plane_class(lam), hk.plane_class(mu)
    z1 = _z1_sq()
    c1 = hk.dv28_constants(hk.Case.CASE1, z1)
    c2 = hk.dv28_constants(hk.Case.CASE2, mpq(27, 11))
    w = g.vec(H=1, lam=-11)
    c = c1.values["c"]
    return [
        ("P_sq", hk.hk4_eval(g, P * P)), ("qv_lambda_sq", hk.hk4_eval(g, hk.qv() * hk.divisor_product(lam, lam))),
        ("P_P2", hk.hk4_eval(g, P * P2)), ("q_lambda_lambda2", hk.disjoint_planes_solve()),
        ("z1_sq", z1), ("case1_q_ll2", c1.values["q_ll'"]), ("case1_c", c), ("case1_z_sq", c1.values["z_sq"]),
        ("case1_z0_sq", c1.values["x0_sq"]), ("rejected_c", c1.rejected[-2]["c"]),
        ("rejected_z_sq", c1.rejected[-2]["z_sq"]),
        ("q_image_z0", c * c * g.pair(w, w)),
        ("case2_c", c2.values["c"]), ("case2_x1_sq", c2.values["x1_sq"]),
        ("case2_x0_sq", c2.values["x0_sq"]), ("case2_zh_sq", c2.values["zh_sq"]),
        ("x1_coeff_chosen_sign", c2.values["x1_coeff"]), ("x1_sign_note", c2.notes[0]), ("h3_pi_z_matrix", hk.h3_pi_z_matrix(c2)),
    ]


def _fixture_report(prefix: str, fx: tv.Fixture) -> list:
    case = fx.meta.get("case")
    if case not in (1, 2):
        raise ScenarioError("fixture needs a 'case = 1' or 'case = 2' line")
    r = tv.plane_fixture_check(case, fx.sigma, fx.subspaces or None)
    meet = tuple(i for row in r.intersection.basis for i, x in enumerate(row) if x)
    return [(f"{prefix}_checks_pass", r.ok), (f"{prefix}_failures", tuple(r.failures)),
            (f"{prefix}_meet_support", meet)]


@register("trivector-fixtures", "explicit trivectors with two disjoint planes", takes_fixture=True)
def _trivector_fixtures(ctx):
    rng = random.Random(ctx.seed)
    if ctx.fixture is not None:
        return _fixture_report("fixture", tv.load_fixture(ctx.fixture))
    out = []
    fx1 = tv.bundled_fixture("planes_case1.tri")
    fx2 = tv.bundled_fixture("planes_case2.tri")
    out += _fixture_report("case1", fx1) + _fixture_report("case2", fx2)
    s1, s2 = fx1.sigma, fx2.sigma
    line_pts = [(0, 0, 1, 0), (0, 0, 0, 1), (0, 0, 1, 1), (0, 0, 2, -3),
                (1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0), (3, -2, 0, 0)]
    out.append(("case1_line_max_rank", max(tv.skew_matrix_rank_at_point(1, s1, p) for p in line_pts)))
    out.append(("case2_point_rank", tv.skew_matrix_rank_at_point(2, s2, (1, 0, 0, 0))))
    for case, s in ((1, s1), (2, s2)):
        ranks, count = set(), 0
        while count < 100:
            x = [rng.randint(-50, 50) for _ in range(4)]
            if not any(x) or tv.on_special_components(case, x) or not tv.degeneracy_equation(case, s, x):
                continue
            ranks.add(tv.skew_matrix_rank_at_point(case, s, x))
            count += 1
        out.append((f"case{case}_offlocus_ranks", frozenset(ranks)))
    # X6 membership of V6 with V4 ⊂ V6 ⊂ V7
    v6 = tv.Subspace.coordinate((1, 2, 3, 4, 0, 5))
    out.append(("case1_V6_in_X6", tv.locus_membership(s1, v6).member))
    weights = [3] * 7 + [-7] * 3
    high = [t for t in itertools.combinations(range(10), 3) if max(t) >= 7]
    # large coefficients keep the random forms generic
    sv7 = tv.random_trivector(tv.QQ, rng, high, bound=10 ** 6)
    out.append(("hm_convention", "destabilized iff max support weight < 0"))
    out.append(("unstable_max_weight", tv.hm_weight_max(sv7, weights)))
    out.append(("generic_max_weight", tv.hm_weight_max(tv.parse_trivector("[012]"), weights)))
    # σ(V1, V6, V10) = 0 with V1 = <e0>, V6 = <e0..e5>
    allowed = [t for t in itertools.combinations(range(10), 3)
               if not (t[0] == 0 and t[1] <= 5)]
    s16 = tv.random_trivector(tv.QQ, rng, allowed, bound=10 ** 6)
    out.append(("d1610_contraction_rank", tv.contract_rank_kernel(s16, [1] + [0] * 9)[0]))
    return out


# --- running and reporting --------------------------------------------------------

@lru_cache(maxsize=1)
def load_goldens() -> dict:
    return json.loads(GOLDENS.read_text())


@contextmanager
def _deadline(seconds: float | None):
    if not seconds:
        yield
        return

    def handler(signum, frame):
        raise ScenarioTimeout(f"exceeded {seconds} s")

    old = signal.signal(signal.SIGALRM, handler)
    signal.setitimer(signal.ITIMER_REAL, seconds)
    try:
        yield
    finally:
        signal.setitimer(signal.ITIMER_REAL, 0)
        signal.signal(signal.SIGALRM, old)


def _caused_by_timeout(e: BaseException | None):
    while e is not None:
        if isinstance(e, ScenarioTimeout):
            return e
        e = e.__cause__ or e.__context__
    return None


def run_scenario(name: str, seed: int = 0, fixture=None, timeout: float | None = None,
                 timing: bool = True) -> Report:
    if name not in REGISTRY:
        raise ScenarioError(f"unknown scenario {name!r}")
    sc = REGISTRY[name]
    if fixture is not None and not sc.takes_fixture:
        raise ScenarioError(f"scenario {name!r} takes no fixture")
    gold = load_goldens().get(name, {})
    expected = gold.get("values" if fixture is None else "fixture_values", {})
    report = Report(name, sc.anchor)
    t0 = time.perf_counter()
    try:
        with _deadline(timeout):
            values = sc.run(Context(seed, Path(fixture) if fixture else None))
    except Exception as e:
        timed_out = _caused_by_timeout(e)
        report.status = "timeout" if timed_out else "error"
        report.error = str(timed_out) if timed_out else f"{type(e).__name__}: {e}"
        values = []
    report.elapsed_ms = int((time.perf_counter() - t0) * 1000) if timing else 0
    seen = set()
    for k, v in values:
        g = expected.get(k)
        rec = ValueRecord(k, canon(v), g["provenance"] if g else "computed",
                          g["value"] if g else None)
        report.values.append(rec)
        seen.add(k)
        if not rec.ok and report.status == "pass":
            report.status = "fail"
    if report.status == "pass" and set(expected) - seen:
        report.status = "fail"
        report.error = "missing values: " + ", ".join(sorted(set(expected) - seen))
    return report


def emit_report(r: Report, fmt: str = "text") -> str:
    if fmt == "json":
        doc = {"scenario": r.scenario, "anchor": r.anchor,
               "values": [{"name": v.name, "value": v.value, "provenance": v.provenance}
                          for v in r.values],
               "status": r.status, "elapsed_ms": r.elapsed_ms}
        if r.error:
            doc["error"] = r.error
        return json.dumps(doc, indent=2, ensure_ascii=False)
    if fmt != "text":
        raise ScenarioError(f"unknown format {fmt!r}")
    lines = [f"# {r.scenario}: {r.anchor}"]
    for v in r.values:
        mark = "" if v.ok else f"   (expected {v.expected})"
        lines.append(f"{v.name} = {v.value}{mark}")
    lines.append(f"status = {r.status}" + (f"   ({r.error})" if r.error else ""))
    lines.append(f"elapsed_ms = {r.elapsed_ms}")
    return "\n".join(lines)
