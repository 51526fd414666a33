#!/usr/bin/env python3
"""Replay scenarios and write one JSON report per scenario.

    python3 scripts/replay.py --out runs/ --skip-slow
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from hkschubert.scenarios import REGISTRY, emit_report, run_scenario


@dataclass
class ReplayConfig:
    out: Path
    names: tuple = ()
    seed: int = 0
    skip_slow: bool = False
    timeout: float | None = None


def replay(cfg: ReplayConfig) -> int:
    cfg.out.mkdir(parents=True, exist_ok=True)
    names = cfg.names or tuple(n for n, s in REGISTRY.items() if not (cfg.skip_slow and s.slow))
    failed = 0
    for n in names:
        r = run_scenario(n, seed=cfg.seed, timeout=cfg.timeout, timing=False)
        (cfg.out / f"{n}.json").write_text(emit_report(r, "json") + "\n")
        print(f"{n:22s} {r.status}")
        failed += not r.passed
    return failed


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("names", nargs="*")
    ap.add_argument("--out", type=Path, default=Path("runs"))
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--skip-slow", action="store_true")
    ap.add_argument("--timeout", type=float)
    a = ap.parse_args(argv)
    cfg = ReplayConfig(a.out, tuple(a.names), a.seed, a.skip_slow, a.timeout)
    return 1 if replay(cfg) else 0


if __name__ == "__main__":
    sys.exit(main())
