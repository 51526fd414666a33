#!/usr/bin/env python3
"""Recompute the invariant divisor degrees by torus localization.

Uses the test oracle in tests/localization.py, which shares no code with
the package, and prints the three degrees next to the package's goldens.
"""
import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))

import localization as loc  # noqa: E402

CASES = {
    "d1": ([3, 7], lambda r: loc.dual(loc.ext(3, r[0]) + loc.tensor(loc.ext(2, r[0]), r[1]))),
    "d2": ([1, 5, 4], lambda r: loc.dual(loc.tensor(r[0], loc.ext(2, r[1]))
                                        + loc.tensor(loc.tensor(r[0], r[1]), r[2]))),
    "d3": ([4, 3, 3], lambda r: loc.dual(loc.ext(3, r[0]) + loc.tensor(loc.ext(2, r[0]), r[1])
                                        + loc.tensor(r[0], loc.ext(2, r[1])))),
}

if __name__ == "__main__":
    gold = json.loads((ROOT / "src/hkschubert/data/goldens.json").read_text())["divisor-degrees"]["values"]
    for name, (ranks, bundle) in CASES.items():
        d = loc.flag_dim(ranks)
        val = loc.integrate(ranks, lambda r: loc.chern_series(bundle(r), upto=d)[d])
        print(f"{name}: localization {val}, golden {gold[name]['value']}")
