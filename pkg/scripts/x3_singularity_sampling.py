#!/usr/bin/env python3
"""Heuristic smoothness probe for hyperplane sections X3 of Gr(3, 10).

Draws random points of X3 for random trivectors over F_p and counts
singular ones.  Finding none is evidence, not a proof, of smoothness.
"""
from __future__ import annotations

import argparse
import random
from dataclasses import dataclass

from hkschubert import trivector as tv


@dataclass
class SamplingConfig:
    prime: int = 10007
    trivectors: int = 5
    points: int = 200
    seed: int = 0


def run(cfg: SamplingConfig) -> list[int]:
    rng = random.Random(cfg.seed)
    F = tv.GF(cfg.prime)
    out = []
    for i in range(cfg.trivectors):
        s = tv.random_trivector(F, rng)
        out.append(tv.sample_x3_singular(s, cfg.points, seed=cfg.seed + i))
    return out


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f in SamplingConfig.__dataclass_fields__.values():
        ap.add_argument(f"--{f.name}", type=int, default=f.default)
    cfg = SamplingConfig(**vars(ap.parse_args()))
    counts = run(cfg)
    print(f"singular points found per trivector over F_{cfg.prime}: {counts}")
