"""Verdicts of random fragments against their flag-convexified and inefficient versions.

    python scripts/verdict_invariance_sweep.py --count 200 --out sweep.csv
"""

from __future__ import annotations

import argparse
import csv
import random
import sys
import time
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

from conewitness.classicality import check_verdict, simplicial_cone_embed
from conewitness.corpus import random_pm, random_spec
from conewitness.model import fragment_from_pm
from conewitness.transforms import (
    FullSupportDistribution,
    InefficiencyParams,
    apply_inefficiency,
    flag_convexify_meter,
    flag_convexify_source,
)


@dataclass(frozen=True)
class SweepConfig:
    count: int = 200
    first_seed: int = 0
    max_dim: int = 4
    max_settings: int = 3
    max_outcomes: int = 3
    max_alpha: str = "9/10"
    out: str = "-"


def _dist(rng: random.Random, labels) -> FullSupportDistribution:
    raw = [rng.randint(1, 6) for _ in labels]
    return FullSupportDistribution({x: Fraction(w, sum(raw)) for x, w in zip(labels, raw)})


def run(cfg: SweepConfig) -> list[dict]:
    max_alpha = Fraction(cfg.max_alpha)
    rows = []
    for seed in range(cfg.first_seed, cfg.first_seed + cfg.count):
        spec = random_spec(seed, cfg.max_dim, cfg.max_settings, cfg.max_outcomes)
        p, m = random_pm(spec)
        rng = random.Random(seed)
        mu, nu = _dist(rng, p.settings), _dist(rng, m.settings)
        alpha = InefficiencyParams(
            {(b, y): max_alpha * Fraction(rng.randint(0, 100), 100) for (y, b), _ in m.items()}
        )
        start = time.perf_counter()
        variants = {
            "original": fragment_from_pm(p, m),
            "flagged": fragment_from_pm(flag_convexify_source(p, mu), flag_convexify_meter(m, nu)),
            "inefficient": fragment_from_pm(p, apply_inefficiency(m, alpha)),
        }
        verdicts = {k: simplicial_cone_embed(f) for k, f in variants.items()}
        row = {
            "seed": seed,
            "dim": spec.ambient_dim,
            "kind": spec.kind,
            **{k: int(v.embeddable) for k, v in verdicts.items()},
            "witnesses_ok": int(all(check_verdict(variants[k], v) for k, v in verdicts.items())),
            "agree": int(len({v.embeddable for v in verdicts.values()}) == 1),
            "seconds": round(time.perf_counter() - start, 4),
        }
        rows.append(row)
    return rows


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    for f in fields(SweepConfig):
        parser.add_argument(f"--{f.name.replace('_', '-')}", type=type(f.default), default=f.default)
    cfg = SweepConfig(**vars(parser.parse_args(argv)))
    rows = run(cfg)
    fh = sys.stdout if cfg.out == "-" else open(cfg.out, "w", newline="")
    writer = csv.DictWriter(fh, fieldnames=list(rows[0]))
    writer.writeheader()
    writer.writerows(rows)
    if fh is not sys.stdout:
        fh.close()
    disagree = sum(1 - r["agree"] for r in rows)
    negatives = sum(1 - r["original"] for r in rows)
    print(f"# {asdict(cfg)}: {len(rows)} fragments, {negatives} not embeddable, {disagree} disagreements",
          file=sys.stderr)
    return int(disagree > 0)


if __name__ == "__main__":
    sys.exit(main())
