"""Bisect the uniform keep-probability beta at which a builtin stops being embeddable.

    python scripts/noise_threshold.py --corpus qubit-pom --tolerance 1/1024
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from fractions import Fraction

from conewitness.classicality import cone_equivalent, simplicial_cone_embed
from conewitness.corpus import builtin
from conewitness.geometry import format_rational
from conewitness.model import fragment_from_pm
from conewitness.transforms import NoiseParams, apply_noise


@dataclass(frozen=True)
class ThresholdConfig:
    corpus: str = "qubit-pom"
    low: str = "1/100"
    high: str = "1"
    tolerance: str = "1/1024"


def embeddable_at(name: str, beta: Fraction) -> bool:
    e = builtin(name)
    return simplicial_cone_embed(fragment_from_pm(e.source, apply_noise(e.meter, NoiseParams.constant(e.meter, beta)))).embeddable


def bisect(cfg: ThresholdConfig) -> dict:
    lo, hi, tol = Fraction(cfg.low), Fraction(cfg.high), Fraction(cfg.tolerance)
    if not embeddable_at(cfg.corpus, lo) or embeddable_at(cfg.corpus, hi):
        raise SystemExit(f"no sign change of the verdict on [{cfg.low}, {cfg.high}]")
    steps = []
    while hi - lo > tol:
        mid = (lo + hi) / 2
        ok = embeddable_at(cfg.corpus, mid)
        steps.append((format_rational(mid), ok))
        lo, hi = (mid, hi) if ok else (lo, mid)
    e = builtin(cfg.corpus)
    base = fragment_from_pm(e.source, e.meter)

    def equivalent(beta):
        return cone_equivalent(base, fragment_from_pm(e.source, apply_noise(e.meter, NoiseParams.constant(e.meter, beta))))

    return {
        "config": asdict(cfg),
        "beta_embeddable": format_rational(lo),
        "beta_not_embeddable": format_rational(hi),
        "cone_equivalent_at_bounds": [equivalent(lo), equivalent(hi)],
        "steps": steps,
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    for name, default in asdict(ThresholdConfig()).items():
        parser.add_argument(f"--{name}", default=default)
    result = bisect(ThresholdConfig(**vars(parser.parse_args(argv))))
    json.dump(result, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
