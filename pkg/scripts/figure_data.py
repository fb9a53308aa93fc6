"""Polygon and ray data for the zonotope, cone-equivalence and noise figures.

Writes one JSON file per figure into ``--out-dir``; nothing is drawn.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from conewitness.corpus import builtin
from conewitness.model import fragment_from_pm
from conewitness.report import emit_geometry, ray_set

REBIT_PLANE = ((0, 1, 0), (0, 0, 1))


@dataclass(frozen=True)
class FigureConfig:
    out_dir: str = "figures"
    cap: int = 16


def figure_entries(name: str, cap: int) -> dict:
    e = builtin(name)
    out = {"main": emit_geometry(fragment_from_pm(e.source, e.meter), REBIT_PLANE, cap)}
    for label, p, m in e.companions:
        out[label] = emit_geometry(fragment_from_pm(p, m), REBIT_PLANE, cap)
    return out


def build(cfg: FigureConfig) -> dict[str, dict]:
    figs = {name: figure_entries(name, cfg.cap) for name in ("fig1-instance", "fig2-pair", "fig3-triple")}
    fig2, fig3 = figs["fig2-pair"], figs["fig3-triple"]
    figs["fig2-pair"]["same_state_rays"] = ray_set(fig2["main"], "state") == ray_set(fig2["outer"], "state")
    figs["fig3-triple"]["inefficient_same_effect_rays"] = ray_set(fig3["main"], "effect") == ray_set(fig3["inefficient"], "effect")
    figs["fig3-triple"]["noisy_same_effect_rays"] = ray_set(fig3["main"], "effect") == ray_set(fig3["noisy"], "effect")
    return figs


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    parser.add_argument("--out-dir", default=FigureConfig.out_dir)
    parser.add_argument("--cap", type=int, default=FigureConfig.cap)
    cfg = FigureConfig(**vars(parser.parse_args(argv)))
    os.makedirs(cfg.out_dir, exist_ok=True)
    for name, data in build(cfg).items():
        path = os.path.join(cfg.out_dir, f"{name}.json")
        with open(path, "w") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
