"""Device-level constructions: flag-convexification, inefficiency and noise."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .geometry import Q, scale, vsum
from .model import Label, Multimeter, Multisource, ValidationError

NULL_OUTCOME = "*"
FLAG_SETTING = "flag"


def pair_label(outcome: Label, setting: Label) -> Label:
    return f"({outcome},{setting})"


@dataclass(frozen=True)
class FullSupportDistribution:
    weights: Mapping[Label, Fraction]

    def __post_init__(self):
        if any(Q(w) <= 0 for w in self.weights.values()):
            raise ValidationError("distribution must have full support (all weights > 0)")
        if sum((Q(w) for w in self.weights.values()), Fraction(0)) != 1:
            raise ValidationError("distribution weights must sum to one")

    @classmethod
    def uniform(cls, labels) -> "FullSupportDistribution":
        labels = list(labels)
        return cls({x: Fraction(1, len(labels)) for x in labels})


@dataclass(frozen=True)
class InefficiencyParams:
    """Probability ``alpha[(b, y)]`` that outcome ``b`` of setting ``y`` is lost."""

    alpha: Mapping[tuple[Label, Label], Fraction]

    def __post_init__(self):
        for key, a in self.alpha.items():
            if not 0 <= Q(a) < 1:
                raise ValidationError(f"alpha{key} = {a} is outside [0, 1)")

    @classmethod
    def constant(cls, meter: Multimeter, value) -> "InefficiencyParams":
        return cls({(b, y): Q(value) for (y, b), _ in meter.items()})


@dataclass(frozen=True)
class NoiseParams:
    """Probability ``beta[(b, y)]`` that outcome ``b`` of setting ``y`` is kept."""

    beta: Mapping[tuple[Label, Label], Fraction]

    def __post_init__(self):
        for key, b in self.beta.items():
            if not 0 < Q(b) <= 1:
                raise ValidationError(f"beta{key} = {b} is outside (0, 1]")

    @classmethod
    def constant(cls, meter: Multimeter, value) -> "NoiseParams":
        return cls({(b, y): Q(value) for (y, b), _ in meter.items()})


def _check_support(dist: FullSupportDistribution, settings) -> None:
    if set(dist.weights) != set(settings):
        missing = sorted(set(settings) - set(dist.weights))
        extra = sorted(set(dist.weights) - set(settings))
        raise ValidationError(f"distribution support mismatch (missing {missing}, unknown {extra})")


def flag_convexify_source(p: Multisource, mu: FullSupportDistribution) -> Multisource:
    """Sample the setting from ``mu`` and report it as part of the outcome."""
    _check_support(mu, p.settings)
    outcomes = {
        pair_label(a, x): scale(Q(mu.weights[x]), s) for (x, a), s in p.items()
    }
    return Multisource.of(p.system, {FLAG_SETTING: outcomes})


def flag_convexify_meter(m: Multimeter, nu: FullSupportDistribution) -> Multimeter:
    _check_support(nu, m.settings)
    outcomes = {
        pair_label(b, y): scale(Q(nu.weights[y]), e) for (y, b), e in m.items()
    }
    return Multimeter.of(m.system, {FLAG_SETTING: outcomes})


def _covers(params: Mapping, meter: Multimeter, name: str) -> None:
    missing = [(b, y) for (y, b), _ in meter.items() if (b, y) not in params]
    if missing:
        raise ValidationError(f"{name} does not cover outcomes {missing}")


def apply_inefficiency(m: Multimeter, params: InefficiencyParams) -> Multimeter:
    """Each outcome ``b`` of setting ``y`` is flipped to the null outcome with probability alpha."""
    _covers(params.alpha, m, "alpha")
    if NULL_OUTCOME in m.outcome_labels:
        raise ValidationError(f"meter already uses the reserved outcome {NULL_OUTCOME!r}")
    dim = m.system.ambient_dim
    out = {}
    for y, outs in m.table:
        row = {b: scale(1 - Q(params.alpha[(b, y)]), e) for b, e in outs}
        row[NULL_OUTCOME] = vsum((scale(Q(params.alpha[(b, y)]), e) for b, e in outs), dim)
        out[y] = row
    return Multimeter.of(m.system, out)


def apply_noise(m: Multimeter, params: NoiseParams) -> Multimeter:
    """Keep outcome ``b`` with probability beta, otherwise resample uniformly over the outcomes."""
    _covers(params.beta, m, "beta")
    dim = m.system.ambient_dim
    out = {}
    for y, outs in m.table:
        k = len(outs)
        mixed = vsum((scale((1 - Q(params.beta[(b, y)])) / k, e) for b, e in outs), dim)
        out[y] = {b: vsum([scale(Q(params.beta[(b, y)]), e), mixed], dim) for b, e in outs}
    return Multimeter.of(m.system, out)


def postprocess(m: Multimeter, channel: Mapping[Label, Mapping[Label, Mapping[Label, Fraction]]]) -> Multimeter:
    """Generic outcome relabelling ``e'_{b'|y} = sum_b P(b'|b, y) e_{b|y}``.

    ``channel[y][b][b']`` must be a stochastic row for every ``(b, y)``.
    """
    dim = m.system.ambient_dim
    out = {}
    for y, outs in m.table:
        if y not in channel:
            raise ValidationError(f"channel has no entry for setting {y!r}")
        targets: dict[Label, None] = {}
        for b, _ in outs:
            row = channel[y].get(b)
            if row is None:
                raise ValidationError(f"channel has no row for outcome {b!r} of setting {y!r}")
            if any(Q(v) < 0 for v in row.values()) or sum((Q(v) for v in row.values()), Fraction(0)) != 1:
                raise ValidationError(f"channel row ({b!r}, {y!r}) is not stochastic")
            for t in row:
                targets.setdefault(t)
        out[y] = {
            t: vsum((scale(Q(channel[y][b].get(t, 0)), e) for b, e in outs), dim) for t in targets
        }
    return Multimeter.of(m.system, out)
