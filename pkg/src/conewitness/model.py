"""Prepare-measure devices and the accessible fragment they generate.

A multisource is a family of (possibly subnormalized) state vectors indexed by
setting and outcome; a multimeter is a family of effect covectors.  Everything
is held in the ambient coordinates of the underlying system; spans are cached
on the fragment and restriction to them happens where it is needed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .geometry import (
    DEFAULT_ZONOTOPE_CAP,
    CapExceeded,
    ConeH,
    ConeV,
    Subspace,
    Vector,
    dd_convert,
    dot,
    dual_cone,
    format_rational,
    hull_vertices,
    inverse,
    is_zero,
    polytope_contains,
    polytope_h,
    scale,
    span_basis,
    sub,
    vec,
    vsum,
    zeros,
    zonotope_vertices,
)

Label = str


class ValidationError(ValueError):
    pass


@dataclass(frozen=True)
class GptSystem:
    ambient_dim: int
    unit: Vector

    def __post_init__(self):
        if len(self.unit) != self.ambient_dim:
            raise ValidationError("unit effect has the wrong length")
        if is_zero(self.unit):
            raise ValidationError("unit effect must be nonzero")

    @classmethod
    def of(cls, unit) -> "GptSystem":
        u = vec(unit)
        return cls(len(u), u)


Device = tuple[tuple[Label, tuple[tuple[Label, Vector], ...]], ...]


def _freeze(entries: Mapping[Label, Mapping[Label, Sequence]], dim: int) -> Device:
    out = []
    for setting, outcomes in entries.items():
        if not outcomes:
            raise ValidationError(f"setting {setting!r} has no outcomes")
        frozen = []
        for label, v in outcomes.items():
            v = vec(v)
            if len(v) != dim:
                raise ValidationError(f"vector for ({setting!r}, {label!r}) has length {len(v)}, expected {dim}")
            frozen.append((str(label), v))
        out.append((str(setting), tuple(frozen)))
    if not out:
        raise ValidationError("a device needs at least one setting")
    return tuple(out)


@dataclass(frozen=True)
class _Device:
    system: GptSystem
    table: Device

    @property
    def settings(self) -> tuple[Label, ...]:
        return tuple(s for s, _ in self.table)

    def outcomes(self, setting: Label) -> tuple[Label, ...]:
        return tuple(a for a, _ in dict(self.table)[setting])

    @property
    def outcome_labels(self) -> tuple[Label, ...]:
        seen: dict[Label, None] = {}
        for _, outs in self.table:
            for a, _ in outs:
                seen.setdefault(a)
        return tuple(seen)

    def items(self):
        """``((setting, outcome), vector)`` pairs in canonical order."""
        for s, outs in self.table:
            for a, v in outs:
                yield (s, a), v

    def vectors(self) -> list[Vector]:
        return [v for _, v in self.items()]

    def __getitem__(self, key: tuple[Label, Label]) -> Vector:
        s, a = key
        return dict(dict(self.table)[s])[a]

    def as_dict(self) -> dict[Label, dict[Label, Vector]]:
        return {s: dict(outs) for s, outs in self.table}


@dataclass(frozen=True)
class Multisource(_Device):
    """Atomic states ``s_{a|x}``; every setting must be deterministic overall."""

    @classmethod
    def of(cls, system: GptSystem, states: Mapping[Label, Mapping[Label, Sequence]]) -> "Multisource":
        src = cls(system, _freeze(states, system.ambient_dim))
        src.validate()
        return src

    def validate(self) -> None:
        u = self.system.unit
        for x, outs in self.table:
            total = Fraction(0)
            for a, s in outs:
                w = dot(u, s)
                if not 0 <= w <= 1:
                    raise ValidationError(f"state ({x!r}, {a!r}) has normalization {w} outside [0, 1]")
                total += w
            if total != 1:
                raise ValidationError(
                    f"source setting {x!r} is not deterministic: outcome weights sum to {total}"
                )


@dataclass(frozen=True)
class Multimeter(_Device):
    """Atomic effects ``e_{b|y}``; the effects of every setting sum to the unit."""

    @classmethod
    def of(cls, system: GptSystem, effects: Mapping[Label, Mapping[Label, Sequence]]) -> "Multimeter":
        meter = cls(system, _freeze(effects, system.ambient_dim))
        meter.validate()
        return meter

    def validate(self) -> None:
        u = self.system.unit
        for y, outs in self.table:
            total = vsum((e for _, e in outs), self.system.ambient_dim)
            if total != u:
                raise ValidationError(f"meter setting {y!r} is incomplete: effects do not sum to the unit")


@dataclass(frozen=True)
class SubstochasticComb:
    """Classical pre/post-processing ``c_{ax} = sum_z q(x, z) r(a, z)``."""

    weights: Mapping[tuple[Label, Label], Fraction]  # (x, z) -> q
    responses: Mapping[tuple[Label, Label], Fraction]  # (a, z) -> r

    def __post_init__(self):
        if any(v < 0 for v in self.weights.values()):
            raise ValidationError("comb weights must be nonnegative")
        if sum(self.weights.values(), Fraction(0)) > 1:
            raise ValidationError("comb weights must sum to at most one")
        if any(not 0 <= v <= 1 for v in self.responses.values()):
            raise ValidationError("comb responses must lie in [0, 1]")

    @property
    def aux_labels(self) -> tuple[Label, ...]:
        return tuple(sorted({z for _, z in self.weights} | {z for _, z in self.responses}))

    def coefficient(self, x: Label, a: Label) -> Fraction:
        return sum(
            (q * self.responses.get((a, z), Fraction(0)) for (xx, z), q in self.weights.items() if xx == x),
            Fraction(0),
        )

    @classmethod
    def deterministic(cls, x: Label, a: Label) -> "SubstochasticComb":
        return cls({(x, "0"): Fraction(1)}, {(a, "0"): Fraction(1)})


def _apply_comb(device: _Device, comb: SubstochasticComb) -> Vector:
    settings = set(device.settings)
    labels = set(device.outcome_labels)
    if any(x not in settings for x, _ in comb.weights) or any(a not in labels for a, _ in comb.responses):
        raise ValidationError("comb labels do not match the device")
    dim = device.system.ambient_dim
    return vsum((scale(comb.coefficient(x, a), v) for (x, a), v in device.items()), dim)


def apply_comb_state(p: Multisource, c: SubstochasticComb) -> Vector:
    return _apply_comb(p, c)


def apply_comb_effect(m: Multimeter, d: SubstochasticComb) -> Vector:
    return _apply_comb(m, d)


def _accessible_polytope(device: _Device, cap: int, extra: Sequence[Vector] = ()) -> list[Vector]:
    dim = device.system.ambient_dim
    points = [zeros(dim), *extra]
    for _, outs in device.table:
        points.extend(zonotope_vertices([v for _, v in outs], cap=cap))
    return hull_vertices(points)


def accessible_state_polytope(p: Multisource, cap: int = DEFAULT_ZONOTOPE_CAP) -> list[Vector]:
    """Vertices of the hull of the origin and the per-setting zonotopes."""
    return _accessible_polytope(p, cap)


def accessible_effect_polytope(m: Multimeter, cap: int = DEFAULT_ZONOTOPE_CAP) -> list[Vector]:
    if m is None or not m.table:
        raise ValidationError("empty meter set")
    return _accessible_polytope(m, cap, extra=[m.system.unit])


@dataclass(frozen=True)
class ProbabilityTable:
    entries: Mapping[tuple[Label, Label], Mapping[tuple[Label, Label], Fraction]]

    def __getitem__(self, key: tuple[Label, Label, Label, Label]) -> Fraction:
        a, b, x, y = key
        return self.entries[(x, y)][(a, b)]


def probability_table(p: Multisource, m: Multimeter) -> ProbabilityTable:
    if p.system != m.system:
        raise ValidationError("source and meter act on different systems")
    entries = {}
    for x, souts in p.table:
        for y, mouts in m.table:
            entries[(x, y)] = {(a, b): dot(e, s) for a, s in souts for b, e in mouts}
    return ProbabilityTable(entries)


@dataclass(frozen=True)
class Fragment:
    """Atomic state and effect generators (unit included) of an accessible fragment.

    ``relaxed`` fragments skip the physical validity checks and may hold
    arbitrary state/effect subsets.
    """

    system: GptSystem
    state_generators: tuple[Vector, ...]
    effect_generators: tuple[Vector, ...]
    state_span: Subspace = field(compare=False)
    effect_span: Subspace = field(compare=False)
    provenance: Optional[tuple[Multisource, Multimeter]] = field(default=None, compare=False)
    relaxed: bool = False

    @property
    def unit(self) -> Vector:
        return self.system.unit

    @classmethod
    def from_generators(cls, system: GptSystem, states, effects, *, provenance=None, relaxed=False) -> "Fragment":
        states = tuple(vec(s) for s in states)
        effects = tuple(vec(e) for e in effects)
        if system.unit not in effects:
            effects = effects + (system.unit,)
        frag = cls(
            system,
            states,
            effects,
            span_basis(states, system.ambient_dim),
            span_basis(effects, system.ambient_dim),
            provenance,
            relaxed,
        )
        if not relaxed:
            frag.validate()
        return frag

    def validate(self) -> None:
        for i, s in enumerate(self.state_generators):
            if dot(self.unit, s) > 1:
                raise ValidationError(f"state generator {i} is supernormalized")
            for j, e in enumerate(self.effect_generators):
                p = dot(e, s)
                if not 0 <= p <= 1:
                    raise ValidationError(
                        f"pairing of effect {j} with state {i} is {format_rational(p)}, outside [0, 1]"
                    )

    @property
    def state_cone(self) -> ConeV:
        return ConeV.of(self.state_generators, self.system.ambient_dim)

    @property
    def effect_cone(self) -> ConeV:
        return ConeV.of(self.effect_generators, self.system.ambient_dim)

    def pairing_matrix(self) -> tuple[Vector, ...]:
        """The probability rule in span bases: rows index effect-span basis, columns state-span basis."""
        return tuple(
            tuple(dot(f, s) for s in self.state_span.basis) for f in self.effect_span.basis
        )

    def state_polytope(self, cap: int = DEFAULT_ZONOTOPE_CAP) -> list[Vector]:
        if self.provenance is None:
            return hull_vertices([zeros(self.system.ambient_dim), *self.state_generators])
        return accessible_state_polytope(self.provenance[0], cap)

    def effect_polytope(self, cap: int = DEFAULT_ZONOTOPE_CAP) -> list[Vector]:
        if self.provenance is None:
            return hull_vertices([zeros(self.system.ambient_dim), *self.effect_generators])
        return accessible_effect_polytope(self.provenance[1], cap)


def fragment_from_pm(p: Multisource, m: Multimeter) -> Fragment:
    if p.system != m.system:
        raise ValidationError("source and meter act on different systems")
    for (x, a), s in p.items():
        for (y, b), e in m.items():
            w = dot(e, s)
            if not 0 <= w <= 1:
                raise ValidationError(
                    f"p({a},{b}|{x},{y}) = {format_rational(w)} is not a probability"
                )
    return Fragment.from_generators(p.system, p.vectors(), m.vectors(), provenance=(p, m))


def complement_effect(f: Fragment, e, cap: int = DEFAULT_ZONOTOPE_CAP) -> Vector:
    """``u - e``, after checking that both ``e`` and its complement are accessible."""
    e = vec(e)
    vertices = f.effect_polytope(cap)
    if not polytope_contains(vertices, e):
        raise ValidationError("effect is not accessible in this fragment")
    comp = sub(f.unit, e)
    if not polytope_contains(vertices, comp):
        raise AssertionError("complement of an accessible effect left the effect polytope")
    return comp


@dataclass(frozen=True)
class LogicallyPossibleStates:
    """``{s in state span : g(s) >= 0 for every effect generator g, u(s) <= 1}``.

    ``nonnegativity`` is the canonical facet description of that cone inside the
    state span; two fragments with the same effect cone and state span produce
    identical values.
    """

    nonnegativity: ConeH
    unit: Vector

    def contains(self, s) -> bool:
        s = vec(s)
        return self.nonnegativity.contains(s) and dot(self.unit, s) <= 1


def logically_possible_states(f: Fragment) -> LogicallyPossibleStates:
    span = f.state_span
    shadow = ConeV.of(
        [span_representative(span, g) for g in f.effect_generators], f.system.ambient_dim
    )
    cone = dual_cone(shadow, span)
    return LogicallyPossibleStates(dd_convert(cone), span_representative(span, f.unit))


def span_representative(span: Subspace, functional) -> Vector:
    """The vector in ``span`` that represents ``functional`` restricted to ``span``."""
    if not span.dim:
        return zeros(span.ambient_dim)
    gram = [[dot(a, b) for b in span.basis] for a in span.basis]
    vals = span.values(functional)
    return span.lift([dot(row, vals) for row in inverse(gram)])


def _generator_groups(f: Fragment, effects: bool) -> list[list[Vector]]:
    """Zonotope generator lists whose hull (with the origin) is the accessible polytope."""
    if f.provenance is None:
        return [[g] for g in (f.effect_generators if effects else f.state_generators)]
    device = f.provenance[1] if effects else f.provenance[0]
    groups = [[v for _, v in outs] for _, outs in device.table]
    return groups + [[f.unit]] if effects else groups


def _subset_sums(gens: Sequence[Vector], dim: int, cap: int) -> list[Vector]:
    if len(gens) > cap:
        raise CapExceeded(f"{len(gens)} zonotope generators exceed the cap of {cap}")
    out = {zeros(dim)}
    for g in gens:
        out |= {tuple(a + b for a, b in zip(p, g)) for p in out}
    return list(out)


def subfragment_check(inner: Fragment, outer: Fragment, cap: int = DEFAULT_ZONOTOPE_CAP, method: str = "facets") -> bool:
    """Are the accessible state and effect polytopes of ``inner`` inside those of ``outer``?

    ``facets`` takes a facet description of each outer polytope and tests every
    inner zonotope against it in closed form; ``vertices`` enumerates inner
    vertices and tests them by LP.
    """
    if inner.system != outer.system:
        raise ValidationError("fragments live on different systems")
    if method == "vertices":
        outer_states = outer.state_polytope(cap)
        outer_effects = outer.effect_polytope(cap)
        return all(polytope_contains(outer_states, v) for v in inner.state_polytope(cap)) and all(
            polytope_contains(outer_effects, v) for v in inner.effect_polytope(cap)
        )
    if method != "facets":
        raise ValueError(f"unknown method {method!r}")
    dim = inner.system.ambient_dim
    for effects in (False, True):
        points = [p for g in _generator_groups(outer, effects) for p in _subset_sums(g, dim, cap)]
        hull = polytope_h(points)
        if not all(hull.contains_zonotope(g) for g in _generator_groups(inner, effects)):
            return False
    return True
