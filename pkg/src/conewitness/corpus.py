"""Built-in example devices and a seeded random generator.

Qubit convention: a state is ``(1, x, y, z)`` times its weight, an effect is
``1/2 (e0, e1, e2, e3)`` and the probability is the plain dot product, so
stabilizer data stays rational.  Real-qubit (rebit) examples drop ``y``.

Random devices use :class:`random.Random` (MT19937) seeded with the
``RandomSpec`` seed, which makes them reproducible on any CPython.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .geometry import ConeV, dot, extreme_rays, scale
from .model import GptSystem, Multimeter, Multisource, ValidationError
from .transforms import InefficiencyParams, NoiseParams, apply_inefficiency, apply_noise

H = Fraction(1, 2)


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    source: Multisource
    meter: Multimeter
    notes: str = ""
    companions: tuple[tuple[str, Multisource, Multimeter], ...] = field(default=())


def _qubit_state(x, y, z, w=Fraction(1)):
    return [w, w * x, w * y, w * z]


def _qubit_effect(x, y, z):
    return [H, H * x, H * y, H * z]


QUBIT = GptSystem.of([1, 0, 0, 0])

# Pauli matrices over Gaussian rationals: entries are (real, imag) pairs.
_PAULI = (
    (((1, 0), (0, 0)), ((0, 0), (1, 0))),
    (((0, 0), (1, 0)), ((1, 0), (0, 0))),
    (((0, 0), (0, -1)), ((0, 1), (0, 0))),
    (((1, 0), (0, 0)), ((0, 0), (-1, 0))),
)


def _operator(coeffs) -> list[list[tuple[Fraction, Fraction]]]:
    out = [[(Fraction(0), Fraction(0))] * 2 for _ in range(2)]
    for c, m in zip(coeffs, _PAULI):
        for i in range(2):
            for j in range(2):
                re, im = out[i][j]
                out[i][j] = (re + c * m[i][j][0], im + c * m[i][j][1])
    return out


def born_probability(state, effect) -> Fraction:
    """Tr(rho E) with rho = (w/2)(I + r.sigma) and E = (1/2)(e0 I + e.sigma)."""
    rho = _operator([Fraction(x) / 2 for x in state])
    eff = _operator([Fraction(x) for x in effect])
    re = im = Fraction(0)
    for i in range(2):
        for k in range(2):
            (a, b), (c, d) = rho[i][k], eff[k][i]
            re += a * c - b * d
            im += a * d + b * c
    if im != 0:
        raise AssertionError("trace of a product of Hermitian operators is not real")
    return re


def _born_cross_check(source: Multisource, meter: Multimeter) -> None:
    for _, s in source.items():
        for key, e in meter.items():
            if born_probability(s, e) != dot(e, s):
                raise AssertionError(f"quantum fixture disagrees with the density-operator rule at {key}")
REBIT = GptSystem.of([1, 0, 0])


def classical_simplex(k: int) -> CorpusEntry:
    if k < 1:
        raise ValueError("k must be positive")
    system = GptSystem.of([1] * k)
    basis = [[int(i == j) for j in range(k)] for i in range(k)]
    source = Multisource.of(system, {str(i): {"0": basis[i]} for i in range(k)})
    meter = Multimeter.of(system, {"0": {str(i): basis[i] for i in range(k)}})
    return CorpusEntry(f"classical-simplex-{k}", source, meter, "deterministic preparations of the k vertices of a simplex, one complete readout")


def classical_bit() -> CorpusEntry:
    entry = classical_simplex(2)
    return CorpusEntry("classical-bit", entry.source, entry.meter, "two orthogonal preparations and their readout")


def gbit_square() -> CorpusEntry:
    system = GptSystem.of([1, 0, 0])
    source = Multisource.of(
        system,
        {"0": {"0": [1, 1, 0]}, "1": {"0": [1, -1, 0]}, "2": {"0": [1, 0, 1]}, "3": {"0": [1, 0, -1]}},
    )
    meter = Multimeter.of(
        system,
        {"0": {"0": [H, H, H], "1": [H, -H, -H]}, "1": {"0": [H, H, -H], "1": [H, -H, H]}},
    )
    return CorpusEntry("gbit-square", source, meter, "square (boxworld) bit: diamond states with the four extremal effects")


def qubit_stabilizer() -> CorpusEntry:
    axes = {"X": (1, 0, 0), "Y": (0, 1, 0), "Z": (0, 0, 1)}
    source = Multisource.of(
        QUBIT,
        {k: {"+": _qubit_state(*v, w=H), "-": _qubit_state(*(-t for t in v), w=H)} for k, v in axes.items()},
    )
    meter = Multimeter.of(
        QUBIT, {k: {"+": _qubit_effect(*v), "-": _qubit_effect(*(-t for t in v))} for k, v in axes.items()}
    )
    _born_cross_check(source, meter)
    return CorpusEntry(
        "qubit-stabilizer", source, meter,
        "six stabilizer states as three fair two-outcome sources; Pauli X, Y, Z readouts",
    )


POM_AXES = {"D": (Fraction(3, 5), Fraction(4, 5)), "E": (Fraction(3, 5), Fraction(-4, 5))}


def qubit_pom() -> CorpusEntry:
    """Parity-oblivious multiplexing: +-X, +-Z encodings, readouts on rational tilted axes."""
    states = {"00": (1, 0, 0), "11": (-1, 0, 0), "01": (0, 0, 1), "10": (0, 0, -1)}
    source = Multisource.of(QUBIT, {k: {"0": _qubit_state(*v)} for k, v in states.items()})
    meter = Multimeter.of(
        QUBIT,
        {
            k: {"+": _qubit_effect(cx, 0, cz), "-": _qubit_effect(-cx, 0, -cz)}
            for k, (cx, cz) in POM_AXES.items()
        },
    )
    _born_cross_check(source, meter)
    return CorpusEntry(
        "qubit-pom", source, meter,
        "four parity-oblivious encodings (+-X, +-Z); readouts along (3/5, 4/5) and (3/5, -4/5) in the x-z plane",
    )


def toy_bit() -> CorpusEntry:
    """Epistemically restricted bit on four ontic states, square fragment (two conjugate pairs)."""
    q = Fraction(1, 4)
    system = GptSystem.of([1, 1, 1, 1])
    source = Multisource.of(
        system,
        {
            "X": {"+": [q, q, 0, 0], "-": [0, 0, q, q]},
            "Z": {"+": [q, 0, q, 0], "-": [0, q, 0, q]},
        },
    )
    meter = Multimeter.of(
        system,
        {"X": {"+": [1, 1, 0, 0], "-": [0, 0, 1, 1]}, "Z": {"+": [1, 0, 1, 0], "-": [0, 1, 0, 1]}},
    )
    return CorpusEntry("toy-bit", source, meter, "epistemic states are uniform over pairs of ontic states")


def _rebit_meter() -> Multimeter:
    return Multimeter.of(
        REBIT, {"X": {"+": [H, H, 0], "-": [H, -H, 0]}, "Z": {"+": [H, 0, H], "-": [H, 0, -H]}}
    )


def fig1_instance() -> CorpusEntry:
    """Three settings: two two-outcome sources with subnormalized atoms and one preparation."""
    t = Fraction(1, 3)
    source = Multisource.of(
        REBIT,
        {
            "0": {"0": [H, Fraction(3, 10), Fraction(2, 5)], "1": [H, Fraction(-3, 10), Fraction(2, 5)]},
            "1": {"0": [t, t, 0], "1": [2 * t, Fraction(-8, 15), Fraction(-2, 5)]},
            "2": {"0": [1, 0, -1]},
        },
    )
    return CorpusEntry("fig1-instance", source, _rebit_meter(), "zonotope-hull state space on a rebit; X and Z readouts")


def fig2_pair() -> CorpusEntry:
    """The fig1 fragment and the fragment of normalized extremal rays of its state cone."""
    inner = fig1_instance()
    u = REBIT.unit
    rays = extreme_rays(ConeV.of(inner.source.vectors()))
    outer = Multisource.of(REBIT, {str(i): {"0": scale(1 / dot(u, r), r)} for i, r in enumerate(rays)})
    return CorpusEntry(
        "fig2-pair", inner.source, inner.meter,
        "companion 'outer' prepares the normalized extremal rays of the same state cone",
        companions=(("outer", outer, inner.meter),),
    )


def fig3_triple() -> CorpusEntry:
    source = Multisource.of(
        REBIT, {"0": {"0": [1, 1, 0]}, "1": {"0": [1, -1, 0]}, "2": {"0": [1, 0, 1]}, "3": {"0": [1, 0, -1]}}
    )
    meter = _rebit_meter()
    inefficient = apply_inefficiency(meter, InefficiencyParams.constant(meter, H))
    noisy = apply_noise(meter, NoiseParams.constant(meter, H))
    return CorpusEntry(
        "fig3-triple", source, meter,
        "companions: the same readout with 1/2 inefficiency and with 1/2 uniform noise",
        companions=(("inefficient", source, inefficient), ("noisy", source, noisy)),
    )


_BUILTINS = {
    "classical-bit": classical_bit,
    "gbit-square": gbit_square,
    "qubit-stabilizer": qubit_stabilizer,
    "qubit-pom": qubit_pom,
    "toy-bit": toy_bit,
    "fig1-instance": fig1_instance,
    "fig2-pair": fig2_pair,
    "fig3-triple": fig3_triple,
}

NAMES = tuple(_BUILTINS) + ("classical-simplex-k",)


def builtin(name: str) -> CorpusEntry:
    if name in _BUILTINS:
        return _BUILTINS[name]()
    prefix = "classical-simplex-"
    if name.startswith(prefix) and name[len(prefix):].isdigit():
        return classical_simplex(int(name[len(prefix):]))
    raise KeyError(f"unknown corpus entry {name!r}; known: {', '.join(NAMES)}")


# ---------------------------------------------------------------------------
# Random devices


@dataclass(frozen=True)
class RandomSpec:
    seed: int
    ambient_dim: int = 3
    n_source_settings: int = 2
    n_source_outcomes: int = 2
    n_meter_settings: int = 2
    n_meter_outcomes: int = 2
    denominator_bound: int = 4
    kind: str = "cube"  # "cube" (boxworld-like, often nonclassical) or "simplex" (classical)

    def __post_init__(self):
        counts = (self.ambient_dim, self.n_source_settings, self.n_source_outcomes,
                  self.n_meter_settings, self.n_meter_outcomes)
        if min(counts) < 1 or self.denominator_bound < 1:
            raise ValidationError("random spec counts and denominator bound must be >= 1")
        if self.kind not in ("cube", "simplex"):
            raise ValidationError(f"unknown random kind {self.kind!r}")


def _weights(rng: random.Random, k: int, den: int) -> list[Fraction]:
    raw = [rng.randint(1, den) for _ in range(k)]
    total = sum(raw)
    return [Fraction(r, total) for r in raw]


def _coord(rng: random.Random, den: int) -> Fraction:
    # half the draws land on a face of the cube, where nonclassicality lives
    if rng.random() < 0.5:
        return Fraction(rng.choice((-1, 1)))
    return Fraction(rng.randint(-den, den), den)


def _direction(rng: random.Random, n: int, den: int) -> list[Fraction]:
    # sparse signed axes are the facet normals of the cube
    if rng.random() < 0.5:
        out = [Fraction(0)] * n
        out[rng.randrange(n)] = Fraction(rng.choice((-1, 1)))
        return out
    return [_coord(rng, den) for _ in range(n)]


def random_pm(spec: RandomSpec) -> tuple[Multisource, Multimeter]:
    """Valid random devices, deterministic in ``spec``.

    ``cube``: states ``w (1, r)`` with ``r`` in the unit cube and effects
    ``(c0, c)`` with ``|c|_1 <= min(c0, 1 - c0)``, which pair into [0, 1] with
    every cube state.  ``simplex``: points of the probability simplex read
    out by random stochastic response functions.
    """
    rng = random.Random(spec.seed)
    d, den = spec.ambient_dim, spec.denominator_bound
    xs = [str(i) for i in range(spec.n_source_settings)]
    ys = [str(i) for i in range(spec.n_meter_settings)]
    a_labels = [str(i) for i in range(spec.n_source_outcomes)]
    b_labels = [str(i) for i in range(spec.n_meter_outcomes)]

    if spec.kind == "simplex" or d == 1:
        system = GptSystem.of([1] * d) if spec.kind == "simplex" else GptSystem.of([1])
        states = {}
        for x in xs:
            w = _weights(rng, len(a_labels), den)
            states[x] = {a: scale(wa, _weights(rng, d, den)) for a, wa in zip(a_labels, w)}
        effects = {}
        for y in ys:
            columns = [_weights(rng, len(b_labels), den) for _ in range(d)]
            effects[y] = {b: [columns[i][j] for i in range(d)] for j, b in enumerate(b_labels)}
        return Multisource.of(system, states), Multimeter.of(system, effects)

    system = GptSystem.of([1] + [0] * (d - 1))
    states = {}
    for x in xs:
        w = _weights(rng, len(a_labels), den)
        states[x] = {
            a: scale(wa, [Fraction(1)] + [_coord(rng, den) for _ in range(d - 1)])
            for a, wa in zip(a_labels, w)
        }
    effects = {}
    for y in ys:
        k = len(b_labels)
        c0 = [Fraction(1, k)] * k if rng.random() < 0.5 else _weights(rng, k, den)
        dirs = [_direction(rng, d - 1, den) for _ in range(k - 1)]
        dirs.append([-sum(col, Fraction(0)) for col in zip(*dirs)] if dirs else [Fraction(0)] * (d - 1))
        limits = [min(c, 1 - c) / sum(map(abs, v)) for c, v in zip(c0, dirs) if any(v)]
        shrink = Fraction(1) if rng.random() < 0.5 else Fraction(rng.randint(1, den), den)
        t = min(limits, default=Fraction(0)) * shrink
        effects[y] = {b: [c] + [t * x for x in v] for b, c, v in zip(b_labels, c0, dirs)}
    return Multisource.of(system, states), Multimeter.of(system, effects)


def random_spec(seed: int, max_dim: int = 4, max_settings: int = 3, max_outcomes: int = 3) -> RandomSpec:
    """Draw the shape of a random instance itself from ``seed``."""
    rng = random.Random(seed)
    return RandomSpec(
        seed=rng.getrandbits(64),
        ambient_dim=rng.choice([1] + [d for d in range(2, max_dim + 1) for _ in range(d)]),
        n_source_settings=rng.randint(min(2, max_settings), max_settings),
        n_source_outcomes=rng.randint(1, max_outcomes),
        n_meter_settings=rng.randint(min(2, max_settings), max_settings),
        n_meter_outcomes=rng.randint(1, max_outcomes),
        denominator_bound=rng.randint(1, 4),
        kind="simplex" if rng.random() < 0.2 else "cube",
    )
