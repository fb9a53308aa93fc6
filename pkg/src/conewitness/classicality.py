"""Deciding simplex embeddability of a fragment.

Write the rows of an embedding's state map as functionals ``r_k`` on the state
span and the rows of its effect map as functionals ``f_k`` on the effect span.
The cone-level conditions say exactly that every ``r_k`` is in the dual of the
state cone, every ``f_k`` is in the dual of the effect cone and
``sum_k f_k (x) r_k`` equals the probability rule.  Expanding each factor in the
(finitely many) generators of the two dual cones turns this into the linear
feasibility problem

    find sigma_ab >= 0 with  sum_ab sigma_ab phi_a (x) psi_b = B,

whose feasible points reassemble into rank-one terms.  A cone-level embedding
is then rescaled into a genuine simplex embedding (unit mapped to all-ones) by
a diagonal cone automorphism after dropping coordinates the unit does not
reach.  Infeasibility comes with a Farkas certificate of the LP.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

from .geometry import ConeV, Matrix, Subspace, Vector, cone_equal, dot, dual_cone, vec
from .lp import FarkasCertificate, Feasible, Infeasible, LpProblem, solve, verify_certificate
from .model import Fragment, ValidationError

ONE = Fraction(1)


@dataclass(frozen=True)
class Embedding:
    """``iota`` acts on state-span coordinates, ``kappa`` on effect-span coordinates.

    Span coordinates of a vector are its entries at the pivot columns of the
    canonical span basis; the bases are kept here so the maps can be checked
    without the original fragment.
    """

    n: int
    iota: Matrix
    kappa: Matrix
    state_basis: Subspace
    effect_basis: Subspace

    def map_state(self, s: Sequence[Fraction]) -> Vector:
        c = self.state_basis.coords(s)
        return tuple(dot(row, c) for row in self.iota)

    def map_effect(self, e: Sequence[Fraction]) -> Vector:
        c = self.effect_basis.coords(e)
        return tuple(dot(row, c) for row in self.kappa)


@dataclass(frozen=True)
class FactorizationWitness:
    """Nonnegative weights on pairs (effect-dual generator, state-dual generator)."""

    sigma: tuple[tuple[int, int, Fraction], ...]
    effect_dual: tuple[Vector, ...]
    state_dual: tuple[Vector, ...]


@dataclass(frozen=True)
class Embeddable:
    witness: FactorizationWitness
    embedding: Embedding
    lp: LpProblem = field(repr=False)

    embeddable = True


@dataclass(frozen=True)
class NotEmbeddable:
    certificate: FarkasCertificate
    lp: LpProblem = field(repr=False)

    embeddable = False


ClassicalityVerdict = Union[Embeddable, NotEmbeddable]


@dataclass(frozen=True)
class EmbeddingCheck:
    ok: bool
    failures: dict[str, list[str]]

    def __bool__(self) -> bool:
        return self.ok


CONDITIONS = (
    "iota_nonnegative",
    "iota_subnormalized",
    "kappa_nonnegative",
    "kappa_bounded",
    "pairing",
    "kappa_unit",
)


def verify_embedding(f: Fragment, e: Embedding) -> EmbeddingCheck:
    """Check the four simplex-embedding conditions on every generator pair."""
    failures: dict[str, list[str]] = {c: [] for c in CONDITIONS}
    if e.state_basis != f.state_span or e.effect_basis != f.effect_span:
        failures["pairing"].append("embedding bases do not match the fragment spans")
        return EmbeddingCheck(False, failures)
    if any(len(r) != f.state_span.dim for r in e.iota) or any(len(r) != f.effect_span.dim for r in e.kappa):
        failures["pairing"].append("matrix shapes do not match the span dimensions")
        return EmbeddingCheck(False, failures)
    if len(e.iota) != e.n or len(e.kappa) != e.n:
        failures["pairing"].append("matrix row counts differ from n")
        return EmbeddingCheck(False, failures)
    states = [e.map_state(s) for s in f.state_generators]
    effects = [e.map_effect(x) for x in f.effect_generators]
    for i, v in enumerate(states):
        if any(x < 0 for x in v):
            failures["iota_nonnegative"].append(f"state {i}")
        if sum(v, Fraction(0)) > 1:
            failures["iota_subnormalized"].append(f"state {i}")
    for j, w in enumerate(effects):
        if any(x < 0 for x in w):
            failures["kappa_nonnegative"].append(f"effect {j}")
        if any(x > 1 for x in w):
            failures["kappa_bounded"].append(f"effect {j}")
    for j, (w, eff) in enumerate(zip(effects, f.effect_generators)):
        for i, (v, s) in enumerate(zip(states, f.state_generators)):
            if dot(w, v) != dot(eff, s):
                failures["pairing"].append(f"effect {j} / state {i}")
    if e.map_effect(f.unit) != (ONE,) * e.n:
        failures["kappa_unit"].append("kappa(u) != 1_n")
    failures = {k: v for k, v in failures.items() if v}
    return EmbeddingCheck(not failures, failures)


def cone_equivalent(f: Fragment, g: Fragment) -> bool:
    """Equal state cones and equal effect cones (same system, unit and pairing required)."""
    if f.system.ambient_dim != g.system.ambient_dim:
        raise ValidationError("fragments live in different ambient dimensions")
    if f.unit != g.unit:
        raise ValidationError("fragments have different unit effects; cone equivalence is undefined")
    return cone_equal(f.state_cone, g.state_cone) and cone_equal(f.effect_cone, g.effect_cone)


def _dual_generators(cone: ConeV, span: Subspace) -> list[Vector]:
    if not span.dim:
        return []
    return list(dual_cone(cone, span).generators)


def factorization_lp(f: Fragment) -> tuple[LpProblem, list[Vector], list[Vector]]:
    """The LP over sigma, with the dual generators it is indexed by."""
    phis = _dual_generators(f.effect_cone, f.effect_span)
    psis = _dual_generators(f.state_cone, f.state_span)
    phi_vals = [f.effect_span.values(p) for p in phis]
    psi_vals = [f.state_span.values(p) for p in psis]
    target = f.pairing_matrix()
    pairs = [(a, b) for a in range(len(phis)) for b in range(len(psis))]
    rows = []
    for i in range(f.effect_span.dim):
        for j in range(f.state_span.dim):
            coeffs = tuple(phi_vals[a][i] * psi_vals[b][j] for a, b in pairs)
            rows.append((coeffs, target[i][j]))
    problem = LpProblem(len(pairs), tuple(rows), frozenset(range(len(pairs))))
    return problem, phis, psis


def simplicial_cone_embed(f: Fragment) -> ClassicalityVerdict:
    problem, phis, psis = factorization_lp(f)
    outcome = solve(problem)
    if isinstance(outcome, Infeasible):
        return NotEmbeddable(outcome.certificate, problem)
    assert isinstance(outcome, Feasible)
    pairs = [(a, b) for a in range(len(phis)) for b in range(len(psis))]
    support = [(a, b, s) for (a, b), s in zip(pairs, outcome.solution) if s != 0]
    witness = FactorizationWitness(tuple(support), tuple(phis), tuple(psis))
    embedding = normalize_embedding(f, *raw_maps(f, witness))
    return Embeddable(witness, embedding, problem)


def raw_maps(f: Fragment, witness: FactorizationWitness) -> tuple[Matrix, Matrix]:
    """Cone-level maps read off a factorization: one coordinate per support pair."""
    raw_iota = tuple(tuple(s * x for x in f.state_span.values(witness.state_dual[b])) for a, b, s in witness.sigma)
    raw_kappa = tuple(f.effect_span.values(witness.effect_dual[a]) for a, b, s in witness.sigma)
    return raw_iota, raw_kappa


def normalize_embedding(f: Fragment, raw_iota: Sequence[Sequence], raw_kappa: Sequence[Sequence]) -> Embedding:
    """Turn a cone-level embedding into a simplex embedding.

    Coordinates where the unit maps to zero are dropped; the rest are rescaled
    by the diagonal automorphism ``kappa' = D^-1 kappa``, ``iota' = D iota``
    with ``D = diag(kappa(u))``.
    """
    raw_iota = tuple(vec(r) for r in raw_iota)
    raw_kappa = tuple(vec(r) for r in raw_kappa)
    if len(raw_iota) != len(raw_kappa):
        raise ValidationError("raw maps disagree on n")
    raw = Embedding(len(raw_iota), raw_iota, raw_kappa, f.state_span, f.effect_span)
    states = [raw.map_state(s) for s in f.state_generators]
    effects = [raw.map_effect(e) for e in f.effect_generators]
    if any(x < 0 for v in states for x in v) or any(x < 0 for w in effects for x in w):
        raise ValidationError("raw maps do not send the cones into the nonnegative orthant")
    for w, eff in zip(effects, f.effect_generators):
        for v, s in zip(states, f.state_generators):
            if dot(w, v) != dot(eff, s):
                raise ValidationError("raw maps do not reproduce the probability rule")
    ku = raw.map_effect(f.unit)
    keep = [k for k, x in enumerate(ku) if x != 0]
    iota = tuple(tuple(ku[k] * x for x in raw_iota[k]) for k in keep)
    kappa = tuple(tuple(x / ku[k] for x in raw_kappa[k]) for k in keep)
    return Embedding(len(keep), iota, kappa, f.state_span, f.effect_span)


def check_verdict(f: Fragment, verdict: ClassicalityVerdict) -> bool:
    if isinstance(verdict, Embeddable):
        return verify_embedding(f, verdict.embedding).ok
    return verify_certificate(verdict.lp, verdict.certificate)


@dataclass(frozen=True)
class TheoremReport:
    cone_equivalent: bool
    first: Optional[ClassicalityVerdict]
    second: Optional[ClassicalityVerdict]
    verdicts_agree: Optional[bool]
    embedding_transfers: Optional[bool]
    note: str = ""


def theorem1_check(f: Fragment, g: Fragment) -> TheoremReport:
    """Run both verdicts for a cone-equivalent pair and test that the embedding of one serves the other."""
    if not cone_equivalent(f, g):
        return TheoremReport(False, None, None, None, None, "fragments are not cone equivalent; nothing to check")
    vf, vg = simplicial_cone_embed(f), simplicial_cone_embed(g)
    transfer = None
    if isinstance(vf, Embeddable):
        transfer = verify_embedding(g, vf.embedding).ok
    return TheoremReport(True, vf, vg, vf.embeddable == vg.embeddable, transfer)
