"""Analysis reports: building, rendering, parsing back and re-verifying.

Reports are plain nested dicts of strings, ints, lists and bools, with every
rational written as ``"p/q"``.  A verdict record carries its LP instance and
witness verbatim, so :func:`verify_document` needs nothing else.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from typing import Any, Optional, Sequence

from . import __version__
from .classicality import (
    ClassicalityVerdict,
    Embeddable,
    Embedding,
    NotEmbeddable,
    verify_embedding,
)
from .geometry import (
    DEFAULT_ZONOTOPE_CAP,
    CapExceeded,
    Vector,
    dd_convert,
    dot,
    extreme_rays,
    format_rational,
    hull_vertices,
    parse_rational,
    vec,
)
from .lp import FarkasCertificate, LpProblem, verify_certificate
from .model import Fragment, GptSystem

SCHEMA = "conewitness-report/1"


def fmt_vec(v: Sequence[Fraction]) -> list[str]:
    return [format_rational(x) for x in v]


def fmt_mat(m: Sequence[Sequence[Fraction]]) -> list[list[str]]:
    return [fmt_vec(r) for r in m]


def parse_vec(v: Sequence[str]) -> Vector:
    return tuple(parse_rational(str(x)) for x in v)


def parse_mat(m) -> tuple[Vector, ...]:
    return tuple(parse_vec(r) for r in m)


# ---------------------------------------------------------------------------
# Records


def lp_record(p: LpProblem) -> dict:
    return {
        "num_vars": p.num_vars,
        "nonneg_vars": sorted(p.nonneg_vars),
        "equalities": [{"coeffs": fmt_vec(a), "rhs": format_rational(b)} for a, b in p.equalities],
        "objective": None if p.objective is None else fmt_vec(p.objective),
    }


def lp_from_record(r: dict) -> LpProblem:
    return LpProblem(
        int(r["num_vars"]),
        tuple((parse_vec(e["coeffs"]), parse_rational(e["rhs"])) for e in r["equalities"]),
        frozenset(int(j) for j in r["nonneg_vars"]),
        None if r.get("objective") is None else parse_vec(r["objective"]),
    )


def fragment_data(f: Fragment) -> dict:
    return {
        "unit": fmt_vec(f.unit),
        "state_generators": fmt_mat(f.state_generators),
        "effect_generators": fmt_mat(f.effect_generators),
        "state_span_basis": fmt_mat(f.state_span.basis),
        "effect_span_basis": fmt_mat(f.effect_span.basis),
    }


def fragment_from_data(d: dict) -> Fragment:
    return Fragment.from_generators(
        GptSystem.of(parse_vec(d["unit"])),
        parse_mat(d["state_generators"]),
        parse_mat(d["effect_generators"]),
        relaxed=True,
    )


def fragment_summary(f: Fragment, cap: Optional[int] = None) -> dict:
    """Dimensions and counts; polytope vertex counts only when a cap is given."""
    out: dict[str, Any] = {
        "ambient_dimension": f.system.ambient_dim,
        "state_span_dimension": f.state_span.dim,
        "effect_span_dimension": f.effect_span.dim,
        "state_generators": len(f.state_generators),
        "effect_generators": len(f.effect_generators),
        "state_cone_facets": len(dd_convert(f.state_cone).facet_normals) if f.state_span.dim else 0,
        "effect_cone_facets": len(dd_convert(f.effect_cone).facet_normals) if f.effect_span.dim else 0,
    }
    if cap is not None:
        for key, fn in (("state_polytope_vertices", f.state_polytope), ("effect_polytope_vertices", f.effect_polytope)):
            try:
                out[key] = len(fn(cap))
            except CapExceeded as exc:
                out[key] = f"skipped: {exc}"
    return out


def verdict_record(v: ClassicalityVerdict) -> dict:
    if isinstance(v, Embeddable):
        e = v.embedding
        return {
            "verdict": "embeddable",
            "n": e.n,
            "iota": fmt_mat(e.iota),
            "kappa": fmt_mat(e.kappa),
            "sigma": [[a, b, format_rational(s)] for a, b, s in v.witness.sigma],
            "effect_dual_generators": fmt_mat(v.witness.effect_dual),
            "state_dual_generators": fmt_mat(v.witness.state_dual),
            "lp": lp_record(v.lp),
        }
    assert isinstance(v, NotEmbeddable)
    return {
        "verdict": "not-embeddable",
        "certificate": fmt_vec(v.certificate.multipliers),
        "lp": lp_record(v.lp),
    }


@dataclass(frozen=True)
class AnalysisReport:
    command: str
    fragments: tuple[tuple[str, dict, dict], ...] = ()  # (label, summary, data)
    verdicts: tuple[tuple[str, dict], ...] = ()  # (fragment label, verdict record)
    lineage: tuple[str, ...] = ()
    findings: tuple[tuple[str, Any], ...] = ()
    narrative: tuple[str, ...] = ()
    replay_seed: Optional[int] = None
    timing: Optional[dict] = field(default=None)
    tool_version: str = __version__

    def to_document(self) -> dict:
        doc = {
            "schema": SCHEMA,
            "tool_version": self.tool_version,
            "command": self.command,
            "replay_seed": self.replay_seed,
            "lineage": list(self.lineage),
            "fragments": [{"label": l, "summary": s, "data": d} for l, s, d in self.fragments],
            "verdicts": [dict(r, fragment=l) for l, r in self.verdicts],
            "findings": {k: v for k, v in self.findings},
            "narrative": list(self.narrative),
        }
        if self.timing is not None:
            doc["timing"] = self.timing
        return doc


def build_report(
    command: str,
    fragments: Sequence[tuple[str, Fragment]],
    verdicts: Sequence[tuple[str, ClassicalityVerdict]] = (),
    *,
    lineage: Sequence[str] = (),
    findings: Sequence[tuple[str, Any]] = (),
    narrative: Sequence[str] = (),
    cap: Optional[int] = None,
    replay_seed: Optional[int] = None,
    timing: Optional[dict] = None,
) -> AnalysisReport:
    return AnalysisReport(
        command,
        tuple((label, fragment_summary(f, cap), fragment_data(f)) for label, f in fragments),
        tuple((label, verdict_record(v)) for label, v in verdicts),
        tuple(lineage),
        tuple(findings),
        tuple(narrative),
        replay_seed,
        timing,
    )


# ---------------------------------------------------------------------------
# Rendering


def _text_lines(doc: dict) -> list[str]:
    lines = [
        f"conewitness report ({doc['schema']}), tool {doc['tool_version']}",
        f"command: {doc['command']}",
        f"replay seed: {doc['replay_seed'] if doc['replay_seed'] is not None else 'none'}",
        "lineage: " + (json.dumps(doc["lineage"]) if doc["lineage"] else "[]"),
    ]
    for frag in doc["fragments"]:
        lines.append(f"[fragment {frag['label']}]")
        for k, v in frag["summary"].items():
            lines.append(f"  {k.replace('_', ' ')}: {v}")
    for rec in doc["verdicts"]:
        lines.append(f"[verdict {rec['fragment']}]")
        lines.append(f"verdict: {rec['verdict']}")
        if rec["verdict"] == "embeddable":
            lines.append(f"n: {rec['n']}")
            lines.append("iota (rows, state-span coordinates):")
            lines.extend("  " + " ".join(r) for r in rec["iota"])
            lines.append("kappa (rows, effect-span coordinates):")
            lines.extend("  " + " ".join(r) for r in rec["kappa"])
        else:
            lines.append("farkas multipliers: " + " ".join(rec["certificate"]))
        lines.append(f"lp: {rec['lp']['num_vars']} variables, {len(rec['lp']['equalities'])} equalities")
    for k, v in doc["findings"].items():
        lines.append(f"{k.replace('_', ' ')}: {json.dumps(v, sort_keys=True)}")
    lines.extend(doc["narrative"])
    if "timing" in doc:
        lines.append("timing: " + json.dumps(doc["timing"], sort_keys=True))
    return lines


def render(report: AnalysisReport | dict, format: str = "json") -> str:
    doc = report.to_document() if isinstance(report, AnalysisReport) else report
    if format == "json":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if format == "text":
        return "\n".join(_text_lines(doc)) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def parse_report(text: str) -> dict:
    doc = json.loads(text)
    if doc.get("schema") != SCHEMA:
        raise ValueError(f"not a {SCHEMA} document")
    return doc


# ---------------------------------------------------------------------------
# Standalone re-verification


@dataclass(frozen=True)
class VerificationResult:
    fragment: str
    ok: bool
    diagnostics: tuple[str, ...]


def verify_record(rec: dict, data: Optional[dict]) -> VerificationResult:
    label = rec.get("fragment", "?")
    try:
        problem = lp_from_record(rec["lp"])
        if rec["verdict"] == "not-embeddable":
            cert = FarkasCertificate(parse_vec(rec["certificate"]))
            if verify_certificate(problem, cert):
                return VerificationResult(label, True, ())
            return VerificationResult(label, False, ("farkas certificate does not verify against the embedded LP",))
        if rec["verdict"] != "embeddable":
            return VerificationResult(label, False, (f"unknown verdict {rec['verdict']!r}",))
        diags = []
        x = [Fraction(0)] * problem.num_vars
        n_psi = len(rec["state_dual_generators"])
        for a, b, s in rec["sigma"]:
            x[int(a) * n_psi + int(b)] = parse_rational(s)
        if not problem.is_solution(x):
            diags.append("sigma does not solve the embedded LP")
        if data is None:
            diags.append("no fragment data to check the embedding against")
            return VerificationResult(label, False, tuple(diags))
        f = fragment_from_data(data)
        bases = (parse_mat(data["state_span_basis"]), parse_mat(data["effect_span_basis"]))
        if bases != (f.state_span.basis, f.effect_span.basis):
            diags.append("recorded span bases differ from the spans of the recorded generators")
        iota, kappa = parse_mat(rec["iota"]), parse_mat(rec["kappa"])
        check = verify_embedding(f, Embedding(int(rec["n"]), iota, kappa, f.state_span, f.effect_span))
        for cond, where in check.failures.items():
            diags.append(f"{_CONDITION_TEXT.get(cond, cond)} fails at {', '.join(where[:4])}")
        return VerificationResult(label, not diags, tuple(diags))
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        return VerificationResult(label, False, (f"malformed verdict record: {exc}",))


_CONDITION_TEXT = {
    "iota_nonnegative": "iota(s) >= 0",
    "iota_subnormalized": "1_n . iota(s) <= 1",
    "kappa_nonnegative": "kappa(e) >= 0",
    "kappa_bounded": "kappa(e) <= 1_n",
    "pairing": "kappa(e) . iota(s) = B(e, s)",
    "kappa_unit": "kappa(u) = 1_n",
}


def verify_document(doc: dict) -> list[VerificationResult]:
    data = {f["label"]: f["data"] for f in doc.get("fragments", [])}
    return [verify_record(rec, data.get(rec.get("fragment"))) for rec in doc.get("verdicts", [])]


# ---------------------------------------------------------------------------
# Plot data


def _ccw(points: list[tuple[Fraction, Fraction]]) -> list[tuple[Fraction, Fraction]]:
    """Order the vertices of a convex polygon counterclockwise, starting from the lowest-leftmost."""
    if len(points) < 3:
        return sorted(points, key=lambda p: (p[1], p[0]))
    start = min(points, key=lambda p: (p[1], p[0]))
    rest = [p for p in points if p != start]

    def cmp(p, q):
        cross = (p[0] - start[0]) * (q[1] - start[1]) - (p[1] - start[1]) * (q[0] - start[0])
        if cross:
            return -1 if cross > 0 else 1
        dp = abs(p[0] - start[0]) + abs(p[1] - start[1])
        dq = abs(q[0] - start[0]) + abs(q[1] - start[1])
        return -1 if dp < dq else (1 if dp > dq else 0)

    return [start] + sorted(rest, key=cmp_to_key(cmp))


def _polygon(vertices: Sequence[Vector], plane: tuple[Vector, Vector]) -> list[list[str]]:
    pts = {(dot(plane[0], v), dot(plane[1], v)) for v in vertices}
    hull = [tuple(p) for p in hull_vertices(pts)]
    return [fmt_vec(p) for p in _ccw(hull)]


def emit_geometry(f: Fragment, plane: Sequence[Sequence], cap: int = DEFAULT_ZONOTOPE_CAP) -> dict:
    """Projected state/effect polygons plus the extremal rays of both cones.

    ``plane`` is a pair of coordinate covectors; a point ``v`` is drawn at
    ``(plane[0] . v, plane[1] . v)``.  Rays are given in ambient coordinates
    (canonically scaled) and in plane coordinates.
    """
    if len(plane) != 2:
        raise ValueError("plane needs exactly two covectors")
    pl = (vec(plane[0]), vec(plane[1]))
    if any(len(c) != f.system.ambient_dim for c in pl):
        raise ValueError("plane covectors have the wrong dimension")
    out: dict[str, Any] = {"plane": fmt_mat(pl)}
    for name, cone, vertices in (
        ("state", f.state_cone, f.state_polytope(cap)),
        ("effect", f.effect_cone, f.effect_polytope(cap)),
    ):
        rays = extreme_rays(cone) if cone.generators else ()
        out[f"{name}_polygon"] = _polygon(vertices, pl)
        out[f"{name}_rays"] = fmt_mat(rays)
        out[f"{name}_rays_projected"] = [fmt_vec((dot(pl[0], r), dot(pl[1], r))) for r in rays]
    return out


def ray_set(geometry: dict, which: str) -> frozenset[Vector]:
    return frozenset(parse_vec(r) for r in geometry[f"{which}_rays"])
