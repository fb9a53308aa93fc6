"""Command-line interface.

Exit codes: 0 success / positive verdict, 10 negative verdict (not embeddable,
not cone equivalent), 1 failed verification, 2 operational error.

Fragment arguments are ``gptfrag/1`` files or ``builtin:<corpus name>``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from fractions import Fraction
from typing import Optional, Sequence

from . import __version__
from .classicality import Embeddable, check_verdict, simplicial_cone_embed
from .corpus import NAMES, builtin
from .fileformat import FormatError, dumps, loads
from .geometry import DEFAULT_ZONOTOPE_CAP, cone_equal, dd_convert, format_rational, parse_rational
from .model import Multimeter, Multisource, ValidationError, fragment_from_pm
from .report import (
    build_report,
    fmt_mat,
    parse_report,
    render,
    verdict_record,
    verify_document,
    verify_record,
)
from .transforms import (
    FullSupportDistribution,
    InefficiencyParams,
    NoiseParams,
    apply_inefficiency,
    apply_noise,
    flag_convexify_meter,
    flag_convexify_source,
)

EXIT_OK, EXIT_VERIFY_FAILED, EXIT_ERROR, EXIT_NEGATIVE = 0, 1, 2, 10
CAP_ENV = "CONEWITNESS_VERTEX_CAP"


class CliError(Exception):
    pass


def vertex_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return DEFAULT_ZONOTOPE_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise CliError(f"{CAP_ENV}={raw!r} is not an integer") from None
    if cap < 1:
        raise CliError(f"{CAP_ENV} must be positive")
    return cap


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".conewitness-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_devices(arg: str) -> tuple[Multisource, Multimeter, tuple[str, ...]]:
    if arg.startswith("builtin:"):
        name = arg[len("builtin:"):]
        try:
            entry = builtin(name)
        except KeyError as exc:
            raise CliError(str(exc.args[0])) from None
        return entry.source, entry.meter, (f"builtin {name}",)
    try:
        with open(arg) as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {arg}: {exc.strerror}") from None
    return loads(text)


def parse_assignments(text: str) -> tuple[dict[str, Fraction], Optional[Fraction]]:
    """``"a=1/3,b=2/3"`` or ``"default=1/2"`` into (explicit entries, default)."""
    entries: dict[str, Fraction] = {}
    default = None
    for part in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = part.rpartition("=")
        if not sep or not key:
            raise CliError(f"expected label=p/q, got {part!r}")
        try:
            q = parse_rational(value)
        except ValueError as exc:
            raise CliError(str(exc)) from None
        if key == "default":
            default = q
        elif key in entries:
            raise CliError(f"label {key!r} given twice")
        else:
            entries[key] = q
    return entries, default


def _expand(text: Optional[str], keys: Sequence[str], what: str) -> Optional[dict[str, Fraction]]:
    if text is None:
        return None
    entries, default = parse_assignments(text)
    unknown = sorted(set(entries) - set(keys))
    if unknown:
        raise CliError(f"{what}: unknown labels {unknown}; known {list(keys)}")
    out = {}
    for k in keys:
        if k in entries:
            out[k] = entries[k]
        elif default is not None:
            out[k] = default
        else:
            raise CliError(f"{what}: no value for {k!r} and no default")
    return out


def distribution(text: Optional[str], settings: Sequence[str], what: str) -> FullSupportDistribution:
    weights = _expand(text, settings, what)
    if weights is None:
        return FullSupportDistribution.uniform(settings)
    return FullSupportDistribution(weights)


def per_outcome(text: str, meter: Multimeter, what: str) -> dict[tuple[str, str], Fraction]:
    keys = [f"{b}|{y}" for (y, b), _ in meter.items()]
    values = _expand(text, keys, what)
    return {(b, y): values[f"{b}|{y}"] for (y, b), _ in meter.items()}


# ---------------------------------------------------------------------------
# Commands


def _emit(args, report) -> None:
    if getattr(args, "report", None):
        write_atomic(args.report, render(report, "json"))
    sys.stdout.write(render(report, args.format))


def cmd_analyze(args) -> int:
    source, meter, lineage = load_devices(args.file)
    f = fragment_from_pm(source, meter)
    findings = [
        ("state_cone_facet_normals", fmt_mat(dd_convert(f.state_cone).facet_normals) if f.state_span.dim else []),
        ("effect_cone_facet_normals", fmt_mat(dd_convert(f.effect_cone).facet_normals) if f.effect_span.dim else []),
    ]
    report = build_report("analyze", [("input", f)], lineage=lineage, findings=findings, cap=vertex_cap())
    _emit(args, report)
    return EXIT_OK


def cmd_embed(args) -> int:
    source, meter, lineage = load_devices(args.file)
    f = fragment_from_pm(source, meter)
    start = time.perf_counter()
    verdict = simplicial_cone_embed(f)
    elapsed = time.perf_counter() - start
    if not check_verdict(f, verdict):
        raise CliError("internal error: verdict failed its own verification")
    timing = {"embed_seconds": f"{elapsed:.6f}"} if args.timing else None
    report = build_report("embed", [("input", f)], [("input", verdict)], lineage=lineage, timing=timing)
    record = dict(verdict_record(verdict), fragment="input")
    if isinstance(verdict, Embeddable):
        if args.embedding:
            doc = report.to_document()
            write_atomic(args.embedding, json.dumps(
                {"verdict": record, "fragment": doc["fragments"][0]["data"]}, sort_keys=True, indent=2) + "\n")
    elif args.certificate:
        write_atomic(args.certificate, json.dumps({"verdict": record}, sort_keys=True, indent=2) + "\n")
    _emit(args, report)
    return EXIT_OK if verdict.embeddable else EXIT_NEGATIVE


def cmd_cone_equiv(args) -> int:
    (pa, ma, la), (pb, mb, lb) = load_devices(args.file_a), load_devices(args.file_b)
    fa, fb = fragment_from_pm(pa, ma), fragment_from_pm(pb, mb)
    if fa.system != fb.system:
        raise CliError("fragments live on different systems (dimension or unit differ)")
    states = cone_equal(fa.state_cone, fb.state_cone)
    effects = cone_equal(fa.effect_cone, fb.effect_cone)
    report = build_report(
        "cone-equiv",
        [("a", fa), ("b", fb)],
        lineage=[f"a: {x}" for x in la] + [f"b: {x}" for x in lb],
        findings=[("state_cones_equal", states), ("effect_cones_equal", effects), ("cone_equivalent", states and effects)],
    )
    _emit(args, report)
    return EXIT_OK if states and effects else EXIT_NEGATIVE


def cmd_transform(args) -> int:
    source, meter, lineage = load_devices(args.file)
    if args.kind == "flag-convexify":
        mu = distribution(args.mu, source.settings, "mu")
        nu = distribution(args.nu, meter.settings, "nu")
        source, meter = flag_convexify_source(source, mu), flag_convexify_meter(meter, nu)
        step = f"flag-convexify mu={args.mu or 'uniform'} nu={args.nu or 'uniform'}"
    elif args.kind == "inefficiency":
        meter = apply_inefficiency(meter, InefficiencyParams(per_outcome(args.alpha, meter, "alpha")))
        step = f"inefficiency alpha={args.alpha}"
    else:
        meter = apply_noise(meter, NoiseParams(per_outcome(args.beta, meter, "beta")))
        step = f"noise beta={args.beta}"
    fragment_from_pm(source, meter)
    text = dumps(source, meter, lineage + (step,))
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


DEMOS = ("no-settings", "no-free-choice", "inefficient-detectors", "single-source")


def _skewed(settings: Sequence[str]) -> FullSupportDistribution:
    raw = {x: Fraction(i + 1) for i, x in enumerate(settings)}
    total = sum(raw.values())
    return FullSupportDistribution({x: w / total for x, w in raw.items()})


def run_demo(name: str, corpus: str = "qubit-pom", alpha: Fraction = Fraction(99, 100)):
    """Run a demo pipeline; returns the report and whether every verdict matched the original."""
    entry = builtin(corpus)
    p, m = entry.source, entry.meter
    stages: list[tuple[str, Multisource, Multimeter]] = [("original", p, m)]
    if name == "no-settings":
        stages.append(("flag-convexified", flag_convexify_source(p, FullSupportDistribution.uniform(p.settings)),
                       flag_convexify_meter(m, FullSupportDistribution.uniform(m.settings))))
        story = ("Both devices were flag-convexified: the transformed source and meter take no setting input. "
                 "The verdict does not change, so a classicality violation needs no setting variables "
                 "and, with a single measurement, no incompatible measurements.")
    elif name == "no-free-choice":
        stages.append(("flag-convexified", flag_convexify_source(p, _skewed(p.settings)),
                       flag_convexify_meter(m, _skewed(m.settings))))
        story = ("Settings were drawn inside the devices from skewed full-support distributions and written "
                 "to an output flag. No setting is chosen by anyone, yet the verdict does not change: "
                 "no free-choice assumption is involved.")
    elif name == "inefficient-detectors":
        ineff = apply_inefficiency(m, InefficiencyParams.constant(m, alpha))
        stages.append((f"inefficient alpha={format_rational(alpha)}", p, ineff))
        story = (f"Every outcome of the meter is lost with probability {format_rational(alpha)}. "
                 "The effect cone is unchanged, and so is the verdict: detector inefficiency opens no loophole.")
    elif name == "single-source":
        flag_p = flag_convexify_source(p, FullSupportDistribution.uniform(p.settings))
        stages.append(("single source", flag_p, m))
        stages.append(("single source and meter", flag_p,
                       flag_convexify_meter(m, FullSupportDistribution.uniform(m.settings))))
        story = ("The source was merged into one setting-free device first, then the meter as well. "
                 "The verdict is the same at every stage, so passive observation of outcomes suffices.")
    else:
        raise CliError(f"unknown demo {name!r}; known: {', '.join(DEMOS)}")
    fragments, verdicts = [], []
    for label, sp, sm in stages:
        f = fragment_from_pm(sp, sm)
        fragments.append((label, f))
        verdicts.append((label, simplicial_cone_embed(f)))
    for (label, f), (_, v) in zip(fragments, verdicts):
        if not check_verdict(f, v):
            raise CliError(f"internal error: verdict for {label} failed verification")
    preserved = len({v.embeddable for _, v in verdicts}) == 1
    f0 = fragments[0][1]
    equivalent = all(
        cone_equal(f0.state_cone, f.state_cone) and cone_equal(f0.effect_cone, f.effect_cone) for _, f in fragments[1:]
    )
    last_p, last_m = stages[-1][1], stages[-1][2]
    findings = [
        ("verdicts", {label: ("embeddable" if v.embeddable else "not-embeddable") for label, v in verdicts}),
        ("verdict_preserved", preserved),
        ("cone_equivalent_to_original", equivalent),
        ("final_source_settings", len(last_p.settings)),
        ("final_meter_settings", len(last_m.settings)),
    ]
    report = build_report(f"demo {name}", fragments, verdicts, lineage=[f"builtin {corpus}"],
                          findings=findings, narrative=[story])
    return report, preserved


def cmd_demo(args) -> int:
    if args.name not in DEMOS:
        raise CliError(f"unknown demo {args.name!r}; known: {', '.join(DEMOS)}")
    try:
        alpha = parse_rational(args.alpha)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    report, preserved = run_demo(args.name, args.corpus, alpha)
    _emit(args, report)
    return EXIT_OK if preserved else EXIT_VERIFY_FAILED


def cmd_verify(args) -> int:
    try:
        with open(args.file) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read report {args.file}: {exc}") from None
    if isinstance(raw, dict) and "schema" in raw:
        results = verify_document(parse_report(json.dumps(raw)))
    elif isinstance(raw, dict) and "verdict" in raw:
        results = [verify_record(raw["verdict"], raw.get("fragment"))]
    else:
        raise CliError("file is neither a report nor a certificate/embedding file")
    if not results:
        raise CliError("document holds no verdicts to verify")
    for r in results:
        status = "ok" if r.ok else "FAILED"
        sys.stdout.write(f"{r.fragment}: {status}\n")
        for d in r.diagnostics:
            sys.stdout.write(f"  {d}\n")
    return EXIT_OK if all(r.ok for r in results) else EXIT_VERIFY_FAILED


def cmd_corpus(args) -> int:
    if args.action == "list":
        for name in NAMES:
            sys.stdout.write(name + "\n")
        return EXIT_OK
    if not args.name:
        raise CliError("corpus export needs a name")
    try:
        entry = builtin(args.name)
    except KeyError as exc:
        raise CliError(str(exc.args[0])) from None
    source, meter, label = entry.source, entry.meter, f"builtin {args.name}"
    if args.companion:
        found = {c[0]: c for c in entry.companions}
        if args.companion not in found:
            raise CliError(f"{args.name} has no companion {args.companion!r}; known: {sorted(found)}")
        _, source, meter = found[args.companion]
        label += f" companion {args.companion}"
    text = dumps(source, meter, (label,))
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="conewitness", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"conewitness {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def reporting(p):
        p.add_argument("--format", choices=("text", "json"), default="text", help="stdout rendering")
        p.add_argument("--report", metavar="PATH", help="also write the JSON report here")

    p = sub.add_parser("analyze", help="spans, cone facets and polytope vertex counts")
    p.add_argument("file")
    reporting(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("embed", help="decide simplex embeddability (exit 0 yes, 10 no)")
    p.add_argument("file")
    p.add_argument("--certificate", metavar="PATH", help="write the Farkas certificate here when not embeddable")
    p.add_argument("--embedding", metavar="PATH", help="write the embedding here when embeddable")
    p.add_argument("--timing", action="store_true", help="record wall-clock time (breaks byte-stability)")
    reporting(p)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("cone-equiv", help="compare state and effect cones (exit 0 equal, 10 not)")
    p.add_argument("file_a")
    p.add_argument("file_b")
    reporting(p)
    p.set_defaults(func=cmd_cone_equiv)

    p = sub.add_parser("transform", help="write a transformed gptfrag/1 file")
    tsub = p.add_subparsers(dest="kind", required=True)
    t = tsub.add_parser("flag-convexify")
    t.add_argument("--mu", help="source setting weights, e.g. '0=1/3,default=2/3' (uniform if omitted)")
    t.add_argument("--nu", help="meter setting weights (uniform if omitted)")
    t = tsub.add_parser("inefficiency")
    t.add_argument("--alpha", required=True, help="loss probabilities keyed 'outcome|setting', e.g. 'default=1/2'")
    t = tsub.add_parser("noise")
    t.add_argument("--beta", required=True, help="keep probabilities keyed 'outcome|setting', e.g. 'default=9/10'")
    for t in tsub.choices.values():
        t.add_argument("file")
        t.add_argument("-o", "--out", help="output path (stdout if omitted)")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("demo", help="setting-free, choice-free and inefficiency demos")
    p.add_argument("name", help=", ".join(DEMOS))
    p.add_argument("--corpus", default="qubit-pom", help="builtin fragment to start from")
    p.add_argument("--alpha", default="99/100", help="loss probability for inefficient-detectors")
    reporting(p)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("verify", help="re-verify a report, certificate or embedding file (exit 0 ok, 1 not)")
    p.add_argument("file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("corpus", help="list or export builtin fragments")
    p.add_argument("action", choices=("list", "export"))
    p.add_argument("name", nargs="?")
    p.add_argument("--companion", help="export a companion device pair instead")
    p.add_argument("-o", "--out")
    p.set_defaults(func=cmd_corpus)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        return args.func(args)
    except (CliError, FormatError, ValidationError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        sys.stderr.write(f"conewitness: error: {msg}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
