"""The ``gptfrag/1`` interchange format.

::

    {"format": "gptfrag/1",
     "ambient_dimension": 3,
     "unit": ["1", "0", "0"],
     "sources": [{"setting": "0", "outcomes": {"0": ["1/2", "1/2", "0"], ...}}, ...],
     "meters":  [{"setting": "X", "outcomes": {"+": ["1/2", "1/2", "0"], ...}}, ...],
     "lineage": ["noise beta=default=1/2"]}

Entries are ``"p/q"`` strings or JSON integers; JSON floats are rejected.
``lineage`` is optional.  Label order is preserved in both directions.
"""

from __future__ import annotations

import json
from typing import Any, Sequence

from .geometry import Q, format_rational
from .model import GptSystem, Multimeter, Multisource, ValidationError

FORMAT = "gptfrag/1"


class FormatError(ValueError):
    pass


def _vector(raw: Any, dim: int, where: str):
    if not isinstance(raw, list):
        raise FormatError(f"{where}: expected a list of rationals")
    if len(raw) != dim:
        raise FormatError(f"{where}: expected {dim} entries, got {len(raw)}")
    out = []
    for x in raw:
        if isinstance(x, float) or not isinstance(x, (str, int)) or isinstance(x, bool):
            raise FormatError(f"{where}: entry {x!r} is not an exact rational")
        try:
            out.append(Q(x))
        except ValueError as exc:
            raise FormatError(f"{where}: {exc}") from None
    return tuple(out)


def _device(raw: Any, dim: int, kind: str) -> dict:
    if not isinstance(raw, list) or not raw:
        raise FormatError(f"'{kind}' must be a non-empty list")
    table: dict[str, dict] = {}
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or set(item) != {"setting", "outcomes"}:
            raise FormatError(f"{kind}[{i}] needs exactly the keys 'setting' and 'outcomes'")
        setting = str(item["setting"])
        if setting in table:
            raise FormatError(f"{kind}: duplicate setting {setting!r}")
        outcomes = item["outcomes"]
        if not isinstance(outcomes, dict) or not outcomes:
            raise FormatError(f"{kind}[{i}].outcomes must be a non-empty object")
        table[setting] = {
            str(a): _vector(v, dim, f"{kind} setting {setting!r} outcome {a!r}") for a, v in outcomes.items()
        }
    return table


def from_document(doc: Any) -> tuple[Multisource, Multimeter, tuple[str, ...]]:
    if not isinstance(doc, dict):
        raise FormatError("top level must be a JSON object")
    if doc.get("format") != FORMAT:
        raise FormatError(f"format tag must be {FORMAT!r}")
    unknown = set(doc) - {"format", "ambient_dimension", "unit", "sources", "meters", "lineage"}
    if unknown:
        raise FormatError(f"unknown keys {sorted(unknown)}")
    dim = doc.get("ambient_dimension")
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise FormatError("ambient_dimension must be a positive integer")
    system = GptSystem.of(_vector(doc.get("unit"), dim, "unit"))
    lineage = doc.get("lineage", [])
    if not isinstance(lineage, list) or not all(isinstance(s, str) for s in lineage):
        raise FormatError("lineage must be a list of strings")
    source = Multisource.of(system, _device(doc.get("sources"), dim, "sources"))
    meter = Multimeter.of(system, _device(doc.get("meters"), dim, "meters"))
    return source, meter, tuple(lineage)


def to_document(source: Multisource, meter: Multimeter, lineage: Sequence[str] = ()) -> dict:
    if source.system != meter.system:
        raise ValidationError("source and meter act on different systems")

    def dev(d):
        return [
            {"setting": s, "outcomes": {a: [format_rational(x) for x in v] for a, v in outs}}
            for s, outs in d.table
        ]

    doc = {
        "format": FORMAT,
        "ambient_dimension": source.system.ambient_dim,
        "unit": [format_rational(x) for x in source.system.unit],
        "sources": dev(source),
        "meters": dev(meter),
    }
    if lineage:
        doc["lineage"] = list(lineage)
    return doc


def loads(text: str) -> tuple[Multisource, Multimeter, tuple[str, ...]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from None
    return from_document(doc)


def dumps(source: Multisource, meter: Multimeter, lineage: Sequence[str] = ()) -> str:
    return json.dumps(to_document(source, meter, lineage), indent=2) + "\n"
