"""Sample input formats.

CSV: a header row ``value`` or ``value,weight`` then one point per row
(UTF-8, ``.`` as decimal separator).  JSON: an object with a ``values``
array and an optional ``weights`` array.  Missing weights mean uniform.
"""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path

from .core import WeightedSample
from .errors import VarmonoError


class InputError(VarmonoError):
    pass


def _number(text, where: str) -> float:
    if isinstance(text, bool):
        raise InputError(f"{where}: expected a number, got {text!r}")
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise InputError(f"{where}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise InputError(f"{where}: value must be finite, got {text!r}")
    return value


def parse_csv(text: str) -> WeightedSample:
    rows = [r for r in csv.reader(io.StringIO(text)) if any(c.strip() for c in r)]
    if not rows:
        raise InputError("CSV input is empty")
    header = [c.strip().lower() for c in rows[0]]
    if header not in (["value"], ["value", "weight"]):
        raise InputError(f"CSV header must be 'value' or 'value,weight', got {','.join(rows[0])!r}")
    has_weights = len(header) == 2
    values, weights = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise InputError(f"line {lineno}: expected {len(header)} column(s), got {len(row)}")
        values.append(_number(row[0].strip(), f"line {lineno}"))
        if has_weights:
            weights.append(_number(row[1].strip(), f"line {lineno}"))
    if not values:
        raise InputError("CSV input has no data rows")
    return WeightedSample(values, weights if has_weights else None)


def parse_json(text: str) -> WeightedSample:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or "values" not in doc:
        raise InputError("JSON input must be an object with a 'values' array")
    raw_values = doc["values"]
    raw_weights = doc.get("weights")
    if not isinstance(raw_values, list) or not raw_values:
        raise InputError("'values' must be a nonempty array")
    values = [_number(v, f"values[{i}]") for i, v in enumerate(raw_values)]
    weights = None
    if raw_weights is not None:
        if not isinstance(raw_weights, list):
            raise InputError("'weights' must be an array")
        weights = [_number(v, f"weights[{i}]") for i, v in enumerate(raw_weights)]
    return WeightedSample(values, weights)


def parse_text(text: str, hint: str = "") -> WeightedSample:
    if hint.endswith(".json") or (not hint.endswith(".csv") and text.lstrip().startswith("{")):
        return parse_json(text)
    return parse_csv(text)


def load_sample(path: str) -> WeightedSample:
    if path == "-":
        return parse_text(sys.stdin.read())
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return parse_text(text, path.lower())


def parse_list(text: str, what: str = "list") -> list[float]:
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if not parts:
        raise InputError(f"empty {what}")
    return [_number(p, what) for p in parts]
