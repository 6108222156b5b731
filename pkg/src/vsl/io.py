"""Measure documents and deterministic CSV/JSON artifacts.

A measure document looks like::

    {"ac": {"family": "semicircle", "c": 2.0, "mass": 0.9, "coeffs": []},
     "points": [{"xi": 2.5, "w": 0.05}]}

``ac`` may be ``null`` for a pure point measure. Every artifact starts with the
hash of the configuration that produced it; numbers are written at full
precision (shortest round-trip for floats, working precision for ``mpf``,
``p/q`` for rationals), and JSON numbers travel as decimal strings.
"""

import csv
import hashlib
import io
import json
import math
import os
from fractions import Fraction

import mpmath
import numpy as np

from ._errors import ValidationError
from .measure import FAMILIES, WeightSpec, normalize, to_fraction


def _number(x, what):
    if isinstance(x, bool) or not isinstance(x, (int, float, str)):
        raise ValidationError(f"{what} must be a number, got {x!r}")
    try:
        return to_fraction(Fraction(x) if isinstance(x, str) else x)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"{what} is not a number: {x!r}") from exc


def measure_from_dict(doc):
    """Build a normalized :class:`EvenMeasure` from a parsed measure document."""
    if not isinstance(doc, dict):
        raise ValidationError("measure document must be a JSON object")
    unknown = set(doc) - {"ac", "points"}
    if unknown:
        raise ValidationError(f"unknown measure keys: {sorted(unknown)}")
    ac, mass = None, Fraction(0)
    raw = doc.get("ac")
    if raw is not None:
        if not isinstance(raw, dict) or "family" not in raw:
            raise ValidationError("'ac' must be an object with a 'family'")
        bad = set(raw) - {"family", "c", "mass", "coeffs", "gap"}
        if bad:
            raise ValidationError(f"unknown 'ac' keys: {sorted(bad)}")
        c = float(_number(raw.get("c", 2.0), "ac.c"))
        ac = WeightSpec(
            raw["family"],
            c,
            tuple(float(_number(b, "ac.coeffs")) for b in raw.get("coeffs", ())),
            float(_number(raw.get("gap", 0), "ac.gap")),
        )
        mass = _number(raw.get("mass", 1), "ac.mass")
    points = []
    for i, p in enumerate(doc.get("points", ())):
        if not isinstance(p, dict) or set(p) != {"xi", "w"}:
            raise ValidationError(f"points[{i}] must be an object with keys 'xi' and 'w'")
        points.append((_number(p["xi"], f"points[{i}].xi"), _number(p["w"], f"points[{i}].w")))
    return normalize(ac, mass, points)


def load_measure(source):
    """Measure from a JSON file, or a preset family name such as ``semicircle``."""
    if not os.path.exists(source) and source in FAMILIES and source != "chebyshev-series":
        return normalize(WeightSpec(source), 1)
    try:
        with open(source, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"measure file not found: {source}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"measure file is not valid JSON: {exc}") from exc
    return measure_from_dict(doc)


def measure_to_dict(m):
    """Inverse of :func:`measure_from_dict` for an unevolved measure."""
    doc = {"ac": None, "points": [{"xi": fmt(xi), "w": fmt(w)} for xi, w in m.points]}
    if m.ac is not None:
        doc["ac"] = {"family": m.ac.family, "c": fmt(m.ac.c), "mass": fmt(m.ac_mass), "coeffs": [fmt(b) for b in m.ac.coeffs]}
        if m.ac.gap:
            doc["ac"]["gap"] = fmt(m.ac.gap)
    return doc


def config_hash(config):
    """First 16 hex digits of the SHA-256 of the canonical JSON form of ``config``."""
    text = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def fmt(x):
    """Full-precision text for one number."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, mpmath.mpf):
        bits = max(53, int(x.man).bit_length())
        digits = int(bits * math.log10(2)) + 2
        with mpmath.workprec(bits + 16):
            return mpmath.nstr(x, digits, min_fixed=-4, max_fixed=digits)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _stringify(obj):
    if isinstance(obj, dict):
        return {str(k): _stringify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_stringify(v) for v in obj]
    if obj is None or isinstance(obj, str):
        return obj
    return fmt(obj)


def render_csv(columns, rows, digest):
    buf = io.StringIO()
    buf.write(f"# config_hash={digest}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def render_json(payload, digest):
    doc = {"config_hash": digest, **_stringify(payload)}
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_csv(path, columns, rows, digest):
    """CSV with a ``# config_hash=...`` line, a header row and full-precision cells."""
    _write(path, render_csv(columns, rows, digest))


def write_json(path, payload, digest):
    """JSON report with every number as a decimal string and the config hash at the top level."""
    _write(path, render_json(payload, digest))


def _write(path, text):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_csv(path):
    """``(config_hash, columns, rows)`` with cells left as text."""
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().strip()
        if not first.startswith("# config_hash="):
            raise ValidationError(f"{path} has no config hash line")
        reader = csv.reader(fh)
        columns = next(reader)
        return first.split("=", 1)[1], columns, [r for r in reader]
