"""Report documents: JSON (schema ``report_v1``) and plain-text tables.

JSON layout::

    {"version": "report_v1",
     "name": str,
     "config": {"stats": str, "nmax": int | null, "tol_rel": float, "seed": int},
     "verdicts": {slot: {"status": str, "marginal": bool, "witness": {...}}},
     "per_component": [{"n": int, slot: {...evidence}}, ...],
     "gallery": {"name": str, "params": {...}, "expected": {slot: str}}}

``gallery`` is present only for gallery states.  Floats are written with 17
significant digits, complex numbers as ``{"re": x, "im": y}``, statuses as
lowercase strings; keys keep insertion order so output is byte-stable.
"""

from __future__ import annotations

import json
import math
from enum import Enum

import numpy as np

from .classify import SLOTS, Report, Status

VERSION = "report_v1"


def report_document(name: str, report: Report, gallery=None) -> dict:
    cfg = report.config
    nmax = cfg.nmax
    if gallery is not None and "nmax" in gallery.params:
        nmax = gallery.params["nmax"]
    doc = {
        "version": VERSION,
        "name": name,
        "config": {
            "stats": report.statistics.value,
            "nmax": nmax,
            "tol_rel": cfg.tol_rel,
            "seed": cfg.seed,
        },
        "verdicts": {
            slot: {
                "status": report.verdict(slot).status,
                "marginal": report.verdict(slot).marginal,
                "witness": report.verdict(slot).witness,
            }
            for slot in SLOTS
        },
        "per_component": report.per_component,
    }
    if gallery is not None:
        doc["gallery"] = {"name": gallery.name, "params": gallery.params,
                          "expected": gallery.expected}
    return doc


def _plain(x):
    """Recursively convert to JSON-ready values (floats kept as floats)."""
    if isinstance(x, Enum):
        return x.value
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, (complex, np.complexfloating)):
        return {"re": float(x.real), "im": float(x.imag)}
    return x


def _number(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite number in report")
    text = format(x, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def _emit(x, indent: int, out: list) -> None:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(x, dict):
        if not x:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(x.items()):
            out.append(f"{inner}{json.dumps(k)}: ")
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(x) - 1 else "\n")
        out.append(pad + "}")
    elif isinstance(x, list):
        if not x:
            out.append("[]")
            return
        out.append("[\n")
        for i, v in enumerate(x):
            out.append(inner)
            _emit(v, indent + 1, out)
            out.append(",\n" if i < len(x) - 1 else "\n")
        out.append(pad + "]")
    elif isinstance(x, float):
        out.append(_number(x))
    else:
        out.append(json.dumps(x))


def dumps(obj) -> str:
    """Deterministic JSON text with 17 significant digits per float."""
    out: list = []
    _emit(_plain(obj), 0, out)
    return "".join(out) + "\n"


# -- tables ------------------------------------------------------------------------

def _component_summary(row: dict) -> str:
    for key in ("takagi_rank", "slater_rank", "rdm_rank"):
        if key in row:
            return f"{key.split('_')[0]} {row[key]}"
    if "residual" in row:
        return f"fit residual {row['residual']:.2e}"
    if "ranks" in row:
        ranks = row["ranks"]
        return f"ranks {ranks[0]} (all slots)" if len(set(ranks)) == 1 else f"ranks {ranks}"
    return "trivial"


def _evidence(slot: str, verdict) -> str:
    if verdict.status is Status.NOT_APPLICABLE:
        return ""
    w = verdict.witness
    if slot == "field":
        return f"mode ranks {w['mode_ranks']}"
    parts = [f"n={r['n']}: {_component_summary(r)}" for r in w.get("components", [])
             if "trivial" not in r]
    if "implied_by" in w:
        parts.append(f"implied by {w['implied_by']}")
    return "; ".join(parts) if parts else "n <= 1 only"


def render_table(name: str, report: Report, gallery=None) -> str:
    cfg = report.config
    head = f"{name}  [{report.statistics.value}, {report.dim} modes, tol_rel={cfg.tol_rel:g}"
    if gallery is not None and gallery.params:
        head += ", " + ", ".join(f"{k}={v}" for k, v in gallery.params.items())
    head += "]"
    lines = [head]
    for slot in SLOTS:
        v = report.verdict(slot)
        status = v.status.value + (" (marginal)" if v.marginal else "")
        expected = ""
        if gallery is not None and slot in gallery.expected:
            ok = gallery.expected[slot] is v.status
            expected = "  ok" if ok else f"  EXPECTED {gallery.expected[slot].value}"
        lines.append(f"  {slot:<26}{status:<26}{_evidence(slot, v)}{expected}".rstrip())
    return "\n".join(lines) + "\n"
