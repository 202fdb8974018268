"""Deterministic JSON/CSV writers and schema access."""
from __future__ import annotations

import csv
import json
import math
from importlib import resources
from pathlib import Path

import numpy as np

FLOAT_DIGITS = 17


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return ""
    s = format(x, f".{FLOAT_DIGITS}g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def to_plain(obj):
    """numpy scalars/arrays and complex numbers to JSON-friendly Python objects."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_plain(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_plain(float(obj.real)), to_plain(float(obj.imag))]
    return obj


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    obj = to_plain(obj) if _level == 0 else obj
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        return _fmt_float(obj)
    return json.dumps(obj)


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj) + "\n")
    return path


def write_csv(path, rows: list[dict]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = list(rows[0]) if rows else []
    for r in rows[1:]:
        header += [k for k in r if k not in header]
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=header, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt_float(v) if isinstance(v, float) else v for k, v in r.items()})
    return path


def family_records(family) -> list[dict]:
    recs = []
    om = family.one_minus_r2
    for i in range(len(family)):
        recs.append({
            "tvec": None if family.tvecs is None else [float(v) for v in family.tvecs[i]],
            "w": [[float(z.real), float(z.imag)] for z in family.W[i]],  # re/im pairs
            "one_minus_w2": float(om[i]),
        })
    return recs


def coefficient_records(values) -> list[dict]:
    return [{"index": i, "re": float(c.real), "im": float(c.imag)} for i, c in enumerate(np.asarray(values))]


def load_schema(name: str) -> dict:
    return json.loads(resources.files("ballframes").joinpath("schemas", f"{name}.schema.json").read_text())


SCHEMAS = ("config", "family", "coefficients", "report", "function")
