"""CSV/JSON artifact writing with provenance headers.

Every artifact carries the resolved configuration and a SHA-256 of its data
body.  CSV files put both in leading ``#`` comment lines; JSON files put them
under a top-level ``"provenance"`` key (JSON has no comments).  Floats are
written with 17 significant digits, which round-trips IEEE doubles.
"""
from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path


def fmt(x) -> str:
    """17-significant-digit text for a float; ints and strings pass through."""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    try:
        return format(float(x), ".17g")
    except (TypeError, ValueError):
        return str(x)


def render_csv(columns, rows) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def content_hash(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def write_csv(path, columns, rows, config: dict | None = None) -> str:
    """Write a CSV artifact; returns the body hash."""
    body = render_csv(columns, rows)
    digest = content_hash(body)
    header = []
    if config is not None:
        header.append("# config: " + json.dumps(config, sort_keys=True, separators=(",", ":")))
    header.append("# sha256: " + digest)
    Path(path).write_text("\n".join(header) + "\n" + body)
    return digest


def read_csv(path):
    """Parse a CSV artifact, skipping ``#`` lines.  Returns ``(columns, rows)``
    with every field converted to float."""
    columns = None
    rows = []
    for line in Path(path).read_text().splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split(",")]
        if columns is None:
            columns = parts
            continue
        rows.append([float(p) for p in parts])
    if columns is None:
        raise ValueError(f"{path}: no header row")
    return columns, rows


def _jsonable(obj):
    if isinstance(obj, float):
        if math.isfinite(obj):
            return obj
        return fmt(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalars
        return _jsonable(obj.item())
    return obj


def dumps(payload) -> str:
    return json.dumps(_jsonable(payload), sort_keys=True, indent=2)


def write_json(path, payload: dict, config: dict | None = None) -> str:
    body = dumps(payload)
    digest = content_hash(body)
    doc = dict(_jsonable(payload))
    doc["provenance"] = {"config": _jsonable(config or {}), "content_sha256": digest}
    Path(path).write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return digest
