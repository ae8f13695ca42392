"""Fixed-column CSV / JSON table output and run manifests."""

from __future__ import annotations

import hashlib
import json
import math
from datetime import datetime, timezone
from pathlib import Path

from . import __version__


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return f"{v:.17g}"
    return str(v)


def write_csv(path, columns, rows) -> None:
    """One header row, then ``rows`` (dicts) in ``columns`` order; floats at 17 significant digits."""
    with open(path, "w", newline="") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row.get(c)) for c in columns) + "\n")


def write_json(path, payload) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, allow_nan=True) + "\n")


def write_table(out_dir, stem, columns, rows, extra: dict | None = None) -> None:
    """``<stem>.csv`` plus ``<stem>.json`` holding the same rows under ``"rows"``."""
    out_dir = Path(out_dir)
    rows = [{c: r.get(c) for c in columns} for r in rows]
    write_csv(out_dir / f"{stem}.csv", columns, rows)
    payload = {"columns": list(columns), "rows": rows}
    if extra:
        payload.update(extra)
    write_json(out_dir / f"{stem}.json", payload)


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def manifest(command: str, params: dict, seed: int | None, inputs=()) -> dict:
    return {
        "command": command,
        "params": params,
        "seed": seed,
        "tool_version": __version__,
        "inputs": {str(p): file_digest(p) for p in inputs},
        "started": datetime.now(timezone.utc).isoformat(),
    }
