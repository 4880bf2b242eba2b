"""
Flat-file report export.

Rows are plain dicts with a fixed column order; CSV goes through pandas, JSON is
written with sorted ledger keys so reruns of one config are byte-identical.
"""

from __future__ import annotations

import json
import logging
import os
from typing import Any, Dict, List, Optional

import pandas as pd

logger = logging.getLogger(__name__)

FORMATS = ("json", "csv")


def rows_to_frame(rows: List[Dict[str, Any]]) -> pd.DataFrame:
    """DataFrame with the union of columns in first-seen order."""
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return pd.DataFrame(rows, columns=columns)


def render_csv(rows: List[Dict[str, Any]]) -> str:
    if not rows:
        return ""
    return rows_to_frame(rows).to_csv(index=False, lineterminator="\n")


def render_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, default=str) + "\n"


def render(
    rows: List[Dict[str, Any]],
    fmt: str = "json",
    meta: Optional[Dict[str, Any]] = None,
) -> str:
    """
    Render rows as CSV or JSON.

    JSON wraps the rows as ``{"meta": ..., "rows": [...]}`` when ``meta`` is given
    (the ledger and config of the run); CSV carries the rows only.
    """
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {FORMATS}")
    if fmt == "csv":
        return render_csv(rows)
    if meta is None:
        return render_json(rows)
    return render_json({"meta": meta, "rows": rows})


def write_report(
    rows: List[Dict[str, Any]],
    path: str,
    fmt: Optional[str] = None,
    meta: Optional[Dict[str, Any]] = None,
) -> int:
    """
    Write rows to ``path``; the format defaults to the file extension.

    Returns number of rows written.
    """
    if fmt is None:
        fmt = "csv" if path.lower().endswith(".csv") else "json"
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(render(rows, fmt, meta))
    logger.info("wrote %d rows to %s", len(rows), path)
    return len(rows)
