"""Deterministic JSON report rendering.

Every float is rounded to 12 significant digits and negative zero is
normalized, so identical runs produce byte-identical reports fit for
golden-file comparison. Files are written atomically: a failed run never
leaves a partial report behind.
"""
from __future__ import annotations

import json
import os
import tempfile

import numpy as np

REPORT_SCHEMA = "aos-report/1"


def _round_float(v: float) -> float:
    return float(f"{float(v):.12g}") + 0.0  # +0.0 folds -0.0 into 0.0


def round_floats(obj):
    """Copy of a JSON-ish structure with all floats at 12 significant digits."""
    if isinstance(obj, bool):
        return obj
    if isinstance(obj, (float, np.floating)):
        return _round_float(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [round_floats(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {k: round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [round_floats(v) for v in obj]
    return obj


def make_report(kind: str, config: dict, payload: dict) -> dict:
    return {"schema_version": REPORT_SCHEMA, "kind": kind, "config": config, **payload}


def render_report(doc: dict) -> str:
    return json.dumps(round_floats(doc), indent=2) + "\n"


def write_report(doc: dict, path: str | None) -> str:
    """Render; write atomically when a path is given. Returns the text."""
    text = render_report(doc)
    if path is not None:
        directory = os.path.dirname(os.path.abspath(path))
        fd, tmp = tempfile.mkstemp(prefix=".aos-report-", dir=directory)
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
    return text
