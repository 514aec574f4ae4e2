"""Report emission: deterministic JSON and CSV with atomic writes.

JSON payloads sort keys and encode complex numbers as {re, im}, so identical
configs and seeds reproduce byte-identical files except for the timestamp
field.  Files are staged to a temporary sibling and renamed into place, so a
failed run never leaves partial reports.
"""

from __future__ import annotations

import csv
import datetime as _dt
import json
import os
import tempfile
from typing import Iterable, Optional, Sequence

import numpy as np

TOOL_NAME = "berglab"

# Neutral identifiers for the mathematical statements a report exercises.
CLAIMS = {
    "axioms": "structural identities of the model spaces (kernel, involution, metric, measures)",
    "schur-test": "matrix-weighted Schur domination of the discretized operator norm",
    "kernel-power-integrals": "uniform-in-z bounds on normalized kernel-power integrals",
    "toeplitz-calculus": "Toeplitz assembly, contraction bound, and involutive covariance",
    "translation-identities": "unitarity and involutivity of translation operators on certified modes",
    "rank-one-factorization": "rank-one operators as sums of Toeplitz products through a point mass",
    "compactness-diagnostics": "kernel-state decay and conjugated-shell estimates for compactness",
    "berezin-transform": "operator-valued kernel-state expectations and their boundary decay",
    "boundedness-integrals": "sup-z L^p integral tests sufficient for operator boundedness",
    "essential-norm": "lower profile of the essential norm via conjugated probes",
    "covering": "bounded-overlap metric covering with cells of diameter at most 4r",
    "localization": "approximation of an operator by its covering localization",
    "injectivity": "full rank of the operator-to-kernel-state-samples map",
    "reproducibility": "deterministic reports from identical config and seed",
}


def jsonable(obj):
    """Recursively convert numpy/complex structures to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json_atomic(path: str, payload: dict) -> None:
    _atomic_write(path, json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n")


def write_csv_atomic(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    import io

    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
    _atomic_write(path, buf.getvalue())


def tool_version() -> str:
    from . import __version__

    return __version__


def report_envelope(command: str, claim_id: str, config_echo: dict, seed: int,
                    payload: dict, timestamp: Optional[str] = None) -> dict:
    if claim_id not in CLAIMS:
        raise KeyError(f"unknown claim id {claim_id!r}")
    if timestamp is None:
        timestamp = _dt.datetime.now(_dt.timezone.utc).isoformat()
    return {
        "tool": TOOL_NAME,
        "version": tool_version(),
        "command": command,
        "claim": {"id": claim_id, "statement": CLAIMS[claim_id]},
        "seed": seed,
        "config": config_echo,
        "timestamp": timestamp,
        "result": payload,
    }
