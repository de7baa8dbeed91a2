"""CSV / JSON / JSON-lines writers for traces, scans and reports.

Output is deterministic: keys sorted, floats in shortest round-trip form,
exact rationals as ``"p/q"`` strings.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .iet import format_scalar
from .rauzy import InductionTrace

TRACE_COLUMNS = ("m", "rule", "total", "p1_b", "p2_min_ratio", "p1", "p2", "strictly_irreducible")


def _plain(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, Fraction):
        return format_scalar(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_plain(x) for x in v]
    return str(v)


def dumps(doc) -> str:
    return json.dumps(_plain(doc), sort_keys=True, indent=2) + "\n"


def write_json(path: Path, doc) -> Path:
    path = Path(path)
    path.write_text(dumps(doc))
    return path


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (Fraction, float, np.floating)):
        return format_scalar(v)
    return str(v)


def write_csv(path: Path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def step_record(step) -> dict:
    return {
        "m": step.m,
        "rule": None if step.rule is None else str(step.rule),
        "lambda_m": [format_scalar(v) for v in step.lambda_m],
        "pi_m": list(step.pi_m.images),
        "return_times": list(step.return_times),
        "total": format_scalar(step.total),
        "p1_b": step.p1_b,
        "p2_min_ratio": None if step.p2_min_ratio is None else format_scalar(step.p2_min_ratio),
        "p1": step.p1,
        "p2": step.p2,
        "strictly_irreducible": step.strictly_irreducible,
    }


def write_trace(trace: InductionTrace, csv_path: Path, jsonl_path: Path | None = None):
    """CSV summary for steps ``m >= 1`` and JSON lines for every step including ``m = 0``."""
    records = [step_record(s) for s in trace.steps]
    write_csv(csv_path, TRACE_COLUMNS, ([r[c] for c in TRACE_COLUMNS] for r in records[1:]))
    if jsonl_path is not None:
        with Path(jsonl_path).open("w") as fh:
            for r in records:
                fh.write(json.dumps(r, sort_keys=True) + "\n")


def read_trace_jsonl(path: Path) -> list[dict]:
    return [json.loads(line) for line in Path(path).read_text().splitlines() if line.strip()]
