"""JSON reports and CSV heatmaps.

Output is a pure function of the inputs: no timestamps, stable key order,
floats written with repr precision. Timings are included only on request.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict

import numpy as np

from ..config import SCHEMA_VERSION
from ..core.models import Grid, PositivityReport, TheoremCheck, VerdictRecord
from .convergence import ConvergenceReport
from .pipeline import AnalysisResult
from .sweep import SweepReport

VALUE_FORMAT = "{:.17g}"


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(key): _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [_jsonable(item) for item in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        return number if math.isfinite(number) else None
    if hasattr(value, "value") and isinstance(getattr(value, "value"), str):
        return value.value
    return value


def serialize_verdict(record: VerdictRecord) -> Dict[str, Any]:
    return {
        "verdict": record.verdict.value,
        "value": record.value,
        "location": list(record.location) if record.location is not None else None,
        "coordinates": record.coordinates,
        "detail": record.detail,
    }


def serialize_check(check: TheoremCheck) -> Dict[str, Any]:
    return asdict(check)


def serialize_positivity(report: PositivityReport) -> Dict[str, Any]:
    witness = None
    if report.witness is not None:
        witness = {
            "center": report.witness.center,
            "radius": report.witness.radius,
            "mean": report.witness.mean,
            "support_size": report.witness.support_size,
            "degenerate": report.witness.degenerate,
        }
    return {
        "lambda_min": report.lambda_min,
        "total_mass": report.total_mass,
        "equivalence_consistent": report.equivalence_consistent,
        "verdicts": {name: serialize_verdict(record) for name, record in report.verdicts().items()},
        "witnesses": {"mean_value_nonneg": witness},
        "theorem_checks": [serialize_check(check) for check in report.checks],
        "principal": report.principal,
    }


def analysis_report(
    result: AnalysisResult,
    config: Dict[str, Any],
    record_timings: bool = False,
) -> Dict[str, Any]:
    payload: Dict[str, Any] = {
        "schema": SCHEMA_VERSION,
        "command": "analyze",
        "config": config,
        "admissibility": asdict(result.admissibility),
        "lambda_min": None,
        "hs_norm": result.hs_norm,
        "total_mass": None,
        "equivalence_consistent": None,
        "verdicts": {},
        "witnesses": {},
        "theorem_checks": [],
        "principal": {},
    }
    if result.report is not None:
        payload.update(serialize_positivity(result.report))
    if result.unit_load is not None:
        payload["unit_load_max"] = float(np.max(result.unit_load.values))
    payload["timings"] = dict(result.timings) if record_timings else None
    return _jsonable(payload)


def sweep_report(report: SweepReport, config: Dict[str, Any]) -> Dict[str, Any]:
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "sweep",
        "config": config,
        "param": report.param,
        "values": report.values,
        "bisect_precision": report.precision,
        "thresholds": {
            name: (None if threshold is None else {**asdict(threshold), "value": threshold.value})
            for name, threshold in report.thresholds.items()
        },
        "equivalence_consistent": report.equivalence_consistent,
        "all_positive": report.all_positive,
        "points": [asdict(point) for point in report.points],
        "timings": None,
    }
    return _jsonable(payload)


def convergence_report(report: ConvergenceReport, config: Dict[str, Any]) -> Dict[str, Any]:
    payload = {
        "schema": SCHEMA_VERSION,
        "command": "oracle-check",
        "config": config,
        "family": report.family.value,
        "levels": [asdict(level) for level in report.levels],
        "ratios": report.ratios,
        "observed_order": report.observed_order,
        "timings": None,
    }
    return _jsonable(payload)


def save_report(path: Path, report: Dict[str, Any]):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        json.dump(report, fh, ensure_ascii=False, indent=2, allow_nan=False)
        fh.write("\n")


def _header(grid: Grid):
    if grid.dimension == 1:
        return ["i", "j", "x_i", "x_j", "value"]
    return ["i", "j", "x_i", "y_i", "x_j", "y_j", "value"]


def emit_heatmap_csv(matrix, grid: Grid, path: Path):
    """Write a kernel (M x M) or a field (M) as rows "i,j,coordinates...,value".

    Node indices are 1-based. A field is written with j = i.
    """
    array = np.asarray(matrix, dtype=float)
    path.parent.mkdir(parents=True, exist_ok=True)
    fmt = VALUE_FORMAT.format
    coordinates = [[fmt(c) for c in grid.nodes[k]] for k in range(grid.size)]
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(_header(grid))
        if array.ndim == 1:
            for i, value in enumerate(array.reshape(-1)):
                writer.writerow([i + 1, i + 1, *coordinates[i], *coordinates[i], fmt(value)])
            return
        rows, cols = array.shape
        for i in range(rows):
            for j in range(cols):
                writer.writerow([i + 1, j + 1, *coordinates[i], *coordinates[j], fmt(array[i, j])])
