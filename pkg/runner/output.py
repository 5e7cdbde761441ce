# runner/output.py
"""results.csv and manifest.json"""
from __future__ import annotations
import csv
import json
import math
import os
from typing import Any, Dict, Iterable, List, Optional

from field.model import ModelParams
from models.models import METHOD_TAGS, RESULT_COLUMNS, ResultRow, RunManifest

# wall_seconds is the only column allowed to differ between identical runs
CANONICAL_COLUMNS = [c for c in RESULT_COLUMNS if c != "wall_seconds"]


def make_row(
    experiment: str,
    params: ModelParams,
    method: str,
    value: float,
    std_error: float = 0.0,
    n_samples: int = 0,
    replicas: int = 1,
    **overrides: Any,
) -> ResultRow:
    """One results row; `overrides` replaces model columns (e.g. h for a grid point)"""
    if method not in METHOD_TAGS:
        raise ValueError(f"unknown method tag {method!r}")
    row: ResultRow = {
        "experiment": experiment,
        "d": params.d,
        "N": params.N,
        "beta": float(params.beta),
        "h": float(params.h),
        "K": float(params.K),
        "law": params.law.kind,
        "seed": params.seed,
        "method": method,
        "value": float(value),
        "std_error": float(std_error),
        "n_samples": int(n_samples),
        "replicas": int(replicas),
        "wall_seconds": 0.0,
    }
    row.update(overrides)  # type: ignore[typeddict-item]
    return row


def _sort_key(row: ResultRow):
    key = []
    for column in CANONICAL_COLUMNS:
        value = row[column]  # type: ignore[literal-required]
        if isinstance(value, float):
            key.append((1, math.isnan(value), 0.0 if math.isnan(value) else value))
        else:
            key.append((0, False, value))
    return tuple(key)


def sort_rows(rows: Iterable[ResultRow]) -> List[ResultRow]:
    return sorted(rows, key=_sort_key)


def format_value(value: Any) -> str:
    """Shortest round-trip text for floats, plain text otherwise"""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_results(rows: Iterable[ResultRow], output_dir: str) -> str:
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, "results.csv")
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for row in sort_rows(rows):
            writer.writerow([format_value(row[c]) for c in RESULT_COLUMNS])  # type: ignore[literal-required]
    return path


def read_results(path: str) -> List[Dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


def write_manifest(
    output_dir: str,
    version: str,
    config_path: Optional[str],
    suite: str,
    seed: int,
    resolved: Dict[str, Dict[str, Any]],
    n_rows: int,
) -> str:
    manifest: RunManifest = {
        "version": version,
        "config_path": config_path or "",
        "suite": suite,
        "seed": seed,
        "resolved": resolved,
        "rows": n_rows,
    }
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)
    return path
