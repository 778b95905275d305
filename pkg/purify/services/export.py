"""Writing result documents and curve tables."""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any

import pandas as pd
from pydantic import BaseModel

from purify.schemas.results import RecurrenceResult

logger = logging.getLogger(__name__)


def write_json(document: BaseModel | dict[str, Any], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(document, BaseModel):
        text = document.model_dump_json(indent=2)
    else:
        text = json.dumps(document, indent=2, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")
    logger.info("wrote %s", path)
    return path


def write_csv(frame: pd.DataFrame, path: Path) -> Path:
    """UTF-8, comma separated, ``.`` decimal point, no index column."""
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, encoding="utf-8", float_format="%.17g")
    logger.info("wrote %s (%d rows)", path, len(frame))
    return path


def recurrence_curves(result: RecurrenceResult) -> pd.DataFrame:
    """Per-sample ``x[, y], C_0, C_k, P_k, ..., overall_success`` for the
    optimized chain followed by the same columns for the CNOT chain."""
    points = pd.DataFrame(result.points)
    points.columns = ["x", "y"][: points.shape[1]]
    columns: dict[str, Any] = {"C_0": result.input_concurrence}
    for k, (c, p) in enumerate(
        zip(result.concurrences, result.probabilities, strict=True), start=1
    ):
        columns[f"C_{k}"] = c
        columns[f"P_{k}"] = p
    columns["overall_success"] = result.overall_success
    for k, (c, p) in enumerate(
        zip(result.cnot_concurrences, result.cnot_probabilities, strict=True), start=1
    ):
        columns[f"cnot_C_{k}"] = c
        columns[f"cnot_P_{k}"] = p
    columns["cnot_overall_success"] = result.cnot_overall_success
    return pd.concat([points, pd.DataFrame(columns)], axis=1)


def recurrence_table(result: RecurrenceResult) -> pd.DataFrame:
    """One row per iteration: optimized gate next to the CNOT baseline."""
    return pd.DataFrame(
        [
            {
                "iteration": record.iteration,
                "branch": record.branch_label,
                "input_cost": record.input_cost,
                "average_cost": record.average_cost,
                "cnot_same_ensemble_cost": record.cnot_same_ensemble_cost,
                "cnot_chain_cost": record.cnot_chain_cost,
                "mean_success_probability": record.mean_success_probability,
                "cnot_mean_success_probability": record.cnot_mean_success_probability,
                "dropped": record.dropped,
                "status": record.status,
            }
            for record in result.iterations
        ]
    )
