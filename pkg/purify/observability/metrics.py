from __future__ import annotations

import logging
from pathlib import Path

from prometheus_client import REGISTRY, Counter, Gauge, Histogram, write_to_textfile

logger = logging.getLogger(__name__)

COST_EVALUATIONS = Counter(
    "purify_cost_evaluations_total",
    "Ensemble-average cost evaluations",
    ["policy"],
)
GRADIENT_EVALUATIONS = Counter(
    "purify_gradient_evaluations_total",
    "Ensemble-average gradient evaluations",
    ["mode"],
)
FALLBACK_SAMPLES = Counter(
    "purify_gradient_fallback_samples_total",
    "Samples differentiated by central differences inside dual mode",
)
DROPPED_SAMPLES = Counter(
    "purify_dropped_samples_total",
    "Ensemble members dropped for a vanishing kept-branch probability",
)
OPTIMIZER_RUNS = Counter(
    "purify_optimizer_runs_total",
    "Completed L-BFGS-B runs",
    ["status"],
)
OPTIMIZER_DURATION = Histogram(
    "purify_optimizer_duration_seconds",
    "Wall time of a single L-BFGS-B run",
    buckets=(0.1, 0.5, 1.0, 5.0, 15.0, 60.0, 300.0),
)
BEST_COST = Gauge(
    "purify_best_cost",
    "Best average cost found by the most recent multistart search",
)


def write_metrics(path: Path) -> None:
    """Dump the default registry in the Prometheus text format."""
    path.parent.mkdir(parents=True, exist_ok=True)
    write_to_textfile(str(path), REGISTRY)
    logger.debug("Wrote metrics to %s", path)
