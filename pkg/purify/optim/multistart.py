"""Multi-start search over the angle box."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from purify.observability.metrics import BEST_COST
from purify.optim.lbfgs import LbfgsResult, Objective, lbfgs_minimize
from purify.quantum.gellmann import GateAngles, angle_bounds, cnot_angles
from purify.schemas.run import OptimizerConfig

logger = logging.getLogger(__name__)


@dataclass
class MultistartResult:
    best: LbfgsResult
    runs: list[LbfgsResult] = field(default_factory=list)

    @property
    def angles(self) -> GateAngles:
        return self.best.angles

    @property
    def value(self) -> float:
        return self.best.value


def restart_points(config: OptimizerConfig) -> NDArray[np.float64]:
    """``(restarts, 15)`` uniform points in the box.

    The generator fills rows in order, so the first ``k`` points do not depend
    on how many are requested.
    """
    bounds = angle_bounds()
    rng = np.random.default_rng(config.restart_seed)
    return rng.uniform(bounds[:, 0], bounds[:, 1], size=(config.restarts, len(bounds)))


def multistart(
    objective: Objective,
    config: OptimizerConfig | None = None,
    extra_starts: Sequence[GateAngles] = (),
    diagnose: Callable[[NDArray[np.float64]], list[str]] | None = None,
) -> MultistartResult:
    """Run L-BFGS-B from the CNOT angles, ``extra_starts`` and ``restarts``
    seeded random points; keep the lowest cost (earliest start on ties)."""
    config = config or OptimizerConfig()
    starts: list[NDArray[np.float64]] = [cnot_angles().as_array()]
    starts.extend(s.as_array() for s in extra_starts)
    starts.extend(restart_points(config))

    runs: list[LbfgsResult] = []
    for index, start in enumerate(starts):
        run = lbfgs_minimize(objective, start, config)
        runs.append(run)
        logger.debug(
            "start %d: f=%.6g status=%s iterations=%d",
            index,
            run.value,
            run.status.value,
            run.iterations,
        )

    best = min(runs, key=lambda run: run.value)
    if diagnose is not None:
        best.diagnostics.extend(diagnose(best.angles.as_array()))
    BEST_COST.set(best.value)
    logger.info("multistart finished: %d starts, best f=%.6g", len(starts), best.value)
    return MultistartResult(best=best, runs=runs)
