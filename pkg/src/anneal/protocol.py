"""Repeated prepare/bias/project/measure trials with a classical best-so-far buffer.

A trial fails when post-selection discards the state; failures still consume
a trial.
"""

from __future__ import annotations
import logging
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer

from config.settings import settings
from errors import InvalidArgument
from quantum.statevector import apply_bias_gates, outcome_table, prepare_tour_superposition, project_valid
from tsp.instance import TspInstance
from tsp.tours import Tour, tour_at, tour_distance

logger = logging.getLogger(__name__)


def _fmt(x: Optional[float]) -> str:
    return "-" if x is None else f"{x:.12g}"


class TrialRecord(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    index: int
    ok: bool
    tour: Optional[Tour] = None
    distance: Optional[float] = None
    best_distance: Optional[float] = None

    @field_serializer("tour")
    def _tour_str(self, tour: Optional[Tour]):
        return None if tour is None else str(tour)

    def log_line(self) -> str:
        tour = "-" if self.tour is None else str(self.tour)
        return f"t={self.index} ok={int(self.ok)} tour={tour} D={_fmt(self.distance)} best={_fmt(self.best_distance)}"


class AnnealRun(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    trials: List[TrialRecord]
    best: Optional[Tour] = None
    best_distance: Optional[float] = None
    trial_count: int
    seed: int
    success_prob: float

    @field_serializer("best")
    def _best_str(self, tour: Optional[Tour]):
        return None if tour is None else str(tour)

    def first_hit(self, optimum: float, tol: Optional[float] = None) -> Optional[int]:
        """1-based index of the first trial whose sample reaches `optimum`."""
        tol = settings.tie_tolerance if tol is None else tol
        for rec in self.trials:
            if rec.ok and rec.distance <= optimum + tol:
                return rec.index
        return None

    def log_lines(self) -> List[str]:
        return [rec.log_line() for rec in self.trials]


def run_quantum_annealing(inst: TspInstance, max_trials: int, seed: int, *, target: Optional[float] = None,
                          backend: str = "tour", rng=None) -> AnnealRun:
    """Run up to `max_trials` trials; stop early once `target` is reached if given.

    `rng` may replace the seeded generator; it only needs a `random()` method.
    """
    if max_trials < 1:
        raise InvalidArgument(f"max_trials must be >= 1, got {max_trials}")
    state = apply_bias_gates(prepare_tour_superposition(inst.n, backend=backend), inst)
    # the projected state is identical for every trial
    projected, success = project_valid(state)
    probs, labels = outcome_table(projected)
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]

    rng = np.random.default_rng(seed) if rng is None else rng
    tol = settings.tie_tolerance
    trials: List[TrialRecord] = []
    best: Optional[Tour] = None
    best_d: Optional[float] = None
    for i in range(1, max_trials + 1):
        if rng.random() >= success:
            trials.append(TrialRecord(index=i, ok=False, best_distance=best_d))
            continue
        pos = min(int(np.searchsorted(cdf, rng.random(), side="right")), len(cdf) - 1)
        tour = tour_at(inst.n, int(labels[pos]))
        d = tour_distance(inst, tour)
        if best_d is None or d < best_d:
            best, best_d = tour, d
        trials.append(TrialRecord(index=i, ok=True, tour=tour, distance=d, best_distance=best_d))
        if target is not None and best_d <= target + tol:
            break

    run = AnnealRun(trials=trials, best=best, best_distance=best_d, trial_count=len(trials),
                    seed=seed, success_prob=success)
    logger.debug(f"quantum annealing seed={seed}: {len(trials)} trials, best={_fmt(best_d)}")
    return run
