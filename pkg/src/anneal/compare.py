"""Side-by-side benchmark of the quantum protocol and the Metropolis baseline.

The optimum comes from brute force, so both methods run in benchmark mode with
an early-stop target. A zero budget for a method yields a censored row.
"""

from __future__ import annotations
import logging
import statistics
from typing import List, Optional, Sequence

import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel

from analysis.resources import estimate_resources
from anneal.metropolis import LogarithmicSchedule, Schedule, run_metropolis
from anneal.protocol import run_quantum_annealing
from config.settings import settings
from errors import InvalidArgument
from tsp.instance import TspInstance
from tsp.tours import optimal_tours

logger = logging.getLogger(__name__)


class MethodSummary(BaseModel):
    method: str
    budget: int
    runs: int
    censored: bool
    hits: int
    hit_rate: Optional[float] = None
    mean_to_first_hit: Optional[float] = None
    mean_best_distance: Optional[float] = None
    theoretical_to_first_hit: Optional[float] = None


class ComparisonTable(BaseModel):
    n: int
    alpha: float
    optimal_distance: float
    seeds: List[int]
    rows: List[MethodSummary]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.model_dump() for r in self.rows]).set_index("method")


def _summarize(method: str, budget: int, seeds: Sequence[int], hits: List[Optional[int]],
               bests: List[Optional[float]], theoretical: Optional[float]) -> MethodSummary:
    reached = [h for h in hits if h is not None]
    return MethodSummary(
        method=method,
        budget=budget,
        runs=len(seeds),
        censored=False,
        hits=len(reached),
        hit_rate=len(reached) / len(seeds),
        mean_to_first_hit=statistics.fmean(reached) if reached else None,
        mean_best_distance=statistics.fmean(b for b in bests if b is not None) if any(b is not None for b in bests) else None,
        theoretical_to_first_hit=theoretical,
    )


def _censored(method: str, seeds: Sequence[int], theoretical: Optional[float]) -> MethodSummary:
    return MethodSummary(method=method, budget=0, runs=len(seeds), censored=True, hits=0,
                         theoretical_to_first_hit=theoretical)


def _quantum_once(inst: TspInstance, trials: int, seed: int, optimum: float):
    run = run_quantum_annealing(inst, trials, seed, target=optimum)
    return run.first_hit(optimum), run.best_distance


def _metropolis_once(inst: TspInstance, steps: int, schedule: Schedule, seed: int, optimum: float):
    run = run_metropolis(inst, steps, schedule, seed, target=optimum, stop_at_target=True)
    return run.first_hit_step, run.best_distance


def compare(inst: TspInstance, trials: int, steps: int, seeds: Sequence[int], *,
            schedule: Optional[Schedule] = None, n_jobs: Optional[int] = None) -> ComparisonTable:
    """Trials (quantum) and steps (Metropolis) to first reach the optimum, per seed."""
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise InvalidArgument("compare needs at least one seed")
    if trials < 0 or steps < 0:
        raise InvalidArgument(f"budgets must be >= 0, got trials={trials} steps={steps}")
    schedule = LogarithmicSchedule(1.0) if schedule is None else schedule
    n_jobs = settings.threads if n_jobs is None else n_jobs

    optimum, _ = optimal_tours(inst)
    theoretical = estimate_resources(inst).expected_repeats_to_optimum
    parallel = Parallel(n_jobs=n_jobs, prefer="threads")

    if trials == 0:
        quantum = _censored("quantum", seeds, theoretical)
    else:
        out = parallel(delayed(_quantum_once)(inst, trials, s, optimum) for s in seeds)
        quantum = _summarize("quantum", trials, seeds, [h for h, _ in out], [b for _, b in out], theoretical)

    if steps == 0:
        classical = _censored("metropolis", seeds, None)
    else:
        out = parallel(delayed(_metropolis_once)(inst, steps, schedule, s, optimum) for s in seeds)
        classical = _summarize("metropolis", steps, seeds, [h for h, _ in out], [b for _, b in out], None)

    logger.info(f"compare n={inst.n}: quantum hits {quantum.hits}/{len(seeds)}, "
                f"metropolis ({schedule}) hits {classical.hits}/{len(seeds)}")
    return ComparisonTable(n=inst.n, alpha=inst.alpha, optimal_distance=optimum, seeds=seeds,
                           rows=[quantum, classical])
