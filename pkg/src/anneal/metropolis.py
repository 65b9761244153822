"""Classical Metropolis annealing baseline over fixed-start tours.

Moves swap two non-start positions. The energy change of a swap touches at
most four legs and is evaluated in O(1); accepted moves recompute D exactly.
"""

from __future__ import annotations
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_serializer

from config.settings import settings
from errors import InvalidArgument
from tsp.instance import TspInstance
from tsp.tours import Tour, tour_count, tour_index

logger = logging.getLogger(__name__)

_BLOCK = 65536
_MAX_EXPONENT = 700.0


class LogarithmicSchedule:
    """beta(t) = ln(1 + t) / c."""

    def __init__(self, c: float):
        if not c > 0:
            raise InvalidArgument(f"logarithmic schedule constant must be > 0, got {c}")
        self.c = float(c)

    def beta(self, t: int) -> float:
        return math.log1p(t) / self.c

    def __str__(self) -> str:
        return f"log:{self.c:g}"


class GeometricSchedule:
    """beta(t) = beta0 / r^t, i.e. temperature shrinks by r each step."""

    def __init__(self, r: float, beta0: float = 1.0):
        if not 0.0 < r < 1.0:
            raise InvalidArgument(f"geometric cooling factor must lie in (0, 1), got {r}")
        if not beta0 > 0:
            raise InvalidArgument(f"initial beta must be > 0, got {beta0}")
        self.r = float(r)
        self.beta0 = float(beta0)
        self._rate = -math.log(self.r)

    def beta(self, t: int) -> float:
        return self.beta0 * math.exp(min(t * self._rate, _MAX_EXPONENT))

    def __str__(self) -> str:
        return f"geo:{self.r:g}"


class ConstantSchedule:
    def __init__(self, beta: float):
        if not beta >= 0:
            raise InvalidArgument(f"beta must be >= 0, got {beta}")
        self._beta = float(beta)

    def beta(self, t: int) -> float:
        return self._beta

    def __str__(self) -> str:
        return f"const:{self._beta:g}"


Schedule = LogarithmicSchedule | GeometricSchedule | ConstantSchedule

_SCHEDULES = {"log": LogarithmicSchedule, "geo": GeometricSchedule, "const": ConstantSchedule}


def parse_schedule(text: str) -> Schedule:
    """Parse `log:<c>`, `geo:<r>` or `const:<beta>`."""
    kind, sep, value = text.strip().partition(":")
    if not sep or kind not in _SCHEDULES:
        raise InvalidArgument(f"unknown schedule {text!r}; expected log:<c>, geo:<r> or const:<beta>")
    try:
        param = float(value)
    except ValueError:
        raise InvalidArgument(f"schedule parameter {value!r} is not a number") from None
    return _SCHEDULES[kind](param)


class Checkpoint(BaseModel):
    step: int
    beta: float
    distance: float
    best_distance: float


class MetropolisRun(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    steps: int
    steps_taken: int
    schedule: str
    seed: int
    best: Tour
    best_distance: float
    final_distance: float
    acceptance_rate: float
    uphill_proposed: int
    uphill_accepted: int
    first_hit_step: Optional[int] = None
    checkpoints: List[Checkpoint] = []
    visits: Optional[List[int]] = None

    @field_serializer("best")
    def _best_str(self, tour: Tour):
        return str(tour)

    def visit_distribution(self) -> np.ndarray:
        if self.visits is None:
            raise InvalidArgument("run was made without track_visits")
        counts = np.asarray(self.visits, dtype=float)
        return counts / counts.sum()


def _swap_delta(order: List[int], m: np.ndarray, i: int, j: int) -> float:
    """Change in tour length from swapping positions 1 <= i < j <= n-1."""
    n = len(order)
    a, ci, cj, f = order[i - 1], order[i], order[j], order[(j + 1) % n]
    if j == i + 1:
        return m[a, cj] + m[ci, f] - m[a, ci] - m[cj, f]
    b, e = order[i + 1], order[j - 1]
    return (m[a, cj] + m[cj, b] + m[e, ci] + m[ci, f]
            - m[a, ci] - m[ci, b] - m[e, cj] - m[cj, f])


def _length(order: List[int], m: np.ndarray) -> float:
    return math.fsum(m[order[k], order[(k + 1) % len(order)]] for k in range(len(order)))


def _draw_block(rng: np.random.Generator, n: int, size: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    i = rng.integers(1, n, size=size)
    j = rng.integers(1, n - 1, size=size)
    j = j + (j >= i)
    lo, hi = np.minimum(i, j), np.maximum(i, j)
    return lo, hi, rng.random(size)


def run_metropolis(inst: TspInstance, steps: int, schedule: Schedule, seed: int, *,
                   target: Optional[float] = None, stop_at_target: bool = False,
                   track_visits: bool = False, checkpoint_every: Optional[int] = None) -> MetropolisRun:
    """Anneal for `steps` proposals from a seeded random start tour.

    With `target` the first step at which the current tour reaches it is
    recorded; `stop_at_target` additionally ends the run there.
    """
    if steps < 1:
        raise InvalidArgument(f"steps must be >= 1, got {steps}")
    if checkpoint_every is not None and checkpoint_every < 1:
        raise InvalidArgument(f"checkpoint interval must be >= 1, got {checkpoint_every}")
    n = inst.n
    m = inst.dist
    tol = settings.tie_tolerance
    rng = np.random.default_rng(seed)

    order = [0] + [int(c) for c in rng.permutation(np.arange(1, n))]
    current = _length(order, m)
    best_order, best = list(order), current
    first_hit = 0 if target is not None and current <= target + tol else None

    visits: Dict[Tuple[int, ...], int] = {}
    checkpoints: List[Checkpoint] = []
    accepted = uphill_proposed = uphill_accepted = 0
    taken = 0
    lo = hi = u = None

    for t in range(1, steps + 1):
        if stop_at_target and first_hit is not None:
            break
        k = (t - 1) % _BLOCK
        if k == 0:
            lo, hi, u = _draw_block(rng, n, min(_BLOCK, steps - t + 1))
        i, j = int(lo[k]), int(hi[k])
        delta = _swap_delta(order, m, i, j)
        beta = schedule.beta(t)
        if delta > tol:
            uphill_proposed += 1
            ok = bool(u[k] < math.exp(-min(beta * delta, _MAX_EXPONENT)))
            uphill_accepted += ok
        else:
            ok = True
        if ok:
            accepted += 1
            order[i], order[j] = order[j], order[i]
            current = _length(order, m)
            if current < best - tol:
                best_order, best = list(order), current
            if first_hit is None and target is not None and current <= target + tol:
                first_hit = t
        taken = t
        if track_visits:
            key = tuple(order)
            visits[key] = visits.get(key, 0) + 1
        if checkpoint_every is not None and t % checkpoint_every == 0:
            checkpoints.append(Checkpoint(step=t, beta=beta, distance=current, best_distance=best))

    visit_counts = None
    if track_visits:
        visit_counts = [0] * tour_count(n)
        for key, count in visits.items():
            visit_counts[tour_index(Tour([c + 1 for c in key]))] = count

    run = MetropolisRun(
        steps=steps,
        steps_taken=taken,
        schedule=str(schedule),
        seed=seed,
        best=Tour([c + 1 for c in best_order]),
        best_distance=best,
        final_distance=current,
        acceptance_rate=accepted / taken if taken else 0.0,
        uphill_proposed=uphill_proposed,
        uphill_accepted=uphill_accepted,
        first_hit_step=first_hit,
        checkpoints=checkpoints,
        visits=visit_counts,
    )
    logger.debug(f"metropolis {schedule} seed={seed}: {taken} steps, best={best:.6g}, "
                 f"acceptance={run.acceptance_rate:.3f}")
    return run
