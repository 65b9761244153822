"""Exact Gibbs distribution over fixed-start tours.

Weights are alpha^-D = exp(-beta D). Everything is computed in log space and
normalized through logsumexp so the partition function stays finite for very
large alpha.
"""

from __future__ import annotations
import logging
import math
from typing import Iterable, Iterator, List, Optional, Tuple

import mpmath
import numpy as np
from scipy.special import logsumexp

from errors import InvalidArgument
from tsp.instance import TspInstance
from tsp.tours import Tour, optimal_indices, tour_at, tour_count, tour_distances, tour_index

logger = logging.getLogger(__name__)


class TourDistribution:
    def __init__(self, n: int, alpha: float, distances: np.ndarray):
        self.n = n
        self.alpha = alpha
        self.beta = math.log(alpha)
        self.distances = distances
        self.log_weights = -self.beta * distances
        self.log_z = float(logsumexp(self.log_weights))
        self.probabilities = np.exp(self.log_weights - self.log_z)
        self.weights = np.exp(self.log_weights)
        self.z = math.exp(self.log_z)

    def __len__(self) -> int:
        return len(self.distances)

    @property
    def entries(self) -> Iterator[Tuple[Tour, float, float]]:
        for i in range(len(self.distances)):
            yield tour_at(self.n, i), float(self.weights[i]), float(self.probabilities[i])

    def probability_of(self, tour: Tour) -> float:
        if tour.n != self.n:
            raise InvalidArgument(f"tour over {tour.n} cities is not in an n={self.n} distribution")
        return float(self.probabilities[tour_index(tour)])

    def top(self, k: int = 5) -> List[Tuple[Tour, float, float]]:
        # stable sort keeps enumeration order among equal probabilities
        idx = np.argsort(-self.probabilities, kind="stable")[:k]
        return [(tour_at(self.n, int(i)), float(self.distances[i]), float(self.probabilities[i])) for i in idx]

    def optimal_mask(self, tol: Optional[float] = None) -> np.ndarray:
        _, idx = optimal_indices(self.distances, tol)
        mask = np.zeros(len(self.distances), dtype=bool)
        mask[idx] = True
        return mask

    def dump(self) -> str:
        lines = [f"{t} {w:.12g} {p:.12g}" for t, w, p in self.entries]
        lines.append(f"Z {self.z:.12g}")
        return "\n".join(lines) + "\n"


def gibbs_distribution(inst: TspInstance, alpha: Optional[float] = None,
                       cap: Optional[int] = None, n_jobs: Optional[int] = None) -> TourDistribution:
    alpha = inst.alpha if alpha is None else alpha
    if not alpha > 1.0:
        raise InvalidArgument(f"alpha must be > 1, got {alpha}")
    dist = TourDistribution(inst.n, alpha, tour_distances(inst, cap=cap, n_jobs=n_jobs))
    logger.debug(f"gibbs n={inst.n} alpha={alpha:.6g}: {len(dist)} tours, log Z={dist.log_z:.6g}")
    return dist


def solution_probability(dist: TourDistribution, opt: Iterable[Tour]) -> float:
    opt = set(opt)
    if not opt:
        raise InvalidArgument("the set of optimal tours is empty")
    return math.fsum(dist.probability_of(t) for t in opt)


def unbiased_solution_probability(n: int, opt: Iterable[Tour]) -> float:
    """Probability of measuring a solution from the unbiased superposition."""
    opt = set(opt)
    if not opt:
        raise InvalidArgument("the set of optimal tours is empty")
    return len(opt) / tour_count(n)


def z_bounds(n: int, alpha: float) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """((n-1)!/alpha^n, (n-1)!/alpha): every weight lies in [alpha^-n, alpha^-1]."""
    if n < 3:
        raise InvalidArgument(f"need n >= 3, got {n}")
    if not alpha > 1.0:
        raise InvalidArgument(f"alpha must be > 1, got {alpha}")
    count = mpmath.factorial(n - 1)
    a = mpmath.mpf(alpha)
    return count / a ** n, count / a


def log_z_bounds(n: int, alpha: float) -> Tuple[float, float]:
    lower, upper = z_bounds(n, alpha)
    return float(mpmath.log(lower)), float(mpmath.log(upper))


def total_variation(p, q) -> float:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise InvalidArgument(f"distributions differ in support size: {p.shape} vs {q.shape}")
    return 0.5 * float(np.abs(p - q).sum())
