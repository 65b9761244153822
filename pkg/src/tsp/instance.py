"""Symmetric TSP instances in normalized form, plus the gate biases they induce."""

from __future__ import annotations
import logging
import math
from typing import Optional

import numpy as np

from config.settings import settings
from errors import DegenerateInstance, InvalidArgument, InvalidEdge, InvalidSize

logger = logging.getLogger(__name__)

MIN_CITIES = 3
SYMMETRY_TOL = 1e-12
NORMALIZED_MAX_TOL = 1e-12


def _check_square(m: np.ndarray) -> None:
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidArgument(f"distance matrix must be square, got shape {m.shape}")


def _off_diagonal(m: np.ndarray) -> np.ndarray:
    return m[~np.eye(m.shape[0], dtype=bool)]


def normalize(raw) -> np.ndarray:
    """Divide every entry by the largest off-diagonal distance.

    Zero or negative off-diagonal entries are rejected: the precision analysis
    diverges as a distance goes to zero.
    """
    m = np.array(raw, dtype=float)
    _check_square(m)
    if m.shape[0] < 2:
        raise InvalidSize("need at least two cities to normalize")
    if not np.allclose(m, m.T, rtol=0.0, atol=SYMMETRY_TOL):
        raise InvalidArgument("distance matrix is not symmetric")
    if np.any(np.abs(np.diag(m)) > SYMMETRY_TOL):
        raise InvalidArgument("distance matrix must have a zero diagonal")
    off = _off_diagonal(m)
    if np.any(off <= 0.0):
        raise DegenerateInstance("off-diagonal distances must be strictly positive")
    out = m / off.max()
    np.fill_diagonal(out, 0.0)
    return out


class TspInstance:
    """Immutable normalized instance.

    `dist` is read-only; `alpha` is the bias base and `beta` is always derived
    from it.
    """

    def __init__(self, dist, alpha: Optional[float] = None):
        d = np.array(dist, dtype=float)
        _check_square(d)
        n = d.shape[0]
        if n < MIN_CITIES:
            raise InvalidSize(f"need at least {MIN_CITIES} cities, got {n}")
        alpha = settings.default_alpha if alpha is None else float(alpha)
        if not alpha > 1.0 or not math.isfinite(alpha):
            raise InvalidArgument(f"alpha must be a finite value > 1, got {alpha}")
        if not np.array_equal(d, d.T):
            if not np.allclose(d, d.T, rtol=0.0, atol=SYMMETRY_TOL):
                raise InvalidArgument("distance matrix is not symmetric")
            d = (d + d.T) / 2.0
        if np.any(np.diag(d) != 0.0):
            raise InvalidArgument("distance matrix must have a zero diagonal")
        off = _off_diagonal(d)
        if np.any(off <= 0.0):
            raise DegenerateInstance("off-diagonal distances must be strictly positive")
        if np.any(off > 1.0 + NORMALIZED_MAX_TOL) or abs(off.max() - 1.0) > NORMALIZED_MAX_TOL:
            raise InvalidArgument("distances are not normalized (max must equal 1); use TspInstance.from_raw")
        d.setflags(write=False)
        self._dist = d
        self._alpha = alpha

    @classmethod
    def from_raw(cls, raw, alpha: Optional[float] = None) -> "TspInstance":
        return cls(normalize(raw), alpha=alpha)

    @property
    def n(self) -> int:
        return self._dist.shape[0]

    @property
    def dist(self) -> np.ndarray:
        return self._dist

    @property
    def alpha(self) -> float:
        return self._alpha

    @property
    def beta(self) -> float:
        return math.log(self._alpha)

    def with_alpha(self, alpha: float) -> "TspInstance":
        return TspInstance(self._dist, alpha=alpha)

    def bias_matrix(self) -> np.ndarray:
        q = np.power(self._alpha, -self._dist)
        np.fill_diagonal(q, 1.0)
        return q

    def distance(self, j: int, k: int) -> float:
        self._check_edge(j, k)
        return float(self._dist[j - 1, k - 1])

    def _check_edge(self, j: int, k: int) -> None:
        if not (1 <= j <= self.n and 1 <= k <= self.n):
            raise InvalidEdge(f"edge ({j},{k}) outside cities 1..{self.n}")
        if j == k:
            raise InvalidEdge(f"edge ({j},{k}) is a self-loop")

    def __repr__(self) -> str:
        return f"TspInstance(n={self.n}, alpha={self._alpha:.6g})"


def bias_of(inst: TspInstance, j: int, k: int) -> float:
    """q_jk = alpha^-d_jk for 1-based cities j != k; lies in [1/alpha, 1)."""
    return inst.alpha ** (-inst.distance(j, k))


def random_distance_matrix(n: int, seed: int) -> np.ndarray:
    """Raw symmetric matrix with i.i.d. uniform(0.05, 1) entries above the diagonal."""
    if n < MIN_CITIES:
        raise InvalidSize(f"need at least {MIN_CITIES} cities, got {n}")
    rng = np.random.default_rng(seed)
    iu = np.triu_indices(n, k=1)
    m = np.zeros((n, n))
    m[iu] = rng.uniform(0.05, 1.0, size=len(iu[0]))
    return m + m.T


def random_instance(n: int, seed: int, alpha: Optional[float] = None) -> TspInstance:
    inst = TspInstance.from_raw(random_distance_matrix(n, seed), alpha=alpha)
    logger.debug(f"random instance n={n} seed={seed}")
    return inst
