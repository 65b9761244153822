"""Resource analysis: phase precision, post-selection cost, the polytime
criterion and degeneracy diagnostics, all evaluated exactly from the Gibbs
distribution over fixed-start tours."""

from __future__ import annotations
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from pydantic import BaseModel
from scipy.special import logsumexp

from config.settings import settings
from errors import DegenerateInstance, InvalidArgument
from tsp.gibbs import TourDistribution, gibbs_distribution
from tsp.instance import TspInstance

logger = logging.getLogger(__name__)

LOG_FLOAT_MAX = math.log(np.finfo(float).max)


class ResourceEstimate(BaseModel):
    """Costs of the post-selected protocol.

    Plain-space costs that exceed the float range are None; the log_ fields
    (natural log) are always finite.
    """
    n: int
    alpha: float
    m_bits: Optional[int]  # None when exact distance ties make the precision formula diverge
    success_prob: float
    expected_repeats: Optional[float]
    expected_repeats_to_optimum: Optional[float]
    optimal_distance: float
    energy_scale: Optional[float]
    aa_repeats: Optional[int]
    log_success_prob: float
    log_repeats_to_optimum: float


class CpReport(BaseModel):
    n: int
    alpha: float
    k: float
    probability: float
    lhs: float
    rhs: float
    satisfied: bool


class DegeneracyReport(BaseModel):
    min_edge_gap: float
    min_tour_gap: float
    edge_ties: bool
    flags: List[str]


class PrecisionReport(BaseModel):
    alpha: float
    d: float
    min_dd: float
    target: float
    m_bits: int
    clamped: bool


def _check_alpha(alpha: float) -> None:
    if not alpha > 1.0 or not math.isfinite(alpha):
        raise InvalidArgument(f"alpha must be a finite value > 1, got {alpha}")


def precision_argument(alpha: float, d: Optional[float], min_dd: float) -> float:
    """2^m target pi * sqrt(alpha^d - 1) / (min_dd * ln alpha); d=None means the worst case d = 1."""
    _check_alpha(alpha)
    d = 1.0 if d is None else d
    if not 0.0 < d <= 1.0:
        raise InvalidArgument(f"leg distance must lie in (0, 1], got {d}")
    if not min_dd > 0.0:
        raise DegenerateInstance(f"minimum distance gap must be > 0, got {min_dd}; the precision requirement diverges")
    return math.pi * math.sqrt(alpha ** d - 1.0) / (min_dd * math.log(alpha))


def precision_report(alpha: float, d: Optional[float], min_dd: float) -> PrecisionReport:
    d = 1.0 if d is None else d
    target = precision_argument(alpha, d, min_dd)
    raw = math.ceil(math.log2(target)) if target > 0.0 else 0
    if raw < 1:
        logger.warning(f"precision target {target:.3g} is below one bit of phase resolution (d={d})")
    return PrecisionReport(alpha=alpha, d=d, min_dd=min_dd, target=target, m_bits=max(1, raw), clamped=raw < 1)


def precision_bits(alpha: float, d: Optional[float], min_dd: float) -> int:
    return precision_report(alpha, d, min_dd).m_bits


def _distinct_edge_values(inst: TspInstance) -> np.ndarray:
    iu = np.triu_indices(inst.n, k=1)
    return np.sort(inst.dist[iu])


def _exp_or_none(log_value: float) -> Optional[float]:
    return math.exp(log_value) if log_value <= LOG_FLOAT_MAX else None


def _distribution(inst: TspInstance, alpha: Optional[float], dist: Optional[TourDistribution]) -> TourDistribution:
    if dist is None:
        return gibbs_distribution(inst, alpha=alpha)
    if dist.n != inst.n or (alpha is not None and dist.alpha != alpha):
        raise InvalidArgument(f"distribution (n={dist.n}, alpha={dist.alpha:g}) does not match the request")
    return dist


def estimate_resources(inst: TspInstance, alpha: Optional[float] = None,
                       dist: Optional[TourDistribution] = None) -> ResourceEstimate:
    dist = _distribution(inst, alpha, dist)
    alpha = dist.alpha
    log_count = math.lgamma(inst.n)
    mask = dist.optimal_mask()
    log_opt = float(logsumexp(dist.log_weights[mask]))
    d_tau = float(dist.distances[mask].min())

    log_success = dist.log_z - log_count
    log_repeats_to_opt = log_count - log_opt
    gaps = np.diff(_distinct_edge_values(inst))
    min_dd = float(gaps.min()) if len(gaps) else 0.0
    m_bits = precision_bits(alpha, 1.0, min_dd) if min_dd > 0.0 else None

    log_aa = math.log(math.pi / 4.0) + 0.5 * log_repeats_to_opt
    aa = _exp_or_none(log_aa)
    est = ResourceEstimate(
        n=inst.n,
        alpha=alpha,
        m_bits=m_bits,
        success_prob=math.exp(log_success),
        expected_repeats=_exp_or_none(-log_success),
        expected_repeats_to_optimum=_exp_or_none(log_repeats_to_opt),
        optimal_distance=d_tau,
        energy_scale=_exp_or_none(dist.beta * d_tau),
        aa_repeats=None if aa is None else math.ceil(aa),
        log_success_prob=log_success,
        log_repeats_to_optimum=log_repeats_to_opt,
    )
    if est.expected_repeats is None or est.success_prob == 0.0:
        logger.warning(f"alpha={alpha:.6g}: post-selection costs leave the float range, ln success={log_success:.6g}")
    logger.debug(f"resources n={inst.n} alpha={alpha:.6g}: ln success={log_success:.6g} "
                 f"ln repeats_to_opt={log_repeats_to_opt:.6g}")
    return est


def cp_check(inst: TspInstance, k: Optional[float] = None, alpha: Optional[float] = None,
             dist: Optional[TourDistribution] = None) -> CpReport:
    """Expected-polytime criterion Pr(optimal) >= n^-k.

    Both sides are in log_alpha units: lhs = -log_alpha(sum over optimal tours
    of alpha^-D_tau), rhs = k log_alpha n - log_alpha Z; lhs <= rhs exactly when
    the criterion holds.
    """
    k = settings.default_k if k is None else k
    if k < 0:
        raise InvalidArgument(f"degree k must be >= 0, got {k}")
    dist = _distribution(inst, alpha, dist)
    alpha = dist.alpha
    mask = dist.optimal_mask()
    prob = math.fsum(dist.probabilities[mask])
    beta = dist.beta
    log_opt = float(logsumexp(dist.log_weights[mask]))
    lhs = -log_opt / beta
    rhs = k * math.log(inst.n) / beta - dist.log_z / beta
    # equality (k = 0 with every tour optimal) must count as satisfied despite rounding
    satisfied = prob * inst.n ** k >= 1.0 - 1e-12
    return CpReport(n=inst.n, alpha=alpha, k=k, probability=prob, lhs=lhs, rhs=rhs, satisfied=satisfied)


def check_alpha_grid(alpha_grid: Sequence[float]) -> List[float]:
    grid = [float(a) for a in alpha_grid]
    if not grid:
        raise InvalidArgument("alpha grid is empty")
    for a in grid:
        _check_alpha(a)
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidArgument(f"alpha grid must be strictly increasing, got {grid}")
    return grid


def cp_sweep(inst: TspInstance, alpha_grid: Sequence[float], k: Optional[float] = None,
             n_jobs: Optional[int] = None) -> List[CpReport]:
    grid = check_alpha_grid(alpha_grid)
    n_jobs = settings.threads if n_jobs is None else n_jobs
    if len(grid) > 1 and n_jobs != 1 and inst.n >= settings.parallel_min_n:
        return Parallel(n_jobs=n_jobs, prefer="threads")(delayed(cp_check)(inst, k, a) for a in grid)
    return [cp_check(inst, k, a) for a in grid]


def degeneracy_report(inst: TspInstance, edge_threshold: Optional[float] = None,
                      tour_threshold: Optional[float] = None,
                      dist: Optional[TourDistribution] = None) -> DegeneracyReport:
    edge_threshold = settings.edge_gap_threshold if edge_threshold is None else edge_threshold
    tour_threshold = settings.tour_gap_threshold if tour_threshold is None else tour_threshold

    gaps = np.diff(_distinct_edge_values(inst))
    min_edge_gap = float(gaps.min()) if len(gaps) else 0.0
    edge_ties = bool(len(gaps) and np.any(gaps == 0.0))

    d = (gibbs_distribution(inst) if dist is None else dist).distances
    best = float(d.min())
    above = d[d - best > settings.tie_tolerance]
    min_tour_gap = float(above.min() - best) if len(above) else 0.0

    flags: List[str] = []
    if edge_ties:
        flags.append("edge_ties")
    if min_edge_gap < edge_threshold:
        flags.append("precision")
    if min_tour_gap < tour_threshold:
        flags.append("tour_gap")
    if flags:
        logger.warning(f"degeneracy flags for {inst!r}: {', '.join(flags)}")
    return DegeneracyReport(min_edge_gap=min_edge_gap, min_tour_gap=min_tour_gap, edge_ties=edge_ties, flags=flags)
