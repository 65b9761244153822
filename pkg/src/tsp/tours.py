"""Fixed-start closed tours: representation, enumeration and scoring.

Tours always start at city 1 and are enumerated in lexicographic order of the
remaining n-1 cities, so every tour has a stable index in [0, (n-1)!). Bulk
scoring works per first-step subtree (all tours whose second city is c), which
gives contiguous, disjoint index ranges that can be scored on separate workers.
"""

from __future__ import annotations
import itertools
import logging
import math
import re
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from joblib import Parallel, delayed

from config.settings import settings
from errors import InvalidArgument, InvalidSize, TooLarge
from tsp.instance import MIN_CITIES, TspInstance

logger = logging.getLogger(__name__)

_TOUR_RE = re.compile(r"^\(1\)(.*)\(1\)$")


class Tour:
    __slots__ = ("_order",)

    def __init__(self, order: Sequence[int]):
        order = tuple(int(c) for c in order)
        n = len(order)
        if n < MIN_CITIES:
            raise InvalidArgument(f"a tour needs at least {MIN_CITIES} cities, got {n}")
        if order[0] != 1:
            raise InvalidArgument(f"tours start at city 1, got {order}")
        if sorted(order) != list(range(1, n + 1)):
            raise InvalidArgument(f"{order} is not a permutation of 1..{n}")
        self._order = order

    @property
    def order(self) -> Tuple[int, ...]:
        return self._order

    @property
    def n(self) -> int:
        return len(self._order)

    @property
    def legs(self) -> List[Tuple[int, int]]:
        o = self._order
        return [(o[j], o[(j + 1) % len(o)]) for j in range(len(o))]

    def reversed(self) -> "Tour":
        return Tour((1,) + tuple(reversed(self._order[1:])))

    def __eq__(self, other) -> bool:
        return isinstance(other, Tour) and other._order == self._order

    def __hash__(self) -> int:
        return hash(self._order)

    def __lt__(self, other: "Tour") -> bool:
        return self._order < other._order

    def __str__(self) -> str:
        sep = "" if self.n <= 9 else ","
        return "(1)" + sep.join(str(c) for c in self._order[1:]) + "(1)"

    def __repr__(self) -> str:
        return f"Tour({self})"


def parse_tour(text: str) -> Tour:
    m = _TOUR_RE.match(text.strip())
    if not m:
        raise InvalidArgument(f"not a tour string: {text!r}")
    inner = m.group(1)
    cities = inner.split(",") if "," in inner else list(inner)
    return Tour([1] + [int(c) for c in cities])


def check_enumerable(n: int, cap: Optional[int] = None) -> None:
    cap = settings.enumeration_cap if cap is None else cap
    if n < MIN_CITIES:
        raise InvalidSize(f"need at least {MIN_CITIES} cities, got {n}")
    if n > cap:
        raise TooLarge("tour enumeration", cap, n)


def tour_count(n: int) -> int:
    return math.factorial(n - 1)


def iter_tours(n: int, cap: Optional[int] = None) -> Iterator[Tour]:
    check_enumerable(n, cap)
    for suffix in itertools.permutations(range(2, n + 1)):
        yield Tour((1,) + suffix)


def enumerate_tours(n: int, cap: Optional[int] = None) -> List[Tour]:
    return list(iter_tours(n, cap))


def tour_at(n: int, index: int) -> Tour:
    """Lexicographic unranking of the fixed-start tour with the given index."""
    if not 0 <= index < tour_count(n):
        raise InvalidArgument(f"tour index {index} outside [0, {tour_count(n)})")
    items = list(range(2, n + 1))
    order = [1]
    rest = index
    for k in range(len(items) - 1, -1, -1):
        pos, rest = divmod(rest, math.factorial(k))
        order.append(items.pop(pos))
    return Tour(order)


def tour_index(tour: Tour) -> int:
    items = list(range(2, tour.n + 1))
    index = 0
    for city in tour.order[1:]:
        pos = items.index(city)
        index += pos * math.factorial(len(items) - 1)
        items.pop(pos)
    return index


@lru_cache(maxsize=4)
def _lex_permutations(k: int) -> np.ndarray:
    """All permutations of range(k) in lexicographic order, shape (k!, k)."""
    if k == 0:
        return np.zeros((1, 0), dtype=np.int8)
    sub = _lex_permutations(k - 1)
    blocks = []
    for first in range(k):
        shifted = sub + (sub >= first)
        head = np.full((sub.shape[0], 1), first, dtype=np.int8)
        blocks.append(np.hstack([head, shifted.astype(np.int8)]))
    out = np.vstack(blocks)
    out.setflags(write=False)
    return out


def subtree_orders(n: int, first: int) -> np.ndarray:
    """0-based city orders of every tour whose second city is `first` (0-based)."""
    rest = np.array([c for c in range(1, n) if c != first], dtype=np.int8)
    tail = rest[_lex_permutations(n - 2)]
    rows = tail.shape[0]
    return np.hstack([
        np.zeros((rows, 1), dtype=np.int8),
        np.full((rows, 1), first, dtype=np.int8),
        tail,
    ])


def tour_orders(n: int, cap: Optional[int] = None) -> np.ndarray:
    check_enumerable(n, cap)
    return np.vstack([subtree_orders(n, first) for first in range(1, n)])


def _subtree_leg_sums(n: int, m: np.ndarray, first: int) -> np.ndarray:
    orders = subtree_orders(n, first)
    prev = orders[:, 1]
    total = np.full(orders.shape[0], m[0, first])
    for j in range(2, n):
        nxt = orders[:, j]
        total += m[prev, nxt]
        prev = nxt
    total += m[prev, 0]
    return total


def tour_leg_sums(n: int, matrix, cap: Optional[int] = None, n_jobs: Optional[int] = None) -> np.ndarray:
    """Sum of `matrix` over the n legs of every tour, in enumeration order."""
    check_enumerable(n, cap)
    m = np.asarray(matrix, dtype=float)
    if m.shape != (n, n):
        raise InvalidArgument(f"matrix shape {m.shape} does not match n={n}")
    n_jobs = settings.threads if n_jobs is None else n_jobs
    if n >= settings.parallel_min_n and n_jobs != 1:
        logger.debug(f"scoring {tour_count(n)} tours over {n - 1} subtrees (n_jobs={n_jobs})")
        parts = Parallel(n_jobs=n_jobs, prefer="threads")(
            delayed(_subtree_leg_sums)(n, m, first) for first in range(1, n)
        )
    else:
        parts = [_subtree_leg_sums(n, m, first) for first in range(1, n)]
    return np.concatenate(parts)


def tour_distances(inst: TspInstance, cap: Optional[int] = None, n_jobs: Optional[int] = None) -> np.ndarray:
    return tour_leg_sums(inst.n, inst.dist, cap=cap, n_jobs=n_jobs)


def _check_tour(inst: TspInstance, t: Tour) -> None:
    if t.n != inst.n:
        raise InvalidArgument(f"tour over {t.n} cities does not fit an instance with n={inst.n}")


def tour_distance(inst: TspInstance, t: Tour) -> float:
    _check_tour(inst, t)
    return float(sum(inst.dist[a - 1, b - 1] for a, b in t.legs))


def tour_bias_product(inst: TspInstance, t: Tour) -> float:
    _check_tour(inst, t)
    return math.prod(inst.alpha ** (-inst.dist[a - 1, b - 1]) for a, b in t.legs)


def optimal_indices(distances: np.ndarray, tol: Optional[float] = None) -> Tuple[float, np.ndarray]:
    tol = settings.tie_tolerance if tol is None else tol
    best = float(distances.min())
    return best, np.flatnonzero(distances - best <= tol)


def optimal_tours(inst: TspInstance, cap: Optional[int] = None) -> Tuple[float, List[Tour]]:
    best, idx = optimal_indices(tour_distances(inst, cap=cap))
    return best, [tour_at(inst.n, int(i)) for i in idx]
