"""The four-city reference instance and its tabulated values at alpha = e.

Tour-indexed tuples follow enumeration order: (1)234, (1)243, (1)324, (1)342,
(1)423, (1)432.
"""

from __future__ import annotations
import math
from typing import Dict, Tuple

import numpy as np

from tsp.instance import TspInstance

EDGES: Dict[Tuple[int, int], float] = {
    (1, 2): 0.7,
    (1, 3): 0.5,
    (1, 4): 1.0,
    (2, 3): 0.8,
    (2, 4): 0.6,
    (3, 4): 0.9,
}

# reference values, rounded to four (or two) decimals
Q = {(1, 2): 0.4966, (1, 3): 0.6065, (1, 4): 0.3679, (2, 3): 0.4493, (2, 4): 0.5488, (3, 4): 0.4066}
BIAS_PRODUCTS = (0.0334, 0.0672, 0.0550, 0.0672, 0.0550, 0.0334)
DISTANCES = (3.4, 2.7, 2.9, 2.7, 2.9, 3.4)
Z = 0.3112
PROBABILITIES = (0.1073, 0.2159, 0.1767, 0.2159, 0.1767, 0.1073)
SOLUTION_PROBABILITY = 0.43
UNBIASED_PROBABILITY = 0.33
OPTIMAL_DISTANCE = 2.7

Q_TOL = 5e-5
BIAS_PRODUCT_TOL = 5e-5
Z_TOL = 5e-4
PROBABILITY_TOL = 5e-4
SOLUTION_TOL = 5e-3

ALPHA = math.e


def distance_matrix() -> np.ndarray:
    m = np.zeros((4, 4))
    for (j, k), d in EDGES.items():
        m[j - 1, k - 1] = m[k - 1, j - 1] = d
    return m


def four_city_instance(alpha: float | None = None) -> TspInstance:
    return TspInstance(distance_matrix(), ALPHA if alpha is None else alpha)
