"""Bias rotations U = [[sqrt q, sqrt(1-q)], [-sqrt(1-q), sqrt q]].

Acting on |0> the gate leaves amplitude sqrt(q) on |0>, so measuring 0 after
U has probability q. theta = arccos(sqrt q), i.e. U is a real rotation R_theta.
"""

from __future__ import annotations
import math

import numpy as np

from errors import InvalidArgument


class RotationGate:
    __slots__ = ("q", "theta", "matrix")

    def __init__(self, q: float):
        if not 0.0 < q <= 1.0:
            raise InvalidArgument(f"bias q must lie in (0, 1], got {q}")
        self.q = float(q)
        self.theta = math.acos(math.sqrt(self.q))
        c, s = math.sqrt(self.q), math.sqrt(1.0 - self.q)
        self.matrix = np.array([[c, s], [-s, c]], dtype=float)
        self.matrix.setflags(write=False)

    @classmethod
    def from_distance(cls, alpha: float, d: float) -> "RotationGate":
        return cls(alpha ** (-d))

    def inverse(self) -> np.ndarray:
        return self.matrix.T

    def outcome_probability(self, a: int) -> float:
        """|<0|U|a>|^2: q for a = 0, 1 - q for a = 1."""
        if a not in (0, 1):
            raise InvalidArgument(f"basis label must be 0 or 1, got {a}")
        return float(self.matrix[0, a] ** 2)

    def apply(self, amp0: complex, amp1: complex) -> tuple[complex, complex]:
        m = self.matrix
        return m[0, 0] * amp0 + m[0, 1] * amp1, m[1, 0] * amp0 + m[1, 1] * amp1

    def is_identity(self) -> bool:
        return self.q == 1.0

    def __repr__(self) -> str:
        return f"RotationGate(q={self.q:.6g}, theta={self.theta:.6g})"
