"""
Tests for the bias rotation gate
"""

import math

import numpy as np
import pytest

from errors import InvalidArgument
from quantum.gates import RotationGate


class TestRotationGate:
    """U(q) as a real rotation"""

    @pytest.mark.parametrize("q", [0.05, 0.3679, 0.5, 0.9, 1.0])
    def test_unitary(self, q):
        """U^T U = I"""
        m = RotationGate(q).matrix
        assert np.allclose(m.T @ m, np.eye(2), atol=1e-15)

    def test_zero_outcome_probability_is_q(self):
        """|<0|U|0>|^2 = q and |<0|U|1>|^2 = 1 - q"""
        g = RotationGate(0.4966)
        assert g.outcome_probability(0) == pytest.approx(0.4966)
        assert g.outcome_probability(1) == pytest.approx(1 - 0.4966)

    def test_theta_from_q(self):
        """theta = arccos(sqrt q)"""
        g = RotationGate(0.25)
        assert g.theta == pytest.approx(math.pi / 3)

    def test_from_distance(self):
        """q = alpha^-d"""
        g = RotationGate.from_distance(math.e, 0.7)
        assert g.q == pytest.approx(math.exp(-0.7))

    def test_identity_at_q_one(self):
        """q = 1 is the identity rotation"""
        g = RotationGate(1.0)
        assert g.is_identity()
        assert np.array_equal(g.matrix, np.eye(2))

    def test_inverse(self):
        """inverse() undoes the gate"""
        g = RotationGate(0.3)
        assert np.allclose(g.inverse() @ g.matrix, np.eye(2))

    def test_apply_on_zero(self):
        """U|0> leaves sqrt(q) on |0>"""
        a0, a1 = RotationGate(0.36).apply(1.0, 0.0)
        assert a0 == pytest.approx(0.6)
        assert a1 == pytest.approx(-0.8)

    @pytest.mark.parametrize("q", [0.0, -0.1, 1.5])
    def test_q_out_of_range(self, q):
        """q must lie in (0, 1]"""
        with pytest.raises(InvalidArgument):
            RotationGate(q)

    def test_bad_basis_label(self):
        """Only 0 and 1 are basis labels"""
        with pytest.raises(InvalidArgument):
            RotationGate(0.5).outcome_probability(2)
