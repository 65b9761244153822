"""
Tests for instance normalization, validation and bias derivation
"""

import math

import numpy as np
import pytest

from errors import DegenerateInstance, InvalidArgument, InvalidEdge, InvalidSize
from tsp.four_city import distance_matrix
from tsp.gibbs import gibbs_distribution
from tsp.instance import TspInstance, bias_of, normalize, random_distance_matrix, random_instance
from tsp.tours import enumerate_tours, tour_distance


class TestNormalize:
    """Scaling raw matrices so the largest distance is 1"""

    def test_already_normalized_is_unchanged(self):
        """The four-city matrix already has max 1"""
        m = distance_matrix()
        assert np.array_equal(normalize(m), m)

    def test_uniform_matrix_becomes_all_ones(self):
        """All off-diagonal 5s become 1s"""
        m = np.full((4, 4), 5.0)
        np.fill_diagonal(m, 0.0)
        out = normalize(m)
        assert np.all(out[~np.eye(4, dtype=bool)] == 1.0)

    def test_divides_by_max(self):
        """{2, 4, 3} scales to {.5, 1, .75}"""
        raw = [[0, 2, 4], [2, 0, 3], [4, 3, 0]]
        out = normalize(raw)
        assert out[0, 1] == pytest.approx(0.5)
        assert out[0, 2] == pytest.approx(1.0)
        assert out[1, 2] == pytest.approx(0.75)

    def test_zero_distance_is_degenerate(self):
        """A zero off-diagonal entry is rejected"""
        raw = [[0, 0, 1], [0, 0, 1], [1, 1, 0]]
        with pytest.raises(DegenerateInstance):
            normalize(raw)

    def test_asymmetric_matrix_rejected(self):
        """Asymmetry beyond tolerance is an argument error"""
        raw = [[0, 1, 2], [1.5, 0, 1], [2, 1, 0]]
        with pytest.raises(InvalidArgument):
            normalize(raw)

    def test_idempotent_on_random_matrices(self):
        """Normalizing twice equals normalizing once"""
        for n in (3, 5, 8):
            for seed in range(5):
                once = normalize(random_distance_matrix(n, seed))
                assert np.array_equal(normalize(once), once)


class TestTspInstance:
    """Construction contract of TspInstance"""

    def test_rejects_two_cities(self):
        """n < 3 is an invalid size"""
        with pytest.raises(InvalidSize):
            TspInstance([[0, 1], [1, 0]])

    def test_rejects_unnormalized(self):
        """A matrix whose max is not 1 must go through from_raw"""
        with pytest.raises(InvalidArgument):
            TspInstance([[0, 2, 4], [2, 0, 3], [4, 3, 0]])

    def test_from_raw_normalizes(self):
        """from_raw yields max distance exactly 1"""
        inst = TspInstance.from_raw([[0, 2, 3], [2, 0, 1], [3, 1, 0]])
        assert inst.dist.max() == 1.0

    def test_alpha_must_exceed_one(self):
        """alpha <= 1 is rejected"""
        with pytest.raises(InvalidArgument):
            TspInstance(distance_matrix(), alpha=1.0)

    def test_dist_is_read_only(self, four_city_instance):
        """The stored matrix cannot be mutated"""
        with pytest.raises(ValueError):
            four_city_instance.dist[0, 1] = 0.3

    def test_beta_is_log_alpha(self):
        """beta is derived from alpha"""
        inst = TspInstance(distance_matrix(), alpha=8.0)
        assert inst.beta == pytest.approx(math.log(8.0))

    def test_with_alpha_keeps_distances(self, four_city_instance):
        """with_alpha changes only the base"""
        other = four_city_instance.with_alpha(4.0)
        assert other.alpha == 4.0
        assert np.array_equal(other.dist, four_city_instance.dist)

    def test_bias_matrix_diagonal_is_one(self, four_city_instance):
        """q on the diagonal is the identity rotation"""
        q = four_city_instance.bias_matrix()
        assert np.all(np.diag(q) == 1.0)
        assert q[0, 1] == pytest.approx(math.exp(-0.7))


class TestBiasOf:
    """q_jk = alpha^-d_jk"""

    def test_reference_values(self, four_city_instance):
        """q12 = .4966 and q14 = .3679 at alpha = e"""
        assert bias_of(four_city_instance, 1, 2) == pytest.approx(0.4966, abs=5e-5)
        assert bias_of(four_city_instance, 1, 4) == pytest.approx(0.3679, abs=5e-5)

    @pytest.mark.parametrize("alpha", [1.5, math.e, 10.0])
    def test_max_edge_gives_inverse_alpha(self, alpha):
        """d = 1 gives q = 1/alpha"""
        inst = TspInstance(distance_matrix(), alpha=alpha)
        assert bias_of(inst, 1, 4) == pytest.approx(1.0 / alpha)

    def test_self_loop_is_invalid_edge(self, four_city_instance):
        """j = k has no bias"""
        with pytest.raises(InvalidEdge):
            bias_of(four_city_instance, 2, 2)

    def test_out_of_range_city(self, four_city_instance):
        """Cities are 1-based and bounded by n"""
        with pytest.raises(InvalidEdge):
            bias_of(four_city_instance, 0, 2)


class TestRandomInstance:
    """Seeded random instances"""

    def test_deterministic(self):
        """Same (n, seed) gives the same matrix"""
        a = random_instance(4, 7)
        b = random_instance(4, 7)
        assert np.array_equal(a.dist, b.dist)

    def test_raw_entries_bounded_below(self):
        """Raw entries are at least .05"""
        m = random_distance_matrix(5, 3)
        off = m[~np.eye(5, dtype=bool)]
        assert off.min() >= 0.05

    def test_too_small(self):
        """n < 3 is an invalid size"""
        with pytest.raises(InvalidSize):
            random_instance(2, 0)

    def test_gibbs_matches_brute_force(self):
        """Gibbs probabilities equal a direct per-tour computation"""
        inst = random_instance(4, 7)
        dist = gibbs_distribution(inst)
        weights = np.array([math.exp(-tour_distance(inst, t)) for t in enumerate_tours(4)])
        assert np.allclose(dist.probabilities, weights / weights.sum(), atol=1e-14)
