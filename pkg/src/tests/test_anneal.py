"""
Tests for the repeated-measurement protocol, the Metropolis baseline and the comparison
"""

import math
from unittest.mock import MagicMock

import numpy as np
import pytest
from scipy import stats

from anneal.compare import compare
from anneal.metropolis import (ConstantSchedule, GeometricSchedule, LogarithmicSchedule, parse_schedule,
                               run_metropolis)
from anneal.protocol import run_quantum_annealing
from errors import InvalidArgument
from tsp.gibbs import gibbs_distribution, total_variation
from tsp.instance import random_instance
from tsp.tours import Tour, tour_distance

OPTIMUM = 2.7
# per-trial chance of sampling an optimum: 2 e^-2.7 / 6
P_OPTIMUM = 2 * math.exp(-2.7) / 6


class TestQuantumAnnealing:
    """Prepare/bias/project/measure trials with a best-so-far buffer"""

    def test_success_rate(self, four_city_instance):
        """2000 trials succeed at .0519 +- .015"""
        run = run_quantum_annealing(four_city_instance, 2000, seed=1)
        rate = sum(t.ok for t in run.trials) / run.trial_count
        assert rate == pytest.approx(0.0519, abs=0.015)
        assert run.success_prob == pytest.approx(0.05187, abs=1e-4)

    def test_finds_optimum(self, four_city_instance):
        """2000 trials reach D = 2.7"""
        run = run_quantum_annealing(four_city_instance, 2000, seed=3)
        assert run.best_distance == pytest.approx(OPTIMUM)
        assert str(run.best) in {"(1)243(1)", "(1)342(1)"}

    def test_best_is_monotone(self, four_city_instance):
        """The buffer never gets worse and equals the best successful sample"""
        run = run_quantum_annealing(four_city_instance, 500, seed=8)
        seen = [t.best_distance for t in run.trials if t.best_distance is not None]
        assert all(a >= b for a, b in zip(seen, seen[1:]))
        sampled = [t.distance for t in run.trials if t.ok]
        assert run.best_distance == min(sampled)

    def test_samples_are_scored_exactly(self, four_city_instance):
        """Each successful trial records the true tour length"""
        run = run_quantum_annealing(four_city_instance, 300, seed=4)
        for t in run.trials:
            if t.ok:
                assert t.distance == tour_distance(four_city_instance, t.tour)

    def test_forced_failure(self, four_city_instance):
        """A stub RNG that always fails leaves no best"""
        rng = MagicMock()
        rng.random.return_value = 0.999999
        run = run_quantum_annealing(four_city_instance, 1, seed=0, rng=rng)
        assert run.best is None
        assert run.trial_count == 1
        assert not run.trials[0].ok

    def test_early_stop(self, four_city_instance):
        """With a target the run ends at the first hit"""
        run = run_quantum_annealing(four_city_instance, 5000, seed=2, target=OPTIMUM)
        assert run.trial_count == run.first_hit(OPTIMUM)
        assert run.trials[-1].distance == pytest.approx(OPTIMUM)

    def test_deterministic(self, four_city_instance):
        """Same seed, same run"""
        a = run_quantum_annealing(four_city_instance, 300, seed=6)
        b = run_quantum_annealing(four_city_instance, 300, seed=6)
        assert a.log_lines() == b.log_lines()

    def test_dense_backend_agrees(self, four_city_instance):
        """Post-selection outcomes match across backends for a seed"""
        a = run_quantum_annealing(four_city_instance, 300, seed=6, backend="tour")
        b = run_quantum_annealing(four_city_instance, 300, seed=6, backend="dense")
        assert [t.ok for t in a.trials] == [t.ok for t in b.trials]

    def test_log_format(self, four_city_instance):
        """Run log lines carry t, ok, tour, D and best"""
        run = run_quantum_annealing(four_city_instance, 200, seed=0)
        lines = run.log_lines()
        assert lines[0].startswith("t=1 ok=")
        fail = next(ln for ln, t in zip(lines, run.trials) if not t.ok)
        assert " tour=- D=- " in fail

    def test_zero_trials(self, four_city_instance):
        """max_trials = 0 is rejected"""
        with pytest.raises(InvalidArgument):
            run_quantum_annealing(four_city_instance, 0, seed=0)

    def test_trials_to_optimum_geometric(self, four_city_instance):
        """Trials to the first optimum follow Geometric(.0224) under a KS test"""
        hits = np.array([
            run_quantum_annealing(four_city_instance, 5000, seed=s, target=OPTIMUM).first_hit(OPTIMUM)
            for s in range(10_000)
        ])
        geom = stats.geom(P_OPTIMUM)
        # randomized probability integral transform makes the discrete law continuous
        v = np.random.default_rng(0).random(len(hits))
        u = geom.cdf(hits - 1) + v * geom.pmf(hits)
        assert stats.kstest(u, "uniform").pvalue > 1e-3


class TestSchedules:
    """Inverse-temperature schedules"""

    def test_logarithmic(self):
        assert LogarithmicSchedule(2.0).beta(math.e - 1) == pytest.approx(0.5)

    def test_geometric(self):
        assert GeometricSchedule(0.5).beta(3) == pytest.approx(8.0)

    def test_constant(self):
        assert ConstantSchedule(1.5).beta(100) == 1.5

    @pytest.mark.parametrize("make", [lambda: LogarithmicSchedule(0.0), lambda: GeometricSchedule(1.0),
                                      lambda: GeometricSchedule(0.0), lambda: ConstantSchedule(-1.0)])
    def test_invalid(self, make):
        with pytest.raises(InvalidArgument):
            make()

    def test_parse(self):
        assert str(parse_schedule("log:1")) == "log:1"
        assert isinstance(parse_schedule("geo:0.99"), GeometricSchedule)
        with pytest.raises(InvalidArgument):
            parse_schedule("cubic:2")
        with pytest.raises(InvalidArgument):
            parse_schedule("log:x")


class TestMetropolis:
    """Classical swap-move annealing"""

    def test_beta_zero_accepts_everything(self, four_city_instance):
        """Random walk at beta = 0"""
        run = run_metropolis(four_city_instance, 5000, ConstantSchedule(0.0), seed=1)
        assert run.acceptance_rate == 1.0

    def test_large_beta_rejects_uphill(self, four_city_instance):
        """beta = 50 is effectively greedy descent"""
        run = run_metropolis(four_city_instance, 2000, ConstantSchedule(50.0), seed=2)
        assert run.uphill_proposed > 0
        assert run.uphill_accepted / run.uphill_proposed < 0.01
        assert run.best_distance == pytest.approx(OPTIMUM)

    def test_logarithmic_finds_optimum(self, four_city_instance):
        """log:1 reaches 2.7 in at least 99 of 100 seeds"""
        found = sum(
            run_metropolis(four_city_instance, 10 ** 5, LogarithmicSchedule(1.0), seed=s,
                           target=OPTIMUM, stop_at_target=True).best_distance <= OPTIMUM + 1e-12
            for s in range(100)
        )
        assert found >= 99

    def test_constant_beta_converges_to_gibbs(self, four_city_instance):
        """Visit frequencies approach the Gibbs law at beta = 1"""
        run = run_metropolis(four_city_instance, 10 ** 6, ConstantSchedule(1.0), seed=7, track_visits=True)
        gibbs = gibbs_distribution(four_city_instance).probabilities
        assert total_variation(run.visit_distribution(), gibbs) < 0.02

    def test_final_distance_is_exact(self):
        """Incremental deltas never drift from the true length"""
        inst = random_instance(8, 5)
        run = run_metropolis(inst, 20_000, ConstantSchedule(3.0), seed=4)
        assert run.best_distance == pytest.approx(tour_distance(inst, run.best), abs=1e-12)

    def test_checkpoints_monotone(self, four_city_instance):
        """Best distance never increases across checkpoints"""
        run = run_metropolis(four_city_instance, 1000, GeometricSchedule(0.99), seed=3, checkpoint_every=100)
        assert len(run.checkpoints) == 10
        bests = [c.best_distance for c in run.checkpoints]
        assert all(a >= b for a, b in zip(bests, bests[1:]))
        assert 0.0 <= run.acceptance_rate <= 1.0

    def test_three_cities(self):
        """The only move at n = 3 reverses the tour"""
        run = run_metropolis(random_instance(3, 0), 50, ConstantSchedule(1.0), seed=0)
        assert run.acceptance_rate == 1.0

    def test_deterministic(self, four_city_instance):
        a = run_metropolis(four_city_instance, 3000, LogarithmicSchedule(1.0), seed=11)
        b = run_metropolis(four_city_instance, 3000, LogarithmicSchedule(1.0), seed=11)
        assert a == b

    def test_visits_require_tracking(self, four_city_instance):
        run = run_metropolis(four_city_instance, 10, ConstantSchedule(1.0), seed=0)
        with pytest.raises(InvalidArgument):
            run.visit_distribution()

    def test_zero_steps(self, four_city_instance):
        with pytest.raises(InvalidArgument):
            run_metropolis(four_city_instance, 0, ConstantSchedule(1.0), seed=0)


class TestCompare:
    """Quantum protocol against the Metropolis baseline"""

    def test_quantum_mean_trials(self, four_city_instance):
        """Mean trials to optimum over 30 seeds lies within 44.6 +- 25"""
        table = compare(four_city_instance, trials=2000, steps=2000, seeds=range(30))
        quantum = table.rows[0]
        assert quantum.method == "quantum"
        assert quantum.hit_rate == 1.0
        assert quantum.mean_to_first_hit == pytest.approx(44.6, abs=25)
        assert quantum.theoretical_to_first_hit == pytest.approx(44.6, abs=0.5)

    def test_zero_budget_is_censored(self, four_city_instance):
        """A zero step budget yields a censored Metropolis row"""
        table = compare(four_city_instance, trials=500, steps=0, seeds=range(3))
        classical = table.rows[1]
        assert classical.censored
        assert classical.hit_rate is None

    def test_deterministic(self, four_city_instance):
        a = compare(four_city_instance, trials=500, steps=500, seeds=range(5))
        b = compare(four_city_instance, trials=500, steps=500, seeds=range(5))
        assert a == b

    def test_frame(self, four_city_instance):
        """to_frame indexes rows by method"""
        frame = compare(four_city_instance, trials=200, steps=200, seeds=range(2)).to_frame()
        assert list(frame.index) == ["quantum", "metropolis"]

    def test_needs_seeds(self, four_city_instance):
        with pytest.raises(InvalidArgument):
            compare(four_city_instance, trials=10, steps=10, seeds=[])


class TestTourSerialization:
    """Tours inside run models serialize as strings"""

    def test_best_dumped_as_string(self, four_city_instance):
        run = run_metropolis(four_city_instance, 100, ConstantSchedule(1.0), seed=0)
        assert run.model_dump()["best"] == str(run.best)
        assert isinstance(run.best, Tour)
