#!/usr/bin/env python3
"""Cross-check the dense and tour backends against the analytic Gibbs distribution"""

import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

import itertools
import logging

from quantum.statevector import apply_bias_gates, prepare_tour_superposition, project_valid, state_probabilities
from tsp.gibbs import gibbs_distribution, total_variation
from tsp.instance import random_instance

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def check_instance(n: int, seed: int) -> float:
    inst = random_instance(n, seed)
    dists = {"gibbs": gibbs_distribution(inst).probabilities}
    for backend in ("dense", "tour"):
        projected, _ = project_valid(apply_bias_gates(prepare_tour_superposition(n, backend=backend), inst))
        dists[backend] = state_probabilities(projected)
    return max(total_variation(dists[a], dists[b]) for a, b in itertools.combinations(dists, 2))


def main(count: int, n: int, tol: float, first_seed: int) -> int:
    worst = 0.0
    failures = 0
    for seed in range(first_seed, first_seed + count):
        tv = check_instance(n, seed)
        worst = max(worst, tv)
        if tv >= tol:
            failures += 1
            logger.error(f"❌ seed={seed}: pairwise TV {tv:.3e} >= {tol:g}")
    if failures:
        logger.error(f"❌ {failures}/{count} instances disagree (worst TV {worst:.3e})")
        return 1
    logger.info(f"✅ {count} random {n}-city instances agree across backends (worst TV {worst:.3e})")
    return 0


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Backend equivalence sweep")
    parser.add_argument("--count", type=int, default=50, help="number of random instances")
    parser.add_argument("--n", type=int, default=4, help="cities per instance")
    parser.add_argument("--tol", type=float, default=1e-10, help="pairwise total-variation tolerance")
    parser.add_argument("--seed", type=int, default=0, help="first seed")

    args = parser.parse_args()
    sys.exit(main(args.count, args.n, args.tol, args.seed))
