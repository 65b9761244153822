import sys
from pathlib import Path

import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).resolve().parents[1]))

from tsp.four_city import four_city_instance as _four_city_instance  # noqa: E402
from tsp.instance import random_instance  # noqa: E402


@pytest.fixture
def four_city_instance():
    return _four_city_instance()


@pytest.fixture
def random_instances():
    """Twenty seeded random instances per size."""
    def make(n: int, count: int = 20):
        return [random_instance(n, seed) for seed in range(count)]
    return make
