import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from sandcal import SHParameters, SearchDomain, SoilState, TestCase

TestCase.__test__ = False  # keep pytest from collecting the dataclass

# Hochstetten reference parameter vector (file units)
W_VECTOR = [33.0, 1000.0, 0.25, 0.95, 0.25, 1.5, 0.55 / 0.95, 1.05 / 0.95]


@pytest.fixture
def w_params():
    return SHParameters.from_vector(W_VECTOR)


@pytest.fixture
def domain():
    return SearchDomain(
        p_min=[30.0, 500.0, 0.10, 0.80, 0.10, 0.50, 0.52, 1.05],
        p_max=[36.0, 3000.0, 0.50, 1.10, 0.40, 2.00, 0.65, 1.30],
    )


def random_admissible_states(params, rng, n):
    """Admissible states spanning the pressure range of the tests."""
    states = []
    while len(states) < n:
        t1 = -(10 ** rng.uniform(-2.3, 0.3))
        t2 = t1 * rng.uniform(0.3, 1.5)
        trT = t1 + 2 * t2
        b = np.exp(-((-trT / params.h_s) ** params.n))
        lo, hi = params.e_d0 * b, params.e_i0 * b
        e = rng.uniform(lo + 0.02 * (hi - lo), hi - 0.02 * (hi - lo))
        states.append(SoilState(t1, t2, e))
    return states


@pytest.fixture
def oe_test():
    data = np.array([[0.695, 0.01], [0.68, 0.08], [0.66, 0.3], [0.64, 0.87]])
    return TestCase("OE", 1, SoilState(-0.01, -0.005, 0.695), data)


@pytest.fixture
def td_test():
    data = np.array([
        [0.01, 0.002, 0.15],
        [0.03, 0.001, 0.26],
        [0.06, -0.004, 0.32],
        [0.095, -0.009, 0.335],
    ])
    return TestCase("TD", 1, SoilState(-0.1, -0.1, 0.695), data)
