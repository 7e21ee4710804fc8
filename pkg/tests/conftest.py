import math

import numpy as np
import pytest

from latsum.lattice import hexagonal_lattice, lattice_from_tau, square_lattice

Y_HEX = math.sqrt(3.0) / 2.0


@pytest.fixture
def hexl():
    return hexagonal_lattice()


@pytest.fixture
def sq():
    return square_lattice()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_domain_lattice(rng, y_max=2.5, min_dist_from_hex=0.0):
    """Random lattice parameters inside the right fundamental half-domain."""
    while True:
        x = rng.uniform(0.0, 0.5)
        y = rng.uniform(Y_HEX, y_max)
        if x * x + y * y < 1.0:
            continue
        if math.hypot(x - 0.5, y - Y_HEX) < min_dist_from_hex:
            continue
        return lattice_from_tau(x, y)
