import os
import sys
from fractions import Fraction

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from builtin_graphs import build, build_kagome, build_pendant  # noqa: E402
from models import Potential  # noqa: E402
from polynomial import ComplexRational, PotentialPolynomial  # noqa: E402

BUILTIN_CASES = ["cycle 5", "pendant", "kagome", "zd 3,3", "zd 2,2"]
LOOP_FREE_CASES = ["cycle 5", "kagome", "zd 3,3", "zd 2,2"]


def _random_rational(rng) -> Fraction:
    denominator = int(rng.integers(1, 9))
    numerator = int(rng.integers(-3 * denominator, 3 * denominator + 1))
    return Fraction(numerator, denominator)


@pytest.fixture
def make_potential():
    """Factory for seeded random potentials with values in [-3, 3] and denominators <= 8."""

    def factory(nu: int, seed: int, complex_values: bool = False, nonzero: bool = False) -> Potential:
        rng = np.random.default_rng(seed)
        while True:
            values = []
            for _ in range(nu):
                im = _random_rational(rng) if complex_values else 0
                values.append(ComplexRational(_random_rational(rng), im))
            potential = Potential.from_values(values)
            if not nonzero or not potential.is_zero():
                return potential

    return factory


@pytest.fixture
def variables():
    """variables(nu) -> [q_0, ..., q_{nu-1}] as polynomials."""

    def factory(nu: int):
        return [PotentialPolynomial.variable(nu, v) for v in range(nu)]

    return factory


@pytest.fixture(scope="session")
def pendant():
    return build_pendant()


@pytest.fixture(scope="session")
def kagome():
    return build_kagome()


@pytest.fixture(scope="session")
def zd33():
    return build("zd 3,3")


@pytest.fixture(params=BUILTIN_CASES)
def builtin_graph(request):
    return build(request.param)


@pytest.fixture(params=LOOP_FREE_CASES)
def loop_free_graph(request):
    return build(request.param)
