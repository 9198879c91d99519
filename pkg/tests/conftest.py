import math
from pathlib import Path

import numpy as np
import pytest

from numrange.maps import BallDomain, BuiltinMap, PolyMap

MAPS_DIR = Path(__file__).resolve().parent.parent / "maps"


def poly1(coeffs, R=1.0):
    """Scalar polynomial sum c_k x^k on the disc of radius R, as a PolyMap."""
    terms = [((k,), complex(c)) for k, c in enumerate(coeffs) if c != 0]
    return PolyMap.from_terms(1, [terms], radius=R)


@pytest.fixture
def cayley():
    return BuiltinMap(BallDomain(1, 1.0), "cayley_i")


@pytest.fixture
def maps_dir():
    return MAPS_DIR


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pi_frac(num, den):
    return num * math.pi / den


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
