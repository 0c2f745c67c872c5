import numpy as np
import pytest

from gtbezier import GTBezierCurve, GTBezierSurface, KnotSet1D, KnotSet2D

R2 = np.sqrt(2.0)
IRRATIONAL_KNOTS = [0.0, R2 / 4, 0.5, R2 / 2, 1.0]
CURVE_WEIGHTS = [1, 10, 20, 6, 5]
CURVE_CONTROL = [[0, 0], [0.4, 1.3], [2, 2], [3.7, 1.5], [4, 0]]

PENTAGON_KNOTS = [[0, 2], [1, 2], [0, 6 / 5], [8 / 7, 8 / 7], [2, 1], [0, 0], [6 / 5, 0], [2, 0]]
PENTAGON_WEIGHTS = [2, 2, 5, 7, 2, 3, 5, 2]
PENTAGON_HEIGHTS = [0, 4, 2, 5, 2, 0, 2, 0]


def pentagon_control(heights=PENTAGON_HEIGHTS):
    return np.column_stack([np.array(PENTAGON_KNOTS, dtype=float), heights])


@pytest.fixture
def knots21():
    return KnotSet1D(IRRATIONAL_KNOTS)


@pytest.fixture
def curve31():
    return GTBezierCurve(KnotSet1D(IRRATIONAL_KNOTS), CURVE_CONTROL, CURVE_WEIGHTS)


@pytest.fixture
def surface41():
    return GTBezierSurface(KnotSet2D(PENTAGON_KNOTS), pentagon_control(), PENTAGON_WEIGHTS)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_knots(rng, n, min_gap=0.05):
    """n + 1 strictly increasing knots on [0, 1] with gaps >= min_gap."""
    while True:
        inner = np.sort(rng.random(n - 1))
        a = np.concatenate([[0.0], inner, [1.0]])
        if np.diff(a).min() >= min_gap:
            return a
