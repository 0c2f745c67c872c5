import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import PENTAGON_KNOTS
from gtbezier import KnotSet1D, KnotSet2D, convex_hull_2d, edge_lines, knot_exponents, pow_conv
from gtbezier.errors import DegenerateError, DomainError, SingularityError
from gtbezier.geometry import Interval, contains, diameter, hull_1d, polygon_area


def test_pow_conv_zero_conventions():
    assert pow_conv(0.0, 0.0) == 1.0
    assert pow_conv(0.0, 2.5) == 0.0
    assert pow_conv(3.0, 0.0) == 1.0
    np.testing.assert_array_equal(pow_conv([0.0, 0.0, 2.0], [0.0, 1.0, 3.0]), [1.0, 0.0, 8.0])


def test_pow_conv_irrational_exponent():
    # mpmath, 60 digits: 2 ** (sqrt(2) / 2)
    assert pow_conv(2.0, np.sqrt(2) / 2) == pytest.approx(1.6325269194381528448, rel=1e-15)


def test_pow_conv_rejects():
    with pytest.raises(DomainError):
        pow_conv(-1.0, 0.5)
    with pytest.raises(SingularityError):
        pow_conv(0.0, -1.0)


@pytest.mark.parametrize("knots", [[1.0], [0.0, 0.0, 0.0], [0.0, 2.0, 1.0], [0.0, np.nan, 1.0]])
def test_knotset1d_rejects(knots):
    with pytest.raises(DegenerateError):
        KnotSet1D(knots)


def test_knotset1d_properties():
    ks = KnotSet1D([0.0, 0.5, 0.5, 2.0])
    assert (ks.n, ks.lo, ks.hi) == (3, 0.0, 2.0)
    assert not ks.strictly_increasing
    assert hull_1d(ks).length == 2.0
    with pytest.raises(DegenerateError):
        Interval(1.0, 1.0)


def test_knotset2d_rejects_collinear():
    with pytest.raises(DegenerateError):
        KnotSet2D([[0, 0], [1, 1], [2, 2], [3, 3]])
    with pytest.raises(DegenerateError):
        KnotSet2D([[0, 0], [1, 0]])


def test_pentagon_hull_structure():
    hull = convex_hull_2d(KnotSet2D(PENTAGON_KNOTS))
    assert hull.vertex_indices == (5, 7, 4, 1, 0)
    assert hull.edge_members == ((5, 6, 7), (7, 4), (4, 1), (1, 0), (0, 2, 5))
    assert hull.area == pytest.approx(3.5, abs=1e-15)


def test_pentagon_primitive_edge_lines():
    hull = convex_hull_2d(KnotSet2D(PENTAGON_KNOTS))
    expected = [lambda u, v: v, lambda u, v: 2 - u, lambda u, v: 3 - u - v,
                lambda u, v: 2 - v, lambda u, v: u]
    p = np.random.default_rng(0).random((50, 2)) * 2
    for h, f in zip(hull.edges, expected):
        np.testing.assert_allclose(h(p), f(p[:, 0], p[:, 1]), atol=1e-14)


def test_unit_normalization_has_unit_normals():
    hull = convex_hull_2d(KnotSet2D(PENTAGON_KNOTS), normalization="unit")
    for h in hull.edges:
        assert np.hypot(h.xi, h.eta) == pytest.approx(1.0, abs=1e-15)
    for h in edge_lines(hull, "primitive"):
        assert h.xi == round(h.xi) and h.eta == round(h.eta)


def test_knot_exponents_match_printed_basis():
    hull = convex_hull_2d(KnotSet2D(PENTAGON_KNOTS))
    E = knot_exponents(hull)
    # edges v, 2-u, 3-u-v, 2-v, u at the knot (8/7, 8/7)
    np.testing.assert_allclose(E[3], [8 / 7, 6 / 7, 5 / 7, 6 / 7, 8 / 7], atol=1e-14)
    # (0, 2) lies on the edges 2-v and u
    np.testing.assert_allclose(E[0], [2, 2, 1, 0, 0], atol=1e-14)


def test_contains():
    hull = convex_hull_2d(KnotSet2D(PENTAGON_KNOTS))
    inside = contains(hull, np.array([[1.0, 1.0], [0, 0], [2.0, 1.0], [1.5, 1.6]]))
    np.testing.assert_array_equal(inside, [True, True, True, False])


def test_polygon_area_square():
    assert polygon_area([[0, 0], [1, 0], [1, 1], [0, 1]]) == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.floats(-10, 10), st.floats(-10, 10)), min_size=2, max_size=60))
def test_diameter_matches_brute_force(pts):
    P = np.array(pts)
    brute = max(np.linalg.norm(p - q) for p in P for q in P)
    assert diameter(P) == pytest.approx(brute, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=3, max_size=25, unique=True))
def test_hull_edges_nonnegative_on_knots(pts):
    try:
        ks = KnotSet2D(np.array(pts, dtype=float))
    except DegenerateError:
        return
    hull = convex_hull_2d(ks)
    H = hull.edge_values(ks.points)
    assert H.min() >= -1e-12
    # every hull vertex lies on exactly two edges
    for i in hull.vertex_indices:
        assert np.count_nonzero(np.abs(H[i]) <= 1e-12) == 2
