import itertools
import warnings

import mpmath as mp
import numpy as np
import pytest

from conftest import random_knots
from gtbezier import (KnotSet1D, ScaleParams, check_strict_total_positivity, collocation_matrix,
                      iter_minors, solve_partition_coefficients)
from gtbezier.coefficients import _det_cofactor, default_nodes
from gtbezier.errors import NonPositiveCoefficientsWarning, PreconditionError, SizeError, SolverError


def test_integer_knots_coefficients():
    sol = solve_partition_coefficients(KnotSet1D([0, 1, 2]), ScaleParams(), [0, 1, 2])
    np.testing.assert_allclose(sol.coeffs, [0.25, 0.5, 0.25], atol=1e-12)
    assert sol.positive and sol.residual <= 1e-14


def test_unit_span_knots_give_end_coefficients(knots21):
    # on [0, 1] with unit scalings beta_0 + beta_n == 1 identically, so the
    # solve at the knots returns (1, 0, ..., 0, 1) up to rounding
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sol = solve_partition_coefficients(knots21)
    np.testing.assert_allclose(sol.coeffs, [1, 0, 0, 0, 1], atol=1e-10)
    assert sol.residual <= 1e-12
    warned = any(issubclass(w.category, NonPositiveCoefficientsWarning) for w in caught)
    assert warned == (not sol.positive)


def test_random_residuals(rng):
    for n in range(1, 6):
        for _ in range(10):
            ks = KnotSet1D(random_knots(rng, n) * rng.uniform(0.5, 3))
            nodes = np.sort(rng.uniform(ks.lo, ks.hi, n + 1))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NonPositiveCoefficientsWarning)
                sol = solve_partition_coefficients(ks, ScaleParams(), nodes)
            M = collocation_matrix(ks, None, ScaleParams(), nodes).entries
            assert np.abs(M @ sol.coeffs - 1).max() <= 1e-10


def test_solver_failures():
    ks = KnotSet1D([0, 1, 2])
    with pytest.raises(PreconditionError):
        solve_partition_coefficients(ks, ScaleParams(), [0, 1])
    with pytest.raises(PreconditionError):
        solve_partition_coefficients(ks, ScaleParams(), [0, 0, 2])
    with pytest.raises(PreconditionError):
        collocation_matrix(ks, None, ScaleParams(1, 2), [0, 1, 2])
    # all nodes squeezed at one end: numerically singular
    with pytest.raises(SolverError):
        solve_partition_coefficients(KnotSet1D([0, 1, 2, 3, 4, 5, 6]), ScaleParams(),
                                     [0, 1e-9, 2e-9, 3e-9, 4e-9, 5e-9, 6e-9])


def test_default_nodes_with_ties():
    ks = KnotSet1D([0, 0.5, 0.5, 1])
    t = default_nodes(ks)
    assert t.size == 4 and np.all(np.diff(t) > 0) and t[0] > 0 and t[-1] < 1


def test_cofactor_determinant_against_mpmath(rng):
    mp.mp.dps = 40
    for k in range(1, 6):
        a = rng.random((k, k))
        det, mag = _det_cofactor(a)
        assert det == pytest.approx(float(mp.det(mp.matrix(a.tolist()))), rel=1e-11, abs=1e-15)
        assert mag >= abs(det)


def test_iter_minors_counts():
    a = np.arange(1, 17, dtype=float).reshape(4, 4)
    minors = list(iter_minors(a))
    expected = sum(len(list(itertools.combinations(range(4), k))) ** 2 for k in range(1, 5))
    assert len(minors) == expected


def test_stp_detects_failures():
    good = np.array([[1.0, 0.5], [0.5, 1.0]])
    assert check_strict_total_positivity(good)
    dup = np.array([[1.0, 2.0, 3.0], [1.0, 2.0, 3.0], [2.0, 5.0, 9.0]])
    assert not check_strict_total_positivity(dup)
    with pytest.raises(SizeError):
        list(iter_minors(np.ones((8, 8))))


def test_collocation_interior_nodes_stp(rng):
    for _ in range(10):
        ks = KnotSet1D(random_knots(rng, 3))
        nodes = np.sort(rng.uniform(0.02, 0.98, 4))
        M = collocation_matrix(ks, None, ScaleParams(), nodes)
        assert check_strict_total_positivity(M)
