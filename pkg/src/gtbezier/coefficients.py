"""Collocation matrices of the univariate basis, partition-of-unity
coefficients, and brute-force strict total positivity checks."""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .basis import ScaleParams, eval_basis_1d
from .errors import NonPositiveCoefficientsWarning, PreconditionError, SizeError, SolverError
from .geometry import KnotSet1D

MAX_STP_DIM = 7
MAX_STP_ORDER = 5
STP_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class CollocationMatrix:
    """``entries[i, j] = beta_j(nodes[i])``."""

    entries: np.ndarray
    nodes: np.ndarray

    @property
    def shape(self):
        return self.entries.shape


@dataclass(frozen=True, eq=False)
class CoefficientSolve:
    coeffs: np.ndarray
    residual: float
    condition: float

    @property
    def positive(self) -> bool:
        return bool(np.all(self.coeffs > 0))


def _check_nodes(ks: KnotSet1D, nodes) -> np.ndarray:
    t = np.array(nodes, dtype=float).ravel()
    if t.size != len(ks):
        raise PreconditionError(f"need {len(ks)} nodes, got {t.size}")
    if np.any(np.diff(t) <= 0):
        raise PreconditionError("nodes must be strictly increasing")
    if t[0] < ks.lo or t[-1] > ks.hi:
        raise PreconditionError("nodes must lie in [a_0, a_n]")
    return t


def default_nodes(ks: KnotSet1D) -> np.ndarray:
    """The knots when strictly increasing, else interior Chebyshev points."""
    if ks.strictly_increasing:
        return ks.knots.copy()
    m = len(ks)
    x = np.cos((2 * np.arange(m)[::-1] + 1) * np.pi / (2 * m))
    return ks.lo + (ks.hi - ks.lo) * (x + 1) / 2


def collocation_matrix(ks: KnotSet1D, c, s: ScaleParams, nodes) -> CollocationMatrix:
    if s.k0 != s.k1:
        raise PreconditionError("collocation matrices require k0 == k1")
    t = _check_nodes(ks, nodes)
    return CollocationMatrix(eval_basis_1d(ks, c, s, t), t)


def solve_partition_coefficients(ks: KnotSet1D, s: ScaleParams = ScaleParams(), nodes=None) -> CoefficientSolve:
    """Coefficients making ``sum_i c_i beta_i(t_j) == 1`` at every node.

    The solution is unique but need not be positive; a
    :class:`NonPositiveCoefficientsWarning` is issued when some ``c_i <= 0``.
    """
    if nodes is None:
        nodes = default_nodes(ks)
    M = collocation_matrix(ks, None, s, nodes).entries
    ones = np.ones(len(ks))
    try:
        lu = scipy.linalg.lu_factor(M, check_finite=True)
    except (ValueError, np.linalg.LinAlgError) as exc:
        raise SolverError(f"collocation factorization failed: {exc}") from exc
    cond = float(np.linalg.cond(M))
    if not np.isfinite(cond) or cond > 1e15:
        raise SolverError(f"collocation matrix numerically singular (cond={cond:.3g})")
    C = scipy.linalg.lu_solve(lu, ones)
    residual = float(np.abs(M @ C - ones).max())
    sol = CoefficientSolve(C, residual, cond)
    if not sol.positive:
        warnings.warn("partition coefficients not all positive: " + ", ".join(f"{c:.6g}" for c in C),
                      NonPositiveCoefficientsWarning, stacklevel=2)
    return sol


def _det_cofactor(a):
    """Determinant by Laplace expansion along the first row.

    Returns ``(det, mag)`` where ``mag`` is the same expansion with absolute
    values, i.e. the scale against which cancellation is judged.
    """
    n = a.shape[0]
    if n == 1:
        return a[0, 0], abs(a[0, 0])
    if n == 2:
        p, q = a[0, 0] * a[1, 1], a[0, 1] * a[1, 0]
        return p - q, abs(p) + abs(q)
    det = mag = 0.0
    rows = a[1:]
    for j in range(n):
        if a[0, j] == 0:
            continue
        sub_d, sub_m = _det_cofactor(np.delete(rows, j, axis=1))
        sign = -1.0 if j % 2 else 1.0
        det += sign * a[0, j] * sub_d
        mag += abs(a[0, j]) * sub_m
    return det, mag


def iter_minors(m, max_order=None):
    """Yield ``(rows, cols, det, mag)`` for every square minor up to ``max_order``.

    Submatrices containing an exact zero entry are skipped: those zeros are
    structural (a node at a domain end) and make strict positivity moot.
    """
    a = np.asarray(getattr(m, "entries", m), dtype=float)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise PreconditionError("square matrix required")
    if n > MAX_STP_DIM:
        raise SizeError(f"brute-force minors limited to {MAX_STP_DIM}x{MAX_STP_DIM}")
    top = min(n, MAX_STP_ORDER if max_order is None else max_order)
    if top > MAX_STP_ORDER:
        raise SizeError(f"minor order limited to {MAX_STP_ORDER}")
    for k in range(1, top + 1):
        for rows in itertools.combinations(range(n), k):
            for cols in itertools.combinations(range(n), k):
                sub = a[np.ix_(rows, cols)]
                if np.any(sub == 0):
                    continue
                det, mag = _det_cofactor(sub)
                yield rows, cols, det, mag


def check_strict_total_positivity(m, max_order=None) -> bool:
    """True iff every non-structural minor of order ``<= max_order`` is positive.

    A minor counts as positive when it exceeds ``1e-12`` times the sum of the
    absolute values of its expansion terms.
    """
    return all(det > STP_RTOL * mag for _, _, det, mag in iter_minors(m, max_order))
