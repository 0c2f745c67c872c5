"""Univariate and bivariate GT-Bernstein blending functions.

A basis function is ``c_i * prod_k h_k(p) ** h_k(a_i)``: the edge functions
of the domain raised to their own values at the knot.  Everything is computed
in the log domain so that huge exponents or weights cannot under/overflow; a
vanishing factor with a positive exponent maps to ``-inf`` and one with a zero
exponent to ``0`` (the ``0 ** 0 == 1`` convention).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PreconditionError
from .geometry import TOL, KnotSet1D, KnotSet2D, PolygonHull, contains, knot_exponents

# Edge values this close to zero are snapped to zero so that corner and edge
# evaluations hit the exact 0 ** 0 / 0 ** p cases.
SNAP = 1e-13


@dataclass(frozen=True)
class ScaleParams:
    """Positive scalings of the two univariate edge functions."""

    k0: float = 1.0
    k1: float = 1.0

    def __post_init__(self):
        if not (self.k0 > 0 and self.k1 > 0):
            raise PreconditionError("scale parameters must be positive")


def positive_vector(values, n, name) -> np.ndarray:
    """Validate a per-knot vector of positive reals (coefficients or weights).

    ``None`` means all ones.
    """
    if values is None:
        return np.ones(n)
    v = np.array(values, dtype=float).ravel()
    if v.size != n:
        raise PreconditionError(f"{name}: expected {n} values, got {v.size}")
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        raise PreconditionError(f"{name}: all values must be finite and > 0")
    return v


def _log_pow(base, exponent):
    """``log(base ** exponent)`` under the 0 ** 0 convention; broadcasts."""
    with np.errstate(divide="ignore", invalid="ignore"):
        out = exponent * np.log(base)
    return np.where(exponent == 0, 0.0, out)


def _check_t(ks: KnotSet1D, t):
    t = np.asarray(t, dtype=float)
    span = ks.hi - ks.lo
    slack = 1e-12 * span
    if np.any(t < ks.lo - slack) or np.any(t > ks.hi + slack) or np.any(~np.isfinite(t)):
        raise DomainError(f"parameter outside [{ks.lo}, {ks.hi}]")
    return np.clip(t, ks.lo, ks.hi)


def log_basis_1d(ks: KnotSet1D, c, s: ScaleParams, t) -> np.ndarray:
    """``log beta_i(t)``; shape ``t.shape + (n+1,)``."""
    c = positive_vector(c, len(ks), "coefficients")
    t = _check_t(ks, t)
    a = ks.knots
    h0 = s.k0 * (t - ks.lo)[..., None]
    h1 = s.k1 * (ks.hi - t)[..., None]
    e0 = s.k0 * (a - ks.lo)
    e1 = s.k1 * (ks.hi - a)
    return np.log(c) + _log_pow(h0, e0) + _log_pow(h1, e1)


def log_basis_1d_logodds(ks: KnotSet1D, c, y) -> np.ndarray:
    """``log beta_i`` up to a common additive term, at log-odds parameter ``y``.

    With unit scalings and ``t = a_0 + (a_n - a_0) / (1 + exp(-y))`` every basis
    function equals a shared factor times ``c_i * exp((a_i - a_0) * y)``; other
    scalings only reparametrize ``y`` monotonically.  This reaches arbitrarily
    close to the domain ends without losing precision.  ``y = -inf`` / ``+inf``
    are the two endpoints.
    """
    c = positive_vector(c, len(ks), "coefficients")
    y = np.asarray(y, dtype=float)[..., None]
    d = ks.knots - ks.lo
    with np.errstate(invalid="ignore"):
        out = np.log(c) + d * y
    # endpoint limits: only knots tied with a_0 (resp. a_n) survive
    out = np.where(np.isneginf(y), np.where(d == 0, np.log(c), -np.inf), out)
    out = np.where(np.isposinf(y), np.where(d == d[-1], np.log(c) + 0.0, -np.inf), out)
    return out


def eval_basis_1d(ks: KnotSet1D, c, s: ScaleParams, t) -> np.ndarray:
    """GT-Bernstein values ``beta_i(t)`` (``t`` scalar or array)."""
    return np.exp(log_basis_1d(ks, c, s, t))


def normalize_log(log_terms) -> np.ndarray:
    """``exp(x) / sum(exp(x))`` along the last axis, max-shifted."""
    m = np.max(log_terms, axis=-1, keepdims=True)
    if np.any(np.isneginf(m)):
        raise DomainError("all basis terms vanish")
    e = np.exp(log_terms - m)
    return e / e.sum(axis=-1, keepdims=True)


def eval_rational_basis_1d(ks: KnotSet1D, c, w, s: ScaleParams, t) -> np.ndarray:
    """Rational form ``w_i beta_i / sum_j w_j beta_j``."""
    w = positive_vector(w, len(ks), "weights")
    return normalize_log(log_basis_1d(ks, c, s, t) + np.log(w))


def log_basis_2d(ks: KnotSet2D, hull: PolygonHull, c, p, tol: float = TOL) -> np.ndarray:
    """``log beta_i(p)`` for points ``p`` of shape ``(..., 2)``."""
    c = positive_vector(c, len(ks), "coefficients")
    p = np.asarray(p, dtype=float)
    if not np.all(contains(hull, p, tol)):
        raise DomainError("point outside the convex hull of the knots")
    E = knot_exponents(hull, tol)
    H = hull.edge_values(p)
    H = np.where(H <= SNAP * (1.0 + np.abs(p).max(initial=0.0)), 0.0, H)
    out = np.broadcast_to(np.log(c), p.shape[:-1] + (len(ks),)).copy()
    for k in range(hull.r):
        out += _log_pow(H[..., k:k + 1], E[:, k])
    return out


def eval_basis_2d(ks: KnotSet2D, hull: PolygonHull, c, p, tol: float = TOL) -> np.ndarray:
    return np.exp(log_basis_2d(ks, hull, c, p, tol))


def eval_rational_basis_2d(ks: KnotSet2D, hull: PolygonHull, c, w, p, tol: float = TOL) -> np.ndarray:
    w = positive_vector(w, len(ks), "weights")
    return normalize_log(log_basis_2d(ks, hull, c, p, tol) + np.log(w))


def toric_coordinates(hull: PolygonHull, p) -> np.ndarray:
    """``y(p) = sum_k n_k log h_k(p)`` for interior points.

    Every bivariate basis function factors as ``C(p) * c_i * exp(a_i . y(p))``
    with ``C`` independent of the knot, which is what makes image-level
    sampling in ``y`` possible.
    """
    H = hull.edge_values(p)
    if np.any(H <= 0):
        raise DomainError("toric coordinates need interior points")
    normals = np.array([[h.xi, h.eta] for h in hull.edges])
    return np.log(H) @ normals
