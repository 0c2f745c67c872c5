"""Liftings, regular decompositions and toric degeneration of curves and surfaces.

Raising each weight to ``x ** lam_i * w_i`` and letting ``x`` grow, a curve or
surface collapses onto the union of the sub-patches cut out by the upper
hull of the lifted knots.  This module computes those decompositions,
samples both sides, and measures the gap by sampled Hausdorff distance.
"""
from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .curve import GTBezierCurve, sample_curve_image
from .errors import DegenerateError, DomainError, NormalizationFallbackWarning, PreconditionError
from .geometry import TOL, Interval, KnotSet1D, KnotSet2D, PolygonHull, convex_hull_2d, diameter
from .surface import GTBezierSurface, sample_surface_image

CURVE_RESOLUTION = 1000
SURFACE_RESOLUTION = 200


@dataclass(frozen=True, eq=False)
class Lifting:
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if not np.all(np.isfinite(v)):
            raise PreconditionError("lifting values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size


@dataclass(frozen=True, eq=False)
class RegularDecomposition:
    """Cells (knot index tuples), their domains, and knots on no upper facet."""

    cells: tuple
    cell_domains: tuple
    omitted: tuple


@dataclass(frozen=True, eq=False)
class SampledShape:
    points: np.ndarray

    def __post_init__(self):
        p = np.atleast_2d(np.asarray(self.points, dtype=float))
        if p.shape[0] == 0:
            raise PreconditionError("a sampled shape needs at least one point")
        object.__setattr__(self, "points", p)

    def __len__(self):
        return self.points.shape[0]


def _lift(lam, m) -> np.ndarray:
    lam = lam if isinstance(lam, Lifting) else Lifting(lam)
    if len(lam) != m:
        raise PreconditionError(f"lifting has {len(lam)} values for {m} knots")
    return lam.values


def _abs_tol(z, tol):
    spread = float(z.max() - z.min())
    return tol * max(spread, 1.0)


def regular_decomposition_1d(ks: KnotSet1D, lam, tol: float = TOL) -> RegularDecomposition:
    """Upper edges of the lifted points ``(a_i, lam_i)``, projected back."""
    a = ks.knots
    z = _lift(lam, len(ks))
    eps = _abs_tol(z, tol)
    cells = {}
    for i, j in itertools.combinations(range(a.size), 2):
        if a[i] == a[j]:
            continue
        slope = (z[j] - z[i]) / (a[j] - a[i])
        gap = z - (z[i] + slope * (a - a[i]))
        if np.any(gap > eps):
            continue
        members = tuple(int(k) for k in np.flatnonzero(np.abs(gap) <= eps))
        cells.setdefault(members, Interval(float(a[list(members)].min()), float(a[list(members)].max())))
    order = sorted(cells, key=lambda c: cells[c].lo)
    covered = set(itertools.chain.from_iterable(order))
    omitted = tuple(i for i in range(a.size) if i not in covered)
    return RegularDecomposition(tuple(order), tuple(cells[c] for c in order), omitted)


def regular_decomposition_2d(ks: KnotSet2D, hull: PolygonHull, lam, tol: float = TOL) -> RegularDecomposition:
    """Upper facets of the lifted points ``(u_i, v_i, lam_i)``, projected back.

    Brute force over point triples; fine for the few dozen knots a patch has.
    """
    P = ks.points
    m = len(ks)
    z = _lift(lam, m)
    eps = _abs_tol(z, tol)
    tri = np.array(list(itertools.combinations(range(m), 3)))
    p0, p1, p2 = P[tri[:, 0]], P[tri[:, 1]], P[tri[:, 2]]
    d1, d2 = p1 - p0, p2 - p0
    det = d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]
    scale = np.linalg.norm(d1, axis=1) * np.linalg.norm(d2, axis=1)
    ok = np.abs(det) > TOL * np.maximum(scale, TOL)
    if not np.any(ok):
        raise DegenerateError("no three affinely independent knots")
    tri, p0, d1, d2, det = tri[ok], p0[ok], d1[ok], d2[ok], det[ok]
    z0 = z[tri[:, 0]]
    e1, e2 = z[tri[:, 1]] - z0, z[tri[:, 2]] - z0
    # plane z = z0 + g . (p - p0) with g solving [d1; d2] g = [e1, e2]
    gx = (e1 * d2[:, 1] - e2 * d1[:, 1]) / det
    gy = (d1[:, 0] * e2 - d2[:, 0] * e1) / det
    rel = P[None, :, :] - p0[:, None, :]
    gap = z[None, :] - (z0[:, None] + gx[:, None] * rel[..., 0] + gy[:, None] * rel[..., 1])
    support = np.all(gap <= eps, axis=1)
    cells = {}
    for row in np.flatnonzero(support):
        members = tuple(int(k) for k in np.flatnonzero(np.abs(gap[row]) <= eps))
        if members not in cells:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NormalizationFallbackWarning)
                cells[members] = convex_hull_2d(KnotSet2D(P[list(members)]), TOL, "unit")
    order = sorted(cells, key=lambda c: (P[list(c)].mean(axis=0)[0], P[list(c)].mean(axis=0)[1]))
    covered = set(itertools.chain.from_iterable(order))
    omitted = tuple(i for i in range(m) if i not in covered)
    return RegularDecomposition(tuple(order), tuple(cells[c] for c in order), omitted)


def cell_shapes(dec: RegularDecomposition) -> tuple:
    """Sorted vertex counts of the cell polygons, e.g. ``(3, 3, 3, 4, 4)``."""
    return tuple(sorted(d.r for d in dec.cell_domains))


def find_lifting(ks: KnotSet2D, hull: PolygonHull, shapes, seed: int = 0, trials: int = 20000,
                 low: int = 0, high: int = 4):
    """Random search for an integer lifting whose cells have the given shapes.

    Returns ``(Lifting, RegularDecomposition)`` or ``None``.
    """
    rng = np.random.default_rng(seed)
    want = tuple(sorted(shapes))
    for _ in range(trials):
        lam = rng.integers(low, high + 1, len(ks)).astype(float)
        dec = regular_decomposition_2d(ks, hull, lam)
        if not dec.omitted and cell_shapes(dec) == want:
            return Lifting(lam), dec
    return None


def log_weight_family(w, lam, x) -> np.ndarray:
    """``log(x ** lam_i * w_i)``."""
    _check_x(x)
    w = np.asarray(w, dtype=float).ravel()
    if np.any(w <= 0):
        raise PreconditionError("weights must be positive")
    z = _lift(lam, w.size)
    return np.log(w) + z * np.log(x)


def weight_family(w, lam, x) -> np.ndarray:
    """``x ** lam_i * w_i``; ``x == 1`` returns ``w`` unchanged."""
    if x == 1:
        return np.array(w, dtype=float).ravel()
    with np.errstate(over="ignore"):
        return np.exp(log_weight_family(w, lam, x))


def _require_unit_coeffs(c):
    if not np.allclose(c, 1.0, rtol=0, atol=1e-12):
        raise PreconditionError("degeneration requires all coefficients equal to 1")


def regular_control_curve(cv: GTBezierCurve, dec: RegularDecomposition, samples: int = CURVE_RESOLUTION,
                          gap=None) -> SampledShape:
    """Union of the sub-curves on each cell, sampled ``gap``-densely
    (default: control diameter / ``samples``)."""
    _require_unit_coeffs(cv.coeffs)
    if gap is None:
        gap = max(diameter(cv.control), 1e-300) / samples
    parts = []
    for cell in dec.cells:
        if len(cell) < 2:
            raise PreconditionError("a decomposition cell needs at least 2 knots")
        idx = list(cell)
        sub = GTBezierCurve(KnotSet1D(cv.knots.knots[idx]), cv.control[idx], log_weights=cv.log_weights[idx])
        parts.append(sample_curve_image(sub, gap).points)
    return SampledShape(np.vstack(parts))


def _collinear_piece(P, control, logw, gap):
    d = P[-1] - P[0]
    ln = np.linalg.norm(d)
    s = (P - P[0]) @ (d / ln)
    order = np.argsort(s, kind="stable")
    sub = GTBezierCurve(KnotSet1D(s[order]), control[order], log_weights=logw[order])
    return sample_curve_image(sub, gap).points


def regular_control_surface(sf: GTBezierSurface, dec: RegularDecomposition, grid: int = SURFACE_RESOLUTION,
                            gap=None) -> SampledShape:
    """Union of the sub-surfaces on each cell (collinear cells give curves)."""
    _require_unit_coeffs(sf.coeffs)
    if gap is None:
        gap = max(diameter(sf.control), 1e-300) / grid
    parts = []
    for cell in dec.cells:
        if len(cell) == 0:
            raise PreconditionError("empty decomposition cell")
        idx = list(cell)
        P = sf.knots.points[idx]
        if len(idx) == 1:
            parts.append(sf.control[idx])
            continue
        try:
            ks = KnotSet2D(P)
        except DegenerateError:
            far = np.argmax(np.linalg.norm(P - P[0], axis=1))
            order = [0, far] + [k for k in range(len(idx)) if k not in (0, far)]
            parts.append(_collinear_piece(P[order], sf.control[idx][order], sf.log_weights[idx][order], gap))
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NormalizationFallbackWarning)
            sub = GTBezierSurface(ks, sf.control[idx], normalization="unit", log_weights=sf.log_weights[idx])
        parts.append(sample_surface_image(sub, gap))
    return SampledShape(np.vstack(parts))


def directed_hausdorff(a, b) -> float:
    """``max_{p in a} min_{q in b} |p - q|`` (exact nearest neighbours)."""
    a = getattr(a, "points", a)
    b = getattr(b, "points", b)
    d, _ = cKDTree(np.asarray(b, dtype=float)).query(np.asarray(a, dtype=float))
    return float(d.max())


def hausdorff_distance(a, b) -> float:
    """Symmetric Hausdorff distance between two sampled shapes."""
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


@dataclass(frozen=True, eq=False)
class DegenerationFrame:
    x: float
    shape: SampledShape
    distance: float


def regular_control_shape(obj, lam, samples=None):
    """Decomposition and sampled regular control shape of a curve or surface."""
    if isinstance(obj, GTBezierCurve):
        dec = regular_decomposition_1d(obj.knots, lam)
        return dec, regular_control_curve(obj, dec, samples or CURVE_RESOLUTION)
    if isinstance(obj, GTBezierSurface):
        dec = regular_decomposition_2d(obj.knots, obj.hull, lam)
        return dec, regular_control_surface(obj, dec, samples or SURFACE_RESOLUTION)
    raise TypeError("expected a GTBezierCurve or GTBezierSurface")


def _check_x(x):
    if not x > 0:
        raise DomainError("weight family parameter x must be positive")
    return x


def degenerate(obj, lam, x):
    """The object with weights ``x ** lam * w`` (kept in log form)."""
    lw = obj.log_weights + _lift(lam, obj.log_weights.size) * np.log(_check_x(x))
    return obj.replace(log_weights=lw)


def sample_image(obj, samples=None) -> SampledShape:
    if isinstance(obj, GTBezierCurve):
        return SampledShape(sample_curve_image(obj, resolution=samples or CURVE_RESOLUTION).points)
    return SampledShape(sample_surface_image(obj, resolution=samples or SURFACE_RESOLUTION))


def degeneration_sequence(obj, lam, xs, samples=None) -> list:
    """For each ``x``: the sampled image under ``x ** lam * w`` and its
    Hausdorff distance to the regular control shape."""
    _require_unit_coeffs(obj.coeffs)
    xs = [float(x) for x in xs]
    if any(not x > 0 for x in xs):
        raise DomainError("x values must be positive")
    if any(b <= a for a, b in zip(xs, xs[1:])):
        raise PreconditionError("x values must be strictly increasing")
    _, target = regular_control_shape(obj, lam, samples)
    frames = []
    for x in xs:
        shape = sample_image(degenerate(obj, lam, x), samples)
        frames.append(DegenerationFrame(x, shape, hausdorff_distance(shape, target)))
    return frames
