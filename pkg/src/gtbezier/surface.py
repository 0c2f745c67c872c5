"""Multisided GT-Bezier surfaces over the convex hull of a planar knot set."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.spatial import Delaunay

from . import _adaptive
from .basis import log_basis_2d, normalize_log, positive_vector
from .curve import GTBezierCurve, Polyline, sample_curve_image
from .errors import DomainError, PreconditionError
from .geometry import TOL, KnotSet1D, KnotSet2D, PolygonHull, convex_hull_2d, diameter


@dataclass(frozen=True, eq=False)
class GTBezierSurface:
    """Planar knots with their hull, coefficients, weights and control points.

    ``hull`` is built from the knots with ``normalization`` when omitted.
    As for curves, ``log_weights`` may replace ``weights`` for huge weights.
    """

    knots: KnotSet2D
    control: np.ndarray
    weights: np.ndarray = None
    coeffs: np.ndarray = None
    hull: PolygonHull = None
    normalization: str = "primitive"
    log_weights: np.ndarray = None

    def __post_init__(self):
        ks = self.knots if isinstance(self.knots, KnotSet2D) else KnotSet2D(self.knots)
        m = len(ks)
        hull = self.hull if self.hull is not None else convex_hull_2d(ks, TOL, self.normalization)
        if hull.points.shape != ks.points.shape or not np.array_equal(hull.points, ks.points):
            raise PreconditionError("hull was built from a different knot set")
        b = np.array(self.control, dtype=float)
        if b.ndim != 2 or b.shape[0] != m:
            raise PreconditionError(f"control: expected {m} points, got shape {b.shape}")
        if not np.all(np.isfinite(b)):
            raise PreconditionError("control points must be finite")
        c = positive_vector(self.coeffs, m, "coefficients")
        if self.log_weights is not None:
            lw = np.array(self.log_weights, dtype=float).ravel()
            if lw.size != m or not np.all(np.isfinite(lw)):
                raise PreconditionError(f"log_weights: expected {m} finite values")
            with np.errstate(over="ignore"):
                w = np.exp(lw)
        else:
            w = positive_vector(self.weights, m, "weights")
            lw = np.log(w)
        for name, v in (("knots", ks), ("hull", hull), ("control", b), ("coeffs", c),
                        ("weights", w), ("log_weights", lw)):
            if isinstance(v, np.ndarray):
                v.setflags(write=False)
            object.__setattr__(self, name, v)

    def __len__(self):
        return len(self.knots)

    @property
    def dim(self) -> int:
        return self.control.shape[1]

    def __call__(self, u, v):
        return eval_surface(self, u, v)

    def replace(self, **changes) -> "GTBezierSurface":
        if "weights" in changes and "log_weights" not in changes:
            changes["log_weights"] = None
        if "knots" in changes and "hull" not in changes:
            changes["hull"] = None
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True, eq=False)
class SampledMesh:
    vertices: np.ndarray
    faces: np.ndarray
    params: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        n = len(self.vertices)
        if f.size and (f.min() < 0 or f.max() >= n):
            raise PreconditionError("face index out of range")
        object.__setattr__(self, "faces", f)


def eval_points(sf: GTBezierSurface, p) -> np.ndarray:
    """Surface points at parameters ``p`` of shape ``(..., 2)``."""
    T = normalize_log(log_basis_2d(sf.knots, sf.hull, sf.coeffs, p) + sf.log_weights)
    return T @ sf.control


def eval_surface(sf: GTBezierSurface, u, v) -> np.ndarray:
    p = np.stack(np.broadcast_arrays(np.asarray(u, dtype=float), np.asarray(v, dtype=float)), axis=-1)
    return eval_points(sf, p)


def eval_surface_toric(sf: GTBezierSurface, y) -> np.ndarray:
    """Surface point at toric coordinate ``y`` (shape ``(..., 2)``).

    Every basis function is a shared factor times ``c_i exp(a_i . y)``, so the
    interior image is parametrized by all of R^2 regardless of the edge-line
    normalization.
    """
    A = sf.knots.points - sf.knots.points.mean(axis=0)
    L = np.log(sf.coeffs) + sf.log_weights
    return normalize_log(np.asarray(y, dtype=float) @ A.T + L) @ sf.control


def _boundary_margin(hull, p):
    unit = np.array([np.hypot(h.xi, h.eta) for h in hull.edges])
    return (hull.edge_values(p) / unit).min(axis=-1)


def domain_samples(hull: PolygonHull, grid: int) -> np.ndarray:
    """Lattice points strictly inside the hull plus exact edge and corner samples."""
    V = hull.vertices
    lo, hi = V.min(axis=0), V.max(axis=0)
    u, v = np.meshgrid(np.linspace(lo[0], hi[0], grid), np.linspace(lo[1], hi[1], grid), indexing="ij")
    lattice = np.stack([u.ravel(), v.ravel()], axis=1)
    spacing = float((hi - lo).max()) / max(grid - 1, 1)
    lattice = lattice[_boundary_margin(hull, lattice) > 1e-3 * spacing]
    edge = []
    for i in range(hull.r):
        p0, p1 = hull.edge_endpoints(i)
        k = max(2, int(np.ceil(np.linalg.norm(p1 - p0) / spacing)) + 1)
        s = np.linspace(0.0, 1.0, k)[:-1, None]
        edge.append(p0 + s * (p1 - p0))
    return np.vstack(edge + [lattice])


def sample_surface(sf: GTBezierSurface, grid: int) -> SampledMesh:
    """Triangulated sample: a ``grid`` x ``grid`` lattice over the bounding box
    clipped to the hull, plus samples along every edge (corners included)."""
    grid = int(grid)
    if grid < 2:
        raise PreconditionError("grid must be at least 2")
    P = domain_samples(sf.hull, grid)
    tri = Delaunay(P).simplices
    a, b, c = P[tri[:, 0]], P[tri[:, 1]], P[tri[:, 2]]
    area = 0.5 * np.abs((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))
    tri = tri[area > 1e-12 * abs(sf.hull.area)]
    # fixed orientation and ordering make the output reproducible
    d = (P[tri[:, 1]] - P[tri[:, 0]])[:, 0] * (P[tri[:, 2]] - P[tri[:, 0]])[:, 1] \
        - (P[tri[:, 1]] - P[tri[:, 0]])[:, 1] * (P[tri[:, 2]] - P[tri[:, 0]])[:, 0]
    tri = np.where((d < 0)[:, None], tri[:, [0, 2, 1]], tri)
    tri = tri[np.lexsort(tri.T[::-1])]
    return SampledMesh(eval_points(sf, P), tri, P)


def corner_values(sf: GTBezierSurface) -> list:
    """``(knot index, surface point)`` at every hull vertex."""
    return [(int(i), eval_points(sf, sf.knots.points[i])) for i in sf.hull.vertex_indices]


def boundary_curve(sf: GTBezierSurface, edge_index: int) -> GTBezierCurve:
    """The surface restricted to one hull edge, as a univariate curve.

    Knots are distances from the edge's start vertex, the domain is
    ``[0, edge length]``, coefficients are 1 and the surface coefficients are
    folded into the weights.
    """
    r = sf.hull.r
    if not 0 <= edge_index < r:
        raise IndexError(f"edge index {edge_index} out of range 0..{r - 1}")
    members = list(sf.hull.edge_members[edge_index])
    p0, _ = sf.hull.edge_endpoints(edge_index)
    pts = sf.knots.points[members]
    l = np.linalg.norm(pts - p0, axis=1)
    order = np.argsort(l, kind="stable")
    idx = np.asarray(members)[order]
    logw = sf.log_weights[idx] + np.log(sf.coeffs[idx])
    return GTBezierCurve(KnotSet1D(l[order]), sf.control[idx], log_weights=logw)


def edge_parametrization(sf: GTBezierSurface, edge_index: int):
    """``s -> P(V + s (W - V))`` for ``s`` in ``[0, 1]`` along one edge."""
    p0, p1 = sf.hull.edge_endpoints(edge_index)

    def f(s):
        s = np.clip(np.asarray(s, dtype=float), 0.0, 1.0)
        return eval_points(sf, p0 + s[..., None] * (p1 - p0))

    return f


def isoparametric_polyline(sf: GTBezierSurface, axis: str, value: float, samples: int = 200) -> Polyline:
    """Surface sampled along ``u = value`` or ``v = value`` inside the hull.

    ``params`` holds the free coordinate.
    """
    if axis not in ("u", "v"):
        raise ValueError("axis must be 'u' or 'v'")
    if int(samples) < 2:
        raise PreconditionError("need at least 2 samples")
    fixed, free = (0, 1) if axis == "u" else (1, 0)
    lo, hi = -np.inf, np.inf
    for h in sf.hull.edges:
        coef = (h.xi, h.eta)
        a, b = coef[free], coef[fixed] * value + h.rho
        if a > 0:
            lo = max(lo, -b / a)
        elif a < 0:
            hi = min(hi, -b / a)
        elif b < -TOL:
            lo, hi = np.inf, -np.inf
    if not lo <= hi + TOL:
        raise DomainError(f"line {axis} = {value} misses the domain")
    hi = max(hi, lo)
    s = np.linspace(lo, hi, int(samples))
    p = np.empty((s.size, 2))
    p[:, fixed], p[:, free] = value, s
    return Polyline(eval_points(sf, p), s)


def merge_knots_surface(sf: GTBezierSurface, k: int, q: int) -> GTBezierSurface:
    """Limit surface when knot ``k`` moves onto knot ``q``.

    Knot ``k`` disappears; knot ``q`` gets the summed weight and the weighted
    mean control point.  Indices of the result follow the input with ``k``
    removed.
    """
    if not np.allclose(sf.coeffs, 1.0, rtol=0, atol=1e-12):
        raise PreconditionError("knot merging requires all coefficients equal to 1")
    m = len(sf)
    if not (0 <= k < m and 0 <= q < m) or k == q:
        raise PreconditionError("need two distinct valid knot indices")
    if k in sf.hull.vertex_indices:
        raise PreconditionError("merging away a hull vertex would change the domain")
    lw = sf.log_weights[[k, q]]
    top = lw.max()
    rel = np.exp(lw - top)
    b = (rel[:, None] * sf.control[[k, q]]).sum(axis=0) / rel.sum()
    logw = sf.log_weights.copy()
    control = sf.control.copy()
    logw[q] = top + np.log(rel.sum())
    control[q] = b
    keep = np.arange(m) != k
    return GTBezierSurface(KnotSet2D(sf.knots.points[keep]), control[keep], coeffs=np.ones(m - 1),
                           normalization=sf.normalization, log_weights=logw[keep])


def sample_surface_image(sf: GTBezierSurface, gap=None, resolution: int = 200) -> np.ndarray:
    """Point cloud dense in the surface image (every small image triangle has
    edges at most ``gap``) plus dense samples of every boundary curve."""
    if gap is None:
        gap = max(diameter(sf.control), 1e-300) / resolution
    uniq = np.unique(sf.knots.points, axis=0)
    dmin = float(min(np.linalg.norm(uniq[i] - uniq[j]) for i in range(len(uniq)) for j in range(i)))
    L = np.log(sf.coeffs) + sf.log_weights
    diam_b = max(diameter(sf.control), 1e-300)
    # beyond this box every point is within gap / 100 of a boundary curve
    tail = np.log(100.0 * diam_b / gap) + 2.0
    reach = float(L.max() - L.min()) + tail
    g = _adaptive.stretched_axis(reach / dmin, 1.5 / diameter(uniq), 0.5 / reach)
    k = g.size
    yy = np.stack(np.meshgrid(g, g, indexing="ij"), axis=-1).reshape(-1, 2)
    _, P = _adaptive.refine_2d(lambda y: eval_surface_toric(sf, y), yy,
                               _adaptive.grid_triangles(k, k), gap)
    parts = [P]
    for i in range(sf.hull.r):
        parts.append(sample_curve_image(boundary_curve(sf, i), gap).points)
    return np.vstack(parts)


def boundary_deviation(sf: GTBezierSurface, edge_index: int, samples: int = 500) -> float:
    """Symmetric Hausdorff distance between the surface along one edge and
    the reconstructed boundary curve.

    Samples of each side are measured against the other side as a continuous
    set (nearest sample refined by a 1D minimization), so the result reflects
    the shapes and not the sampling density.
    """
    from .curve import distance_to_curve, sample_curve

    cv = boundary_curve(sf, edge_index)
    f = edge_parametrization(sf, edge_index)
    s = np.linspace(0.0, 1.0, samples)
    to_curve = distance_to_curve(f(s), cv)
    dense = np.linspace(0.0, 1.0, 40 * samples + 1)
    to_edge = _adaptive.nearest_distances(f, dense, f(dense), sample_curve(cv, samples).points)
    return float(max(to_curve.max(), to_edge.max()))
