"""Knot sets, convex hulls and the edge-line functions of the parameter domain.

Everything here is immutable and free of side effects.  Tolerances are
absolute and default to ``TOL``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DegenerateError, DomainError, NormalizationFallbackWarning, SingularityError

TOL = 1e-9

# Largest denominator accepted when recognising edge coefficients as rationals.
# Convergents of quadratic irrationals with q <= 1e4 still miss by > 1e-9.
MAX_DENOMINATOR = 10_000

NORMALIZATIONS = ("primitive", "unit", "custom")


def pow_conv(base, exponent):
    """``base ** exponent`` with ``0 ** 0 == 1`` and ``0 ** p == 0`` for ``p > 0``.

    Works elementwise on arrays.  Negative bases raise :class:`DomainError`,
    a zero base with a negative exponent raises :class:`SingularityError`.
    """
    b = np.asarray(base, dtype=float)
    e = np.asarray(exponent, dtype=float)
    if np.any(b < 0):
        raise DomainError("pow_conv: negative base")
    if np.any((b == 0) & (e < 0)):
        raise SingularityError("pow_conv: zero base with negative exponent")
    with np.errstate(divide="ignore"):
        out = np.where(e == 0, 1.0, np.power(b, e))
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True, eq=False)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DegenerateError(f"interval needs lo < hi, got [{self.lo}, {self.hi}]")

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def __contains__(self, t) -> bool:
        return self.lo <= t <= self.hi


@dataclass(frozen=True, eq=False)
class KnotSet1D:
    """Nondecreasing real knots ``a_0 <= ... <= a_n`` with ``a_0 < a_n``."""

    knots: np.ndarray

    def __post_init__(self):
        a = np.array(self.knots, dtype=float).ravel()
        if a.size < 2:
            raise DegenerateError("a 1D knot set needs at least two knots")
        if not np.all(np.isfinite(a)):
            raise DegenerateError("knots must be finite")
        if np.any(np.diff(a) < 0):
            raise DegenerateError("knots must be nondecreasing")
        if not a[0] < a[-1]:
            raise DegenerateError("knot span is empty (a_0 == a_n)")
        a.setflags(write=False)
        object.__setattr__(self, "knots", a)

    def __len__(self):
        return self.knots.size

    @property
    def n(self) -> int:
        return self.knots.size - 1

    @property
    def lo(self) -> float:
        return float(self.knots[0])

    @property
    def hi(self) -> float:
        return float(self.knots[-1])

    @property
    def strictly_increasing(self) -> bool:
        return bool(np.all(np.diff(self.knots) > 0))


@dataclass(frozen=True, eq=False)
class KnotSet2D:
    """At least three planar knots, not all collinear."""

    points: np.ndarray

    def __post_init__(self):
        p = np.array(self.points, dtype=float)
        if p.ndim != 2 or p.shape[1] != 2:
            raise DegenerateError("2D knots must be an (m, 2) array")
        if p.shape[0] < 3:
            raise DegenerateError("a 2D knot set needs at least three knots")
        if not np.all(np.isfinite(p)):
            raise DegenerateError("knots must be finite")
        d = p - p[0]
        scale = max(float(np.abs(d).max()), 1.0)
        cross = d[:, 0][:, None] * d[:, 1][None, :] - d[:, 1][:, None] * d[:, 0][None, :]
        if np.abs(cross).max() <= TOL * scale * scale:
            raise DegenerateError("all knots are collinear")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class EdgeLine:
    """Affine function ``h(u, v) = xi*u + eta*v + rho``, nonnegative on the hull."""

    xi: float
    eta: float
    rho: float
    normalization: str = "custom"
    fallback: bool = False

    def __post_init__(self):
        if self.xi == 0 and self.eta == 0:
            raise DegenerateError("edge line with zero normal")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(f"unknown normalization {self.normalization!r}")

    def __call__(self, p):
        p = np.asarray(p, dtype=float)
        return self.xi * p[..., 0] + self.eta * p[..., 1] + self.rho

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.xi, self.eta])

    def unit(self) -> "EdgeLine":
        return EdgeLine(*_unit(self.xi, self.eta, self.rho), normalization="unit")


@dataclass(frozen=True, eq=False)
class PolygonHull:
    """Convex hull of a 2D knot set.

    ``vertex_indices`` index the knots at strict corners, counterclockwise.
    Edge ``i`` runs from vertex ``i`` to vertex ``i + 1`` (cyclically) and
    ``edge_members[i]`` lists every knot lying on it, ordered along the edge.
    """

    points: np.ndarray
    vertex_indices: tuple
    edges: tuple
    edge_members: tuple

    @property
    def vertices(self) -> np.ndarray:
        return self.points[list(self.vertex_indices)]

    @property
    def r(self) -> int:
        return len(self.vertex_indices)

    @property
    def area(self) -> float:
        return polygon_area(self.vertices)

    def edge_endpoints(self, i):
        r = self.r
        return (self.points[self.vertex_indices[i % r]],
                self.points[self.vertex_indices[(i + 1) % r]])

    def edge_values(self, p) -> np.ndarray:
        """All edge functions at ``p``; shape ``p.shape[:-1] + (r,)``."""
        p = np.asarray(p, dtype=float)
        return np.stack([h(p) for h in self.edges], axis=-1)

    def with_edges(self, edges) -> "PolygonHull":
        edges = tuple(edges)
        if len(edges) != self.r:
            raise ValueError("one edge line per hull edge is required")
        return PolygonHull(self.points, self.vertex_indices, edges, self.edge_members)


def polygon_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def hull_1d(ks: KnotSet1D) -> Interval:
    return Interval(ks.lo, ks.hi)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _monotone_chain(points, tol):
    """Strict-corner CCW hull (Andrew's monotone chain); returns point indices."""
    order = sorted(range(len(points)), key=lambda i: (points[i][0], points[i][1]))
    uniq = []
    for i in order:
        if uniq and np.allclose(points[i], points[uniq[-1]], rtol=0, atol=tol):
            continue
        uniq.append(i)

    def half(seq):
        chain = []
        for i in seq:
            p = points[i]
            while len(chain) >= 2:
                o, a = points[chain[-2]], points[chain[-1]]
                scale = np.linalg.norm(a - o) * np.linalg.norm(p - o)
                if _cross(o, a, p) <= tol * max(scale, tol):
                    chain.pop()
                else:
                    break
            chain.append(i)
        return chain

    lower = half(uniq)
    upper = half(reversed(uniq))
    return lower[:-1] + upper[:-1]


def _as_fraction(x, tol):
    f = Fraction(x).limit_denominator(MAX_DENOMINATOR)
    if abs(float(f) - x) <= tol * max(1.0, abs(x)):
        return f
    return None


def _edge_line(p0, p1, strategy, tol):
    d = np.asarray(p1, dtype=float) - np.asarray(p0, dtype=float)
    xi, eta = -float(d[1]), float(d[0])
    rho = -(xi * float(p0[0]) + eta * float(p0[1]))
    if strategy == "primitive":
        fracs = [_as_fraction(c, tol) for c in (xi, eta, rho)]
        if all(f is not None for f in fracs):
            den = math.lcm(*(f.denominator for f in fracs))
            nums = [int(f * den) for f in fracs]
            g = math.gcd(*nums)
            return EdgeLine(*(n / g for n in nums), normalization="primitive")
        warnings.warn(
            f"edge {tuple(p0)} -> {tuple(p1)} has irrational coefficients; using unit normal",
            NormalizationFallbackWarning, stacklevel=3)
        return EdgeLine(*_unit(xi, eta, rho), normalization="unit", fallback=True)
    if strategy == "unit":
        return EdgeLine(*_unit(xi, eta, rho), normalization="unit")
    raise ValueError(f"unknown normalization strategy {strategy!r}")


def _unit(xi, eta, rho):
    s = math.hypot(xi, eta)
    return xi / s, eta / s, rho / s


def edge_lines(hull: PolygonHull, strategy: str = "primitive", tol: float = TOL) -> list:
    """Inward edge functions of ``hull`` under the given normalization.

    ``"primitive"`` scales rational coefficients to coprime integers and falls
    back to ``"unit"`` (with ``fallback=True`` and a warning) on irrational
    edges; ``"unit"`` gives ``xi**2 + eta**2 == 1``.
    """
    return [_edge_line(*hull.edge_endpoints(i), strategy, tol) for i in range(hull.r)]


def convex_hull_2d(ks: KnotSet2D, tol: float = TOL, normalization: str = "primitive") -> PolygonHull:
    pts = ks.points
    idx = _monotone_chain(pts, tol)
    if len(idx) < 3 or abs(polygon_area(pts[idx])) <= tol:
        raise DegenerateError("knots span no area")
    skeleton = PolygonHull(pts, tuple(idx), (), ())
    r = len(idx)
    members = []
    for i in range(r):
        p0, p1 = skeleton.edge_endpoints(i)
        h = EdgeLine(*_unit(*_raw_line(p0, p1)), normalization="unit")
        d = h(pts)
        if np.any(d < -tol):
            raise DegenerateError("hull construction failed: knot outside an edge")
        on = np.flatnonzero(np.abs(d) <= tol)
        along = (pts[on] - p0) @ (p1 - p0)
        members.append(tuple(int(j) for j in on[np.argsort(along, kind="stable")]))
    skeleton = PolygonHull(pts, tuple(idx), (), tuple(members))
    return skeleton.with_edges(edge_lines(skeleton, normalization, tol))


def _raw_line(p0, p1):
    d = p1 - p0
    xi, eta = -float(d[1]), float(d[0])
    return xi, eta, -(xi * float(p0[0]) + eta * float(p0[1]))


def contains(hull: PolygonHull, p, tol: float = TOL):
    """True where every edge function is ``>= -tol``.  Vectorized over points."""
    vals = hull.edge_values(p)
    ok = np.all(vals >= -tol, axis=-1)
    return bool(ok) if np.ndim(ok) == 0 else ok


def knot_exponents(hull: PolygonHull, tol: float = TOL) -> np.ndarray:
    """Matrix ``E[i, k] = h_k(a_i)``, exactly zero for knots on edge ``k``."""
    E = hull.edge_values(hull.points)
    for k, mem in enumerate(hull.edge_members):
        E[list(mem), k] = 0.0
    if np.any(E < -tol * max(1.0, np.abs(E).max())):
        raise DegenerateError("knot outside hull")
    return np.maximum(E, 0.0)


def diameter(points) -> float:
    """Largest pairwise distance of a point set (brute force in chunks)."""
    p = np.unique(np.asarray(points, dtype=float), axis=0)
    best = 0.0
    for s in range(0, p.shape[0], 512):
        d = np.linalg.norm(p[s:s + 512, None, :] - p[None, :, :], axis=2)
        best = max(best, float(d.max()))
    return best
