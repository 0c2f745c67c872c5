"""GT-Bezier curves: evaluation, sampling and the classical curve properties
(endpoint tangents, knot merging, weight limits, progressive interpolation,
line-crossing counts, convexity)."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from . import _adaptive
from .basis import (ScaleParams, log_basis_1d, log_basis_1d_logodds, normalize_log,
                    positive_vector)
from .errors import ConvergenceError, DegenerateError, DomainError, PreconditionError
from .geometry import KnotSet1D, diameter

ZERO_SIDE = 1e-12
CROSSING_SAMPLES = 4096
BISECTION_STEPS = 60


@dataclass(frozen=True, eq=False)
class GTBezierCurve:
    """Knots, control points, weights, coefficients and edge scalings.

    Weights are held in log form as well (``log_weights``) so that weight
    families like ``x ** lam * w`` stay representable for huge ``x``; pass
    ``log_weights`` instead of ``weights`` in that case.
    """

    knots: KnotSet1D
    control: np.ndarray
    weights: np.ndarray = None
    coeffs: np.ndarray = None
    scale: ScaleParams = field(default_factory=ScaleParams)
    log_weights: np.ndarray = None

    def __post_init__(self):
        ks = self.knots if isinstance(self.knots, KnotSet1D) else KnotSet1D(self.knots)
        n = len(ks)
        b = np.array(self.control, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        if b.ndim != 2 or b.shape[0] != n:
            raise PreconditionError(f"control: expected {n} points, got shape {b.shape}")
        if not np.all(np.isfinite(b)):
            raise PreconditionError("control points must be finite")
        c = positive_vector(self.coeffs, n, "coefficients")
        if self.log_weights is not None:
            lw = np.array(self.log_weights, dtype=float).ravel()
            if lw.size != n or not np.all(np.isfinite(lw)):
                raise PreconditionError(f"log_weights: expected {n} finite values")
            with np.errstate(over="ignore"):
                w = np.exp(lw)
        else:
            w = positive_vector(self.weights, n, "weights")
            lw = np.log(w)
        for name, v in (("knots", ks), ("control", b), ("coeffs", c), ("weights", w), ("log_weights", lw)):
            if isinstance(v, np.ndarray):
                v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def n(self) -> int:
        return self.knots.n

    @property
    def dim(self) -> int:
        return self.control.shape[1]

    def __call__(self, t):
        return eval_curve(self, t)

    def replace(self, **changes) -> "GTBezierCurve":
        if "weights" in changes and "log_weights" not in changes:
            changes["log_weights"] = None
        return dataclasses.replace(self, **changes)


@dataclass(frozen=True, eq=False)
class Polyline:
    points: np.ndarray
    params: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.points, dtype=float)
        t = np.asarray(self.params, dtype=float).ravel()
        if p.shape[0] != t.size:
            raise PreconditionError("points and params differ in length")
        if np.any(np.diff(t) < 0):
            raise PreconditionError("params must be nondecreasing")
        object.__setattr__(self, "points", p)
        object.__setattr__(self, "params", t)

    def __len__(self):
        return self.params.size


def eval_curve(cv: GTBezierCurve, t) -> np.ndarray:
    """Point(s) on the curve; ``t`` scalar gives shape ``(d,)``."""
    T = normalize_log(log_basis_1d(cv.knots, cv.coeffs, cv.scale, t) + cv.log_weights)
    return T @ cv.control


def logodds_parameter(cv: GTBezierCurve, t) -> np.ndarray:
    """``y(t) = k0 log h0(t) - k1 log h1(t)``: the image-level parameter.

    Every basis function is a common factor times ``c_i exp((a_i - a_0) y)``,
    whatever the scalings are.
    """
    ks, s = cv.knots, cv.scale
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return s.k0 * np.log(s.k0 * (t - ks.lo)) - s.k1 * np.log(s.k1 * (ks.hi - t))


def parameter_from_logodds(cv: GTBezierCurve, y) -> np.ndarray:
    """Inverse of :func:`logodds_parameter` (closed form for equal scalings,
    vectorized bisection otherwise)."""
    ks, s = cv.knots, cv.scale
    y = np.asarray(y, dtype=float)
    if s.k0 == s.k1 == 1.0:
        with np.errstate(over="ignore"):
            return ks.lo + (ks.hi - ks.lo) / (1.0 + np.exp(-y))
    lo = np.full(y.shape, ks.lo)
    hi = np.full(y.shape, ks.hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        below = logodds_parameter(cv, mid) < y
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    t = 0.5 * (lo + hi)
    t = np.where(np.isneginf(y), ks.lo, t)
    return np.where(np.isposinf(y), ks.hi, t)


def eval_curve_logodds(cv: GTBezierCurve, y) -> np.ndarray:
    """Curve point at image parameter ``y`` (``-inf``/``+inf`` are the endpoints)."""
    T = normalize_log(log_basis_1d_logodds(cv.knots, cv.coeffs, y) + cv.log_weights)
    return T @ cv.control


def sample_curve(cv: GTBezierCurve, m: int) -> Polyline:
    """``m`` points at uniformly spaced parameters, endpoints included."""
    if int(m) < 2:
        raise PreconditionError("need at least 2 samples")
    t = np.linspace(cv.knots.lo, cv.knots.hi, int(m))
    return Polyline(eval_curve(cv, t), t)


def control_polygon(cv: GTBezierCurve) -> Polyline:
    return Polyline(cv.control.copy(), cv.knots.knots.copy())


def _logodds_range(cv: GTBezierCurve):
    """Range of ``y`` outside which the image is within rounding of an endpoint,
    the knot span, and the log-weight spread plus margin."""
    d = np.unique(cv.knots.knots - cv.knots.lo)
    gaps = np.diff(d)
    lw = np.log(cv.coeffs) + cv.log_weights
    reach = float(lw.max() - lw.min()) + 40.0
    return reach / float(gaps.min()), float(d[-1]), reach


def _image_samples(cv: GTBezierCurve, gap):
    Y, span, reach = _logodds_range(cv)
    f = lambda yy: eval_curve_logodds(cv, yy)
    y, P = _adaptive.refine_1d(f, _adaptive.stretched_axis(Y, 0.5 / span, 0.5 / reach), gap)
    # the infinite ends are the exact endpoints
    y = np.concatenate([[-np.inf], y, [np.inf]])
    P = np.vstack([f(y[:1]), P, f(y[-1:])])
    return y, P


def sample_curve_image(cv: GTBezierCurve, gap=None, resolution: int = 1000) -> Polyline:
    """Sample dense in the image rather than the parameter.

    Consecutive points are at most ``gap`` apart (default: control diameter
    over ``resolution``).  Needed when weights are extreme and the image is
    squeezed into tiny parameter ranges near the domain ends.
    """
    if gap is None:
        gap = max(diameter(cv.control), 1e-300) / resolution
    y, P = _image_samples(cv, gap)
    return Polyline(P, parameter_from_logodds(cv, y))


def distance_to_curve(points, cv: GTBezierCurve, gap=None) -> np.ndarray:
    """Distance from each point to the continuous curve image.

    A dense image sample gives the nearest sample; the distance is then
    minimized over the neighbouring parameter bracket by golden section.
    """
    q = np.atleast_2d(np.asarray(points, dtype=float))
    diam = max(diameter(cv.control), 1e-300)
    y, P = _image_samples(cv, gap if gap is not None else diam / 4000)
    Y = _logodds_range(cv)[0]
    # beyond +-Y the image sits on the endpoints, so clipping loses nothing
    y = np.clip(y, -2 * Y, 2 * Y)
    return _adaptive.nearest_distances(lambda s: eval_curve_logodds(cv, s), y, P, q)

def endpoint_tangents(cv: GTBezierCurve):
    """Closed-form ``P'(a_0)`` and ``P'(a_n)``.

    The closed form holds for the scalings ``k0 = 1 / (a_1 - a_0)`` and
    ``k1 = 1 / (a_n - a_{n-1})``; those are used whatever ``cv.scale`` is.
    Knots tied with ``a_1`` (resp. ``a_{n-1}``) all contribute.
    """
    a = cv.knots.knots
    n = cv.n
    if not (a[0] < a[1] and a[n - 1] < a[n]):
        raise DegenerateError("endpoint tangents need a_0 < a_1 and a_{n-1} < a_n")
    k0 = 1.0 / (a[1] - a[0])
    k1 = 1.0 / (a[n] - a[n - 1])
    D = a[n] - a[0]
    cw = cv.coeffs * cv.weights
    b = cv.control

    near0 = np.flatnonzero(a == a[1])
    s0 = (cw[near0, None] * (b[near0] - b[0])).sum(axis=0) / cw[0]
    t0 = k0 * (k1 * D) ** (-k1 / k0) * s0

    near1 = np.flatnonzero(a == a[n - 1])
    s1 = (cw[near1, None] * (b[n] - b[near1])).sum(axis=0) / cw[n]
    t1 = k1 * (k0 * D) ** (-k0 / k1) * s1
    return t0, t1


def tangent_scale(cv: GTBezierCurve) -> ScaleParams:
    """The scalings under which :func:`endpoint_tangents` are derivatives."""
    a = cv.knots.knots
    return ScaleParams(1.0 / (a[1] - a[0]), 1.0 / (a[-1] - a[-2]))


def _require_unit_coeffs(c):
    if not np.allclose(c, 1.0, rtol=0, atol=1e-12):
        raise PreconditionError("knot merging requires all coefficients equal to 1")


def merge_knots(cv: GTBezierCurve, q: int, k: int, target: int = None) -> GTBezierCurve:
    """Limit curve when knots ``q .. q+k-1`` coalesce at knot ``target``.

    The merged entry gets the summed weight and the weighted mean of the
    control points.  ``target`` defaults to the last merged knot.
    """
    _require_unit_coeffs(cv.coeffs)
    n = cv.n
    if q < 0 or k < 2 or q + k - 1 > n:
        raise PreconditionError(f"invalid merge range q={q}, k={k} for n={n}")
    if target is None:
        target = q + k - 1
    if not q <= target <= q + k - 1:
        raise PreconditionError("merge target must be one of the merged knots")
    idx = np.arange(q, q + k)
    lw = cv.log_weights[idx]
    top = lw.max()
    rel = np.exp(lw - top)
    wsum = rel.sum()
    b = (rel[:, None] * cv.control[idx]).sum(axis=0) / wsum
    keep_lo, keep_hi = slice(0, q), slice(q + k, None)
    a = cv.knots.knots
    knots = np.concatenate([a[keep_lo], [a[target]], a[keep_hi]])
    control = np.vstack([cv.control[keep_lo], b[None], cv.control[keep_hi]])
    logw = np.concatenate([cv.log_weights[keep_lo], [top + np.log(wsum)], cv.log_weights[keep_hi]])
    return GTBezierCurve(KnotSet1D(knots), control, coeffs=np.ones(knots.size),
                         scale=cv.scale, log_weights=logw)


def weight_infinity_limit(cv: GTBezierCurve, i: int, t: float) -> np.ndarray:
    """Pointwise limit of the curve as weight ``i`` alone goes to infinity."""
    if not 0 <= i <= cv.n:
        raise IndexError(f"knot index {i} out of range 0..{cv.n}")
    ks = cv.knots
    if not ks.lo <= t <= ks.hi:
        raise DomainError(f"parameter {t} outside [{ks.lo}, {ks.hi}]")
    if t == ks.lo or t == ks.hi:
        return eval_curve(cv, t)
    return cv.control[i].copy()


@dataclass(frozen=True, eq=False)
class PIAResult:
    control: np.ndarray
    iterations: int
    residuals: list

    def __iter__(self):
        # allows ``control, iterations = pia_fit(...)``
        return iter((self.control, self.iterations))


def pia_fit(ks: KnotSet1D, c, w, s: ScaleParams, targets, max_iter: int = 500,
            tol: float = 1e-6) -> PIAResult:
    """Progressive iterative interpolation of ``targets`` at the knots.

    ``b <- b + (Q - P(a_i))`` starting from ``b = Q``; stops once the largest
    point residual is at most ``tol``.
    """
    if not ks.strictly_increasing:
        raise PreconditionError("progressive interpolation needs strictly increasing knots")
    Q = np.array(targets, dtype=float)
    if Q.ndim == 1:
        Q = Q[:, None]
    if Q.shape[0] != len(ks):
        raise PreconditionError(f"need one target per knot ({len(ks)}), got {Q.shape[0]}")
    w = positive_vector(w, len(ks), "weights")
    B = normalize_log(log_basis_1d(ks, c, s, ks.knots) + np.log(w))
    b = Q.copy()
    history = []
    for it in range(max_iter + 1):
        r = Q - B @ b
        res = float(np.linalg.norm(r, axis=1).max())
        history.append(res)
        if res <= tol:
            return PIAResult(b, it, history)
        if it < max_iter:
            b = b + r
    raise ConvergenceError(f"no convergence in {max_iter} iterations (residual {history[-1]:.3g})",
                           history)


def _line(line):
    p, d = line
    p = np.asarray(p, dtype=float).ravel()
    d = np.asarray(d, dtype=float).ravel()
    nd = np.linalg.norm(d)
    if p.size != 2 or d.size != 2:
        raise PreconditionError("lines are planar: (point, direction) in R^2")
    if nd == 0:
        raise DegenerateError("line direction is the zero vector")
    return p, d / nd


def _side(points, p, d):
    return d[0] * (points[..., 1] - p[1]) - d[1] * (points[..., 0] - p[0])


def _sign_changes(sd, zero):
    sg = np.sign(sd)
    sg[np.abs(sd) <= zero] = 0
    nz = sg[sg != 0]
    return int(np.count_nonzero(nz[1:] != nz[:-1])), sg


def count_line_crossings_polygon(poly, line, include_endpoints: bool = False) -> int:
    """Strict sign changes of the vertex sides along the polygon.

    Vertices on the line are skipped.  With ``include_endpoints`` a first or
    last vertex lying on the line counts as one extra crossing each.
    """
    p, d = _line(line)
    pts = np.asarray(getattr(poly, "points", poly), dtype=float)
    scale = max(1.0, float(np.abs(pts - p).max()))
    count, sg = _sign_changes(_side(pts, p, d), ZERO_SIDE * scale)
    if include_endpoints:
        count += int(sg[0] == 0) + int(sg[-1] == 0)
    return count


def _crossing_brackets(cv: GTBezierCurve, line, samples):
    """Sample intervals ``(lo, hi)`` over which the side of the line flips,
    with the side at ``lo``."""
    if cv.dim != 2:
        raise PreconditionError("line crossings need a planar curve")
    if samples < 1000:
        raise PreconditionError("at least 1000 samples are required")
    p, d = _line(line)
    t = np.linspace(cv.knots.lo, cv.knots.hi, int(samples))
    pts = eval_curve(cv, t)
    scale = max(1.0, float(np.abs(cv.control - p).max()))
    zero = ZERO_SIDE * scale
    sd = _side(pts, p, d)
    keep = np.abs(sd) > zero
    tk, sk = t[keep], np.sign(sd[keep])
    flips = np.flatnonzero(sk[1:] != sk[:-1])
    return tk[flips], tk[flips + 1], sk[flips], p, d


def curve_line_crossings(cv: GTBezierCurve, line, samples: int = CROSSING_SAMPLES) -> np.ndarray:
    """Parameters where the curve crosses the line (strict sign changes only),
    each located by bisection."""
    lo, hi, s_lo, p, d = _crossing_brackets(cv, line, samples)
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        sm = _side(eval_curve(cv, mid), p, d)
        same = np.sign(sm) == s_lo
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def count_line_crossings_curve(cv: GTBezierCurve, line, samples: int = CROSSING_SAMPLES,
                               include_endpoints: bool = False) -> int:
    """Number of strict crossings; touching without a side change counts 0.

    ``include_endpoints`` adds one per curve endpoint lying on the line, the
    same convention as :func:`count_line_crossings_polygon`.
    """
    count = _crossing_brackets(cv, line, samples)[0].size
    if include_endpoints:
        p, d = _line(line)
        ends = eval_curve(cv, np.array([cv.knots.lo, cv.knots.hi]))
        scale = max(1.0, float(np.abs(cv.control - p).max()))
        count += int(np.count_nonzero(np.abs(_side(ends, p, d)) <= ZERO_SIDE * scale))
    return count


def is_convex_polyline(poly) -> bool:
    """True iff the turning direction never flips (zero turns ignored)."""
    pts = np.asarray(getattr(poly, "points", poly), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise PreconditionError("convexity test needs planar points")
    if pts.shape[0] < 3:
        raise PreconditionError("convexity test needs at least 3 points")
    e = np.diff(pts, axis=0)
    ln = np.linalg.norm(e, axis=1)
    e, ln = e[ln > 0], ln[ln > 0]
    cross = e[:-1, 0] * e[1:, 1] - e[:-1, 1] * e[1:, 0]
    sig = cross[np.abs(cross) > ZERO_SIDE * ln[:-1] * ln[1:]]
    return bool(np.all(sig > 0) or np.all(sig < 0))
