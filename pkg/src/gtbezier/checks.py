"""Property suite run by ``gtbezier check``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .basis import eval_rational_basis_1d, eval_rational_basis_2d
from .curve import (GTBezierCurve, count_line_crossings_curve, count_line_crossings_polygon,
                    endpoint_tangents, eval_curve, is_convex_polyline, sample_curve)
from .geometry import TOL, _as_fraction, diameter
from .surface import (GTBezierSurface, boundary_deviation, corner_values,
                      domain_samples, edge_parametrization, eval_points)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


def _hull_excess(control, pts):
    """Largest violation of the control hull's facet inequalities (None if flat)."""
    try:
        hull = ConvexHull(control)
    except (QhullError, ValueError):
        return None
    A, b = hull.equations[:, :-1], hull.equations[:, -1]
    return float((pts @ A.T + b).max())


def _hull_check(control, pts, tol):
    ex = _hull_excess(control, pts)
    if ex is None:
        return CheckResult("convex_hull", True, "skipped: control points not full-dimensional")
    return CheckResult("convex_hull", ex <= tol * max(1.0, diameter(control)), f"max excess {ex:.3g}")


def _affine(dim, rng):
    M = rng.normal(size=(dim, dim)) + 2 * np.eye(dim)
    return M, rng.normal(size=dim)


def _rational_gaps(a) -> bool:
    return all(_as_fraction(float(x), TOL) is not None for x in a - a[0])


def check_curve(cv: GTBezierCurve, tol: float = 1e-9, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    out = []
    t = np.linspace(cv.knots.lo, cv.knots.hi, 201)
    T = eval_rational_basis_1d(cv.knots, cv.coeffs, cv.weights, cv.scale, t)
    err = float(np.abs(T.sum(axis=1) - 1).max())
    out.append(CheckResult("partition_of_unity", err <= 1e-12, f"max |sum - 1| = {err:.3g}"))

    a = cv.knots.knots
    if a[0] < a[1] and a[-2] < a[-1]:
        ends = eval_curve(cv, np.array([a[0], a[-1]]))
        ok = np.array_equal(ends[0], cv.control[0]) and np.array_equal(ends[1], cv.control[-1])
        out.append(CheckResult("endpoint_interpolation", bool(ok), f"P(a_0)={ends[0]}, P(a_n)={ends[1]}"))
    else:
        out.append(CheckResult("endpoint_interpolation", True, "skipped: repeated end knots"))

    pts = sample_curve(cv, 1000).points
    out.append(_hull_check(cv.control, pts, tol))

    M, v = _affine(cv.dim, rng)
    moved = cv.replace(control=cv.control @ M.T + v)
    dev = float(np.abs(eval_curve(moved, t) - (eval_curve(cv, t) @ M.T + v)).max())
    out.append(CheckResult("affine_invariance", dev <= tol * max(1.0, diameter(moved.control)), f"max deviation {dev:.3g}"))

    if a[0] < a[1] and a[-2] < a[-1]:
        t0, t1 = endpoint_tangents(cv)
        worst = 0.0
        for tan, chord in ((t0, cv.control[1] - cv.control[0]), (t1, cv.control[-1] - cv.control[-2])):
            nt, nc = np.linalg.norm(tan), np.linalg.norm(chord)
            if nt > 0 and nc > 0:
                c = np.cross(np.pad(tan / nt, (0, 3 - cv.dim)), np.pad(chord / nc, (0, 3 - cv.dim)))
                worst = max(worst, float(np.linalg.norm(c)))
        out.append(CheckResult("endpoint_tangents_parallel", worst <= tol, f"max |cross| = {worst:.3g}"))

    if cv.dim == 2 and _rational_gaps(a):
        lo, hi = cv.control.min(axis=0), cv.control.max(axis=0)
        bad = 0
        for _ in range(100):
            p = lo + rng.random(2) * (hi - lo)
            ang = rng.random() * np.pi
            line = (p, (np.cos(ang), np.sin(ang)))
            if count_line_crossings_curve(cv, line) > count_line_crossings_polygon(cv.control, line):
                bad += 1
        out.append(CheckResult("variation_diminishing", bad == 0, f"{bad} of 100 lines violate"))
        if cv.control.shape[0] >= 3 and is_convex_polyline(cv.control):
            conv = is_convex_polyline(sample_curve(cv, 1000))
            out.append(CheckResult("convexity_preservation", conv, "sampled curve convex" if conv else "not convex"))
    elif cv.dim == 2:
        out.append(CheckResult("variation_diminishing", True, "skipped: knot gaps not rational"))
    return out


def check_surface(sf: GTBezierSurface, tol: float = 1e-9, seed: int = 0) -> list:
    rng = np.random.default_rng(seed)
    out = []
    p = domain_samples(sf.hull, 30)
    T = eval_rational_basis_2d(sf.knots, sf.hull, sf.coeffs, sf.weights, p)
    err = float(np.abs(T.sum(axis=1) - 1).max())
    out.append(CheckResult("partition_of_unity", err <= 1e-12, f"max |sum - 1| = {err:.3g}"))

    bad = [i for i, P in corner_values(sf) if not np.array_equal(P, sf.control[i])]
    out.append(CheckResult("corner_interpolation", not bad, f"mismatched corners {bad}" if bad else f"{sf.hull.r} corners exact"))

    out.append(_hull_check(sf.control, eval_points(sf, p), tol))

    M, v = _affine(sf.dim, rng)
    moved = sf.replace(control=sf.control @ M.T + v)
    dev = float(np.abs(eval_points(moved, p) - (eval_points(sf, p) @ M.T + v)).max())
    out.append(CheckResult("affine_invariance", dev <= tol * max(1.0, diameter(moved.control)), f"max deviation {dev:.3g}"))

    devs = [boundary_deviation(sf, i) for i in range(sf.hull.r)]
    out.append(CheckResult("boundary_curves", max(devs) <= 1e-6, f"max Hausdorff {max(devs):.3g} over {len(devs)} edges"))

    worst = 0.0
    s = np.linspace(0, 1, 101)
    for i in range(sf.hull.r):
        on = set(sf.hull.edge_members[i])
        off = [k for k in range(len(sf)) if k not in on]
        if not off:
            continue
        ctl = sf.control.copy()
        ctl[off] += rng.normal(size=(len(off), sf.dim))
        before = edge_parametrization(sf, i)(s)
        after = edge_parametrization(sf.replace(control=ctl), i)(s)
        worst = max(worst, float(np.abs(after - before).max()))
    out.append(CheckResult("boundary_support", worst <= 1e-12, f"max edge change {worst:.3g}"))
    return out


def run_checks(obj, tol: float = 1e-9, seed: int = 0) -> list:
    if isinstance(obj, GTBezierCurve):
        return check_curve(obj, tol, seed)
    if isinstance(obj, GTBezierSurface):
        return check_surface(obj, tol, seed)
    raise TypeError("expected a GTBezierCurve or GTBezierSurface")
