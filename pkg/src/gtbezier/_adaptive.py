"""Adaptive refinement of parameter samples until the image is gap-dense.

Uniform parameter grids are useless for strongly weighted patches: the whole
shape can get squeezed into a sliver of the domain.  These helpers refine in
whatever parametrization the caller hands in until consecutive image points
(1D) or triangle image edges (2D) are no longer than ``gap``.
"""
from __future__ import annotations

import logging

import numpy as np

log = logging.getLogger(__name__)

MAX_POINTS = 2_000_000


def refine_1d(f, y, gap, min_step=1e-9, max_points=MAX_POINTS):
    """Insert midpoints into the sorted parameter array ``y`` until
    ``|f(y[i+1]) - f(y[i])| <= gap``.  Returns ``(y, f(y))``."""
    y = np.asarray(y, dtype=float)
    P = f(y)
    while True:
        chord = np.linalg.norm(np.diff(P, axis=0), axis=1)
        dy = np.diff(y)
        split = np.flatnonzero((chord > gap) & (dy > min_step))
        if split.size == 0:
            break
        if y.size + split.size > max_points:
            log.warning("refine_1d: point cap %d reached, gap not met", max_points)
            break
        mids = 0.5 * (y[split] + y[split + 1])
        Pm = f(mids)
        y = np.insert(y, split + 1, mids)
        P = np.insert(P, split + 1, Pm, axis=0)
    return y, P


def _refine_segments(f, Yall, Pall, seg, gap, min_step, max_points):
    """Midpoint refinement of parameter segments ``seg`` (vertex index pairs)
    until each image chord is at most ``gap``; returns the new samples."""
    ya, yb = Yall[seg[:, 0]], Yall[seg[:, 1]]
    pa, pb = Pall[seg[:, 0]], Pall[seg[:, 1]]
    out_y, out_p = [], []
    total = Yall.shape[0]
    while ya.shape[0]:
        sel = (np.linalg.norm(pb - pa, axis=1) > gap) & (np.linalg.norm(yb - ya, axis=1) > min_step)
        ya, yb, pa, pb = ya[sel], yb[sel], pa[sel], pb[sel]
        if not ya.shape[0]:
            break
        if total + ya.shape[0] > max_points:
            log.warning("refine_2d: point cap %d reached, gap not met", max_points)
            break
        ym = 0.5 * (ya + yb)
        pm = f(ym)
        out_y.append(ym)
        out_p.append(pm)
        total += ym.shape[0]
        ya, yb = np.vstack([ya, ym]), np.vstack([ym, yb])
        pa, pb = np.vstack([pa, pm]), np.vstack([pm, pb])
    if not out_y:
        return np.empty((0, Yall.shape[1])), np.empty((0, Pall.shape[1]))
    return np.vstack(out_y), np.vstack(out_p)


def _triangle_heights(e, elen, worst):
    """Image height of each triangle over its longest edge."""
    a, b = e[:, 0], e[:, 2]
    if a.shape[1] == 2:
        cross = np.abs(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
    else:
        cross = np.linalg.norm(np.cross(a, b), axis=1)
    top = elen[np.arange(elen.shape[0]), worst]
    return cross / np.maximum(top, 1e-300)


def refine_2d(f, Y, tris, gap, min_step=1e-6, max_points=MAX_POINTS):
    """Longest-image-edge bisection of the triangles ``tris`` over vertices ``Y``.

    A triangle whose image is a sliver (height over its longest edge at most
    ``gap / 2``) or whose parameter vertices are collinear is retired and only
    its longest edge is refined further, in 1D.
    The triangulation is allowed to become non-conforming; only the vertex
    cloud matters.  Returns ``(Y, f(Y))``.
    """
    Yall = np.asarray(Y, dtype=float)
    Pall = f(Yall)
    active = np.asarray(tris, dtype=np.int64)
    # edge key -> midpoint index, kept as two sorted arrays
    known_keys = np.empty(0, dtype=np.int64)
    known_idx = np.empty(0, dtype=np.int64)
    stride = np.int64(max_points) * 4
    slivers = []
    count = Yall.shape[0]
    # growable vertex buffers (amortized doubling)
    Ybuf, Pbuf = Yall, Pall
    while active.size:
        e = np.stack([Pall[active[:, 1]] - Pall[active[:, 0]],
                      Pall[active[:, 2]] - Pall[active[:, 1]],
                      Pall[active[:, 0]] - Pall[active[:, 2]]], axis=1)
        elen = np.linalg.norm(e, axis=2)
        worst = np.argmax(elen, axis=1)
        rows = np.arange(active.shape[0])
        i = active[rows, worst]
        j = active[rows, (worst + 1) % 3]
        k = active[rows, (worst + 2) % 3]
        ylen = np.linalg.norm(Yall[j] - Yall[i], axis=1)
        split = (elen[rows, worst] > gap) & (ylen > min_step)
        dy1, dy2 = Yall[j] - Yall[i], Yall[k] - Yall[i]
        flat = np.abs(dy1[:, 0] * dy2[:, 1] - dy1[:, 1] * dy2[:, 0]) <= 1e-9 * ylen ** 2
        # collinear parameter triangles only matter through their edges
        thin = split & (flat | (_triangle_heights(e, elen, worst) <= 0.5 * gap))
        if np.any(thin):
            slivers.append(np.stack([i[thin], j[thin]], axis=1))
        sel = split & ~thin
        if not np.any(sel):
            break
        i, j, k = i[sel], j[sel], k[sel]
        lo, hi = np.minimum(i, j), np.maximum(i, j)
        keys = lo * stride + hi
        uk, first, inv = np.unique(keys, return_index=True, return_inverse=True)
        pos = np.searchsorted(known_keys, uk)
        pos_c = np.minimum(pos, max(known_keys.size - 1, 0))
        found = (known_keys[pos_c] == uk) if known_keys.size else np.zeros(uk.size, bool)
        mid_of_uk = np.empty(uk.size, dtype=np.int64)
        mid_of_uk[found] = known_idx[pos_c[found]]
        fresh = np.flatnonzero(~found)
        if count + fresh.size > max_points:
            log.warning("refine_2d: point cap %d reached, gap not met", max_points)
            break
        mid_of_uk[fresh] = count + np.arange(fresh.size)
        if fresh.size:
            a, b = lo[first[fresh]], hi[first[fresh]]
            ny = 0.5 * (Yall[a] + Yall[b])
            new = count + fresh.size
            if new > Ybuf.shape[0]:
                cap = max(new, 2 * Ybuf.shape[0])
                Ybuf = np.concatenate([Ybuf[:count], np.empty((cap - count, Ybuf.shape[1]))])
                Pbuf = np.concatenate([Pbuf[:count], np.empty((cap - count, Pbuf.shape[1]))])
            Ybuf[count:new] = ny
            Pbuf[count:new] = f(ny)
            count = new
            Yall, Pall = Ybuf[:count], Pbuf[:count]
            allk = np.concatenate([known_keys, uk[fresh]])
            alli = np.concatenate([known_idx, mid_of_uk[fresh]])
            order = np.argsort(allk, kind="stable")
            known_keys, known_idx = allk[order], alli[order]
        mids = mid_of_uk[inv.ravel()]
        active = np.concatenate([np.stack([i, mids, k], axis=1),
                                 np.stack([mids, j, k], axis=1)])
    if slivers:
        seg = np.unique(np.sort(np.vstack(slivers), axis=1), axis=0)
        ny, npts = _refine_segments(f, Yall, Pall, seg, gap, min_step, max_points - count)
        Yall, Pall = np.vstack([Yall, ny]), np.vstack([Pall, npts])
    return Yall, Pall


def stretched_axis(Y, h, rho):
    """Symmetric samples of ``[-Y, Y]``: spacing ``h`` near zero, growing
    geometrically as ``rho * |y|`` further out.

    Features at distance ``|y|`` from the origin have width proportional to
    ``|y|`` in the image parametrizations used here, so the point count only
    grows logarithmically in ``Y``.
    """
    pos = [0.0]
    while pos[-1] < Y:
        pos.append(pos[-1] + max(h, rho * pos[-1]))
    pos = np.minimum(np.array(pos), Y)
    return np.concatenate([-pos[:0:-1], pos])


def grid_triangles(nx, ny):
    """Two triangles per cell of an ``nx`` by ``ny`` vertex grid (row-major)."""
    ii, jj = np.meshgrid(np.arange(nx - 1), np.arange(ny - 1), indexing="ij")
    a = (ii * ny + jj).ravel()
    b, c, d = a + ny, a + 1, a + ny + 1
    return np.concatenate([np.stack([a, b, d], 1), np.stack([a, d, c], 1)])


def nearest_distances(f, y, P, q, iters=90):
    """Distance from each query point to the parametric set ``{f(s)}``.

    ``P = f(y)`` is a dense sample over sorted finite parameters ``y``.  The
    nearest sample is found exactly, then ``|f(s) - q|`` is minimized by golden
    section over the bracket formed by its two neighbours.
    """
    from scipy.spatial import cKDTree

    q = np.atleast_2d(np.asarray(q, dtype=float))
    d0, j = cKDTree(P).query(q)
    m = len(y)
    a = y[np.maximum(j - 1, 0)].astype(float)
    b = y[np.minimum(j + 1, m - 1)].astype(float)

    def dist(s):
        return np.linalg.norm(f(s) - q, axis=1)

    g = (np.sqrt(5.0) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = dist(c), dist(d)
    for _ in range(iters):
        left = fc < fd
        a, b = np.where(left, a, c), np.where(left, d, b)
        nc = np.where(left, b - g * (b - a), d)
        nd = np.where(left, c, a + g * (b - a))
        fx = dist(np.where(left, nc, nd))
        fc, fd = np.where(left, fx, fd), np.where(left, fc, fx)
        c, d = nc, nd
    return np.minimum(d0, np.minimum(fc, fd))
