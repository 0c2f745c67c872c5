"""CSV, SVG and OBJ writers.  Output is deterministic: fixed ordering and
``%.17g`` number formatting for data files."""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _open_text(dest):
    if hasattr(dest, "write"):
        return dest, False
    return open(Path(dest), "w", encoding="utf-8", newline=""), True


def write_csv(dest, params, points, param_names=("t",), value_names=None) -> None:
    """One row per sample: parameter column(s), then x, y[, z] (or
    ``value_names``).  Header included."""
    params = np.asarray(params, dtype=float)
    points = np.asarray(points, dtype=float)
    if params.ndim == 1:
        params = params[:, None]
    if params.shape[0] != points.shape[0]:
        raise ValueError("params and points differ in length")
    coords = value_names or ("x", "y", "z")[:points.shape[1]]
    f, close = _open_text(dest)
    try:
        w = csv.writer(f, lineterminator="\r\n")
        w.writerow(list(param_names) + list(coords))
        for p, q in zip(params, points):
            w.writerow([_fmt(v) for v in p] + [_fmt(v) for v in q])
    finally:
        if close:
            f.close()


def csv_text(params, points, param_names=("t",)) -> str:
    buf = io.StringIO()
    write_csv(buf, params, points, param_names)
    return buf.getvalue()


def write_obj(dest, vertices, faces, comment=None) -> None:
    """Wavefront OBJ with vertices and triangles only (1-based indices)."""
    V = np.asarray(vertices, dtype=float)
    if V.shape[1] == 2:
        V = np.column_stack([V, np.zeros(len(V))])
    F = np.asarray(faces, dtype=np.int64)
    f, close = _open_text(dest)
    try:
        if comment:
            f.write(f"# {comment}\n")
        for v in V:
            f.write("v " + " ".join(_fmt(c) for c in v) + "\n")
        for t in F:
            f.write("f " + " ".join(str(int(i) + 1) for i in t) + "\n")
    finally:
        if close:
            f.close()


class SvgCanvas:
    """Orthographic xy view auto-fitted to the drawn data with a 5% margin."""

    def __init__(self, width=800, height=600, margin=0.05):
        self.width, self.height, self.margin = width, height, margin
        self.items = []
        self.lo = np.array([np.inf, np.inf])
        self.hi = -self.lo

    def _grow(self, pts):
        pts = np.asarray(pts, dtype=float)[:, :2]
        self.lo = np.minimum(self.lo, pts.min(axis=0))
        self.hi = np.maximum(self.hi, pts.max(axis=0))
        return pts

    def path(self, pts, stroke="#1f4e9c", width=2.0, dash=None, closed=False):
        self.items.append(("path", self._grow(pts), stroke, width, dash, closed))

    def circles(self, pts, r=4.0, fill="#c0392b"):
        self.items.append(("circles", self._grow(pts), fill, r))

    def _transform(self):
        span = np.maximum(self.hi - self.lo, 1e-12)
        lo = self.lo - self.margin * span
        span = span * (1 + 2 * self.margin)
        s = min(self.width / span[0], self.height / span[1])
        off = (np.array([self.width, self.height]) - s * span) / 2

        def tr(p):
            x = off[0] + s * (p[:, 0] - lo[0])
            y = self.height - (off[1] + s * (p[:, 1] - lo[1]))
            return np.column_stack([x, y])
        return tr

    def render(self) -> str:
        tr = self._transform()
        out = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
               f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" '
               f'height="{self.height}" viewBox="0 0 {self.width} {self.height}">',
               f'<rect width="{self.width}" height="{self.height}" fill="white"/>']
        for item in self.items:
            if item[0] == "path":
                _, pts, stroke, width, dash, closed = item
                q = tr(pts)
                d = "M " + " L ".join(f"{x:.3f} {y:.3f}" for x, y in q) + (" Z" if closed else "")
                extra = f' stroke-dasharray="{dash}"' if dash else ""
                out.append(f'<path d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}"{extra}/>')
            else:
                _, pts, fill, r = item
                for x, y in tr(pts):
                    out.append(f'<circle cx="{x:.3f}" cy="{y:.3f}" r="{r}" fill="{fill}"/>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, dest) -> None:
        f, close = _open_text(dest)
        try:
            f.write(self.render())
        finally:
            if close:
                f.close()


def curve_svg(curve_points, control_points, extra_paths=()) -> SvgCanvas:
    """Curve as a solid path, control polygon dashed, control points as dots."""
    c = SvgCanvas()
    c.path(control_points, stroke="#7f8c8d", width=1.2, dash="6,4")
    for pts in extra_paths:
        c.path(pts, stroke="#27ae60", width=1.5)
    c.path(curve_points)
    c.circles(control_points)
    return c
