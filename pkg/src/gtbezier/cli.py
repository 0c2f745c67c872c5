"""``gtbezier`` command line tool.

Exit codes: 0 success, 1 some property check failed, 2 usage error (unknown
subcommand or bad flag), 3 invalid input, 4 numerical failure, 5 I/O error.
Set ``GTB_LOG`` (e.g. ``DEBUG``, ``INFO``) for diagnostics on stderr.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from .errors import GTBezierError, SolverError

log = logging.getLogger("gtbezier")

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_INPUT, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3, 4, 5


def _float_list(text):
    from .scene import eval_expr

    try:
        return [eval_expr(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 2:
        raise argparse.ArgumentTypeError("must be at least 2")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gtbezier", description="GT-Bezier curves and multisided surfaces.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("scene", help="scene file (bundled scene names also accepted)")
        sp.add_argument("--normalization", choices=("primitive", "unit"), default=None,
                        help="edge-line normalization for surfaces (overrides the scene)")
        return sp

    sp = add("eval", "write sampled points as CSV")
    sp.add_argument("--samples", type=_positive_int, default=200, help="curve samples")
    sp.add_argument("--grid", type=_positive_int, default=30, help="surface lattice size")
    sp.add_argument("-o", "--output", help="output CSV (default: stdout)")

    sp = add("plot", "write an SVG of the curve and its control polygon")
    sp.add_argument("--samples", type=_positive_int, default=801)
    sp.add_argument("-o", "--output", required=True)

    sp = add("mesh", "write a triangulated surface sample as OBJ")
    sp.add_argument("--grid", type=_positive_int, default=40)
    sp.add_argument("-o", "--output", required=True)

    sp = add("solve-coeffs", "solve partition-of-unity coefficients for the curve knots")
    sp.add_argument("--nodes", type=_float_list, default=None, help="comma-separated interpolation nodes")

    sp = add("decompose", "print the regular decomposition induced by the scene's lifting")
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = add("degenerate", "frames and distances of the toric degeneration")
    sp.add_argument("--x", type=_float_list, required=True, help="comma-separated x values")
    sp.add_argument("--samples", type=_positive_int, default=None, help="sampling resolution")
    sp.add_argument("--grid", type=_positive_int, default=40, help="surface frame mesh lattice")
    sp.add_argument("-o", "--output", default=".", help="output directory")

    sp = add("check", "run the property suite")
    sp.add_argument("--tol", type=float, default=1e-9)
    return p


def _configure_logging():
    level = os.environ.get("GTB_LOG", "").strip().upper() or "WARNING"
    if level.isdigit():
        level = int(level)
    elif not isinstance(logging.getLevelName(level), int):
        level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    logging.captureWarnings(True)


def _load(args):
    from .scene import load_scene

    scene = load_scene(args.scene)
    obj = scene.build(normalization=args.normalization)
    log.info("loaded %s scene %s with %d knots", scene.kind, args.scene, len(scene.knots))
    return scene, obj


def _cmd_eval(args, out):
    from .curve import sample_curve
    from .export import write_csv
    from .surface import sample_surface

    scene, obj = _load(args)
    if scene.kind == "curve":
        poly = sample_curve(obj, args.samples)
        params, pts, names = poly.params, poly.points, ("t",)
    else:
        mesh = sample_surface(obj, args.grid)
        params, pts, names = mesh.params, mesh.vertices, ("u", "v")
    write_csv(args.output or out, params, pts, names)
    return EXIT_OK


def _cmd_plot(args, out):
    from .curve import sample_curve
    from .export import SvgCanvas, curve_svg
    from .surface import boundary_curve

    scene, obj = _load(args)
    if scene.kind == "curve":
        canvas = curve_svg(sample_curve(obj, args.samples).points, obj.control)
    else:
        canvas = SvgCanvas()
        for i in range(obj.hull.r):
            cv = boundary_curve(obj, i)
            canvas.path(sample_curve(cv, args.samples).points)
        canvas.circles(obj.control)
    canvas.save(args.output)
    print(f"wrote {args.output}", file=out)
    return EXIT_OK


def _cmd_mesh(args, out):
    from .export import write_obj
    from .surface import sample_surface

    scene, obj = _load(args)
    if scene.kind != "surface":
        raise _Usage("mesh needs a surface scene")
    mesh = sample_surface(obj, args.grid)
    write_obj(args.output, mesh.vertices, mesh.faces)
    print(f"wrote {args.output} ({len(mesh.vertices)} vertices, {len(mesh.faces)} faces)", file=out)
    return EXIT_OK


def _cmd_solve(args, out):
    from .coefficients import solve_partition_coefficients
    from .geometry import KnotSet1D

    scene, obj = _load(args)
    if scene.kind != "curve":
        raise _Usage("solve-coeffs needs a curve scene")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        sol = solve_partition_coefficients(KnotSet1D(scene.knots), scene.scale, args.nodes)
    print("coefficients: " + " ".join(format(c, ".17g") for c in sol.coeffs), file=out)
    print(f"residual: {sol.residual:.3e}", file=out)
    print(f"condition: {sol.condition:.3e}", file=out)
    for w in caught:
        print(f"warning: {w.message}", file=out)
    return EXIT_OK


def _cmd_decompose(args, out):
    from .degeneration import regular_decomposition_1d, regular_decomposition_2d

    scene, obj = _load(args)
    if scene.lifting is None:
        raise _Usage("scene has no lifting")
    if scene.kind == "curve":
        dec = regular_decomposition_1d(obj.knots, scene.lifting, args.tol)
    else:
        dec = regular_decomposition_2d(obj.knots, obj.hull, scene.lifting, args.tol)
    for cell, dom in zip(dec.cells, dec.cell_domains):
        where = f"[{dom.lo:.6g}, {dom.hi:.6g}]" if scene.kind == "curve" else f"{dom.r}-gon area {dom.area:.6g}"
        print(f"cell {list(cell)} {where}", file=out)
    print(f"omitted {list(dec.omitted)}", file=out)
    return EXIT_OK


def _cmd_degenerate(args, out):
    from .curve import GTBezierCurve, sample_curve_image
    from .degeneration import degenerate, degeneration_sequence, regular_control_shape
    from .export import curve_svg, write_csv, write_obj
    from .surface import sample_surface

    scene, obj = _load(args)
    if scene.lifting is None:
        raise _Usage("scene has no lifting")
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    frames = degeneration_sequence(obj, scene.lifting, args.x, args.samples)
    if scene.kind == "curve":
        dec, target = regular_control_shape(obj, scene.lifting, args.samples)
    for i, fr in enumerate(frames):
        obj_x = degenerate(obj, scene.lifting, fr.x)
        if scene.kind == "curve":
            path = outdir / f"frame_{i:02d}.svg"
            subs = []
            for cell in dec.cells:
                idx = list(cell)
                subs.append(sample_curve_image(GTBezierCurve(obj.knots.knots[idx], obj.control[idx],
                                                             log_weights=obj.log_weights[idx])).points)
            curve_svg(sample_curve_image(obj_x).points, obj.control, subs).save(path)
        else:
            path = outdir / f"frame_{i:02d}.obj"
            mesh = sample_surface(obj_x, args.grid)
            write_obj(path, mesh.vertices, mesh.faces)
        print(f"x={fr.x:g} distance={fr.distance:.6g} -> {path}", file=out)
    write_csv(outdir / "distances.csv", [fr.x for fr in frames],
              np.array([[fr.distance] for fr in frames]), ("x",), ("distance",))
    return EXIT_OK


def _cmd_check(args, out):
    from .checks import run_checks

    scene, obj = _load(args)
    results = run_checks(obj, tol=args.tol)
    for r in results:
        print(r.line(), file=out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK


COMMANDS = {"eval": _cmd_eval, "plot": _cmd_plot, "mesh": _cmd_mesh, "solve-coeffs": _cmd_solve,
            "decompose": _cmd_decompose, "degenerate": _cmd_degenerate, "check": _cmd_check}


class _Usage(GTBezierError):
    """Valid scene, but not usable with the requested command."""


def run_cli(argv=None, out=None) -> int:
    """Run one command; returns the exit code instead of exiting."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    _configure_logging()
    try:
        return COMMANDS[args.command](args, out)
    except (SolverError, FloatingPointError, np.linalg.LinAlgError, OverflowError) as exc:
        print(f"gtbezier: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (GTBezierError, ValueError, IndexError) as exc:
        print(f"gtbezier: invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"gtbezier: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


def main(argv=None):
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
