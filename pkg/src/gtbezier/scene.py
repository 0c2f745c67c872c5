"""Scene files: JSON descriptions of a curve or surface.

Numbers may be written as JSON numbers or as strings holding small
arithmetic expressions such as ``"sqrt(2)/4"`` or ``"8/7"``.  See
``docs/scene_format.md`` for the schema.
"""
from __future__ import annotations

import ast
import json
import math
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .basis import ScaleParams
from .errors import GTBezierError, PreconditionError

KINDS = ("curve", "surface")
FIELDS = ("kind", "name", "knots", "coefficients", "weights", "control", "scale", "lifting",
          "normalization")


class SceneError(GTBezierError, ValueError):
    """Invalid scene file.  ``code`` names the failure class, ``path`` the
    offending field, ``line`` its line in the source (when known)."""

    code = "invalid"

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path:
            where += f" at {path}"
        if line:
            where += f" (line {line})"
        super().__init__(f"[{self.code}] {message}{where}")


class SceneParseError(SceneError):
    code = "parse"


class SceneSchemaError(SceneError):
    code = "schema"


class SceneLengthError(SceneError):
    code = "length-mismatch"


class SceneValueError(SceneError):
    code = "nonpositive"


class SceneDegenerateError(SceneError):
    code = "degenerate"


_BINOPS = {ast.Add: lambda a, b: a + b, ast.Sub: lambda a, b: a - b,
           ast.Mult: lambda a, b: a * b, ast.Div: lambda a, b: a / b}


def eval_expr(text: str) -> float:
    """Evaluate a number expression: decimals, ``+ - * /``, parentheses, ``sqrt``."""
    try:
        tree = ast.parse(text.strip(), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse expression {text!r}") from exc

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and type(node.value) in (int, float):
            return float(node.value)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](ev(node.left), ev(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt"
                and len(node.args) == 1 and not node.keywords):
            v = ev(node.args[0])
            if v < 0:
                raise ValueError("sqrt of a negative number")
            return math.sqrt(v)
        raise ValueError(f"unsupported syntax in expression {text!r}")

    try:
        value = ev(tree)
    except ZeroDivisionError as exc:
        raise ValueError(f"division by zero in {text!r}") from exc
    if not math.isfinite(value):
        raise ValueError(f"expression {text!r} is not finite")
    return value


@dataclass(frozen=True, eq=False)
class Scene:
    kind: str
    knots: np.ndarray
    control: np.ndarray
    coefficients: np.ndarray = None
    weights: np.ndarray = None
    scale: ScaleParams = ScaleParams()
    lifting: np.ndarray = None
    normalization: str = "primitive"
    name: str = ""

    def build(self, normalization=None):
        """The curve or surface object this scene describes."""
        from .curve import GTBezierCurve
        from .surface import GTBezierSurface

        if self.kind == "curve":
            return GTBezierCurve(self.knots, self.control, self.weights, self.coefficients, self.scale)
        return GTBezierSurface(self.knots, self.control, self.weights, self.coefficients,
                               normalization=normalization or self.normalization)


def value_lines(text: str) -> dict:
    """Line number of every value in a (valid) JSON document, keyed by field
    path such as ``weights[3]`` or ``scale.k0``."""
    lines = {}
    pos = 0

    def ws():
        nonlocal pos
        while pos < len(text) and text[pos] in " \t\r\n":
            pos += 1

    def string():
        nonlocal pos
        s, pos = json.decoder.scanstring(text, pos + 1)
        return s

    def value(path):
        nonlocal pos
        ws()
        lines[path] = text.count("\n", 0, pos) + 1
        ch = text[pos]
        if ch in "{[":
            close = "}" if ch == "{" else "]"
            pos += 1
            ws()
            i = 0
            while text[pos] != close:
                if ch == "{":
                    key = string()
                    ws()
                    pos += 1  # ':'
                    value(key if path == "$" else f"{path}.{key}")
                else:
                    value(f"{path}[{i}]")
                i += 1
                ws()
                if text[pos] == ",":
                    pos += 1
                    ws()
            pos += 1
        elif ch == '"':
            string()
        else:
            while pos < len(text) and text[pos] not in ",]} \t\r\n":
                pos += 1

    value("$")
    return lines


class _Locator:
    def __init__(self, text):
        try:
            self.lines = value_lines(text) if text else {}
        except (IndexError, ValueError):
            self.lines = {}

    def line(self, path):
        return self.lines.get(path)


def _number(value, path, loc):
    if isinstance(value, bool):
        raise SceneParseError("booleans are not numbers", path, loc.line(path))
    if isinstance(value, (int, float)):
        v = float(value)
    elif isinstance(value, str):
        try:
            v = eval_expr(value)
        except ValueError as exc:
            raise SceneParseError(str(exc), path, loc.line(path)) from None
    else:
        raise SceneParseError(f"expected a number, got {type(value).__name__}", path, loc.line(path))
    if not math.isfinite(v):
        raise SceneParseError("number is not finite", path, loc.line(path))
    return v


def _vector(value, path, loc):
    if not isinstance(value, list):
        raise SceneSchemaError("expected a list", path, loc.line(path))
    return np.array([_number(x, f"{path}[{i}]", loc) for i, x in enumerate(value)])


def _points(value, path, loc, dims):
    if not isinstance(value, list) or not value:
        raise SceneSchemaError("expected a nonempty list of points", path, loc.line(path))
    rows = []
    for i, p in enumerate(value):
        if not isinstance(p, list):
            raise SceneSchemaError("expected a point (list of numbers)", f"{path}[{i}]", loc.line(f"{path}[{i}]"))
        if len(p) not in dims:
            raise SceneSchemaError(f"point must have {' or '.join(map(str, dims))} coordinates",
                                   f"{path}[{i}]", loc.line(f"{path}[{i}]"))
        rows.append([_number(x, f"{path}[{i}][{j}]", loc) for j, x in enumerate(p)])
    if len({len(r) for r in rows}) != 1:
        raise SceneSchemaError("all points need the same dimension", path, loc.line(path))
    return np.array(rows)


def scene_from_dict(data: dict, source: str = "") -> Scene:
    """Validate a decoded scene document."""
    loc = _Locator(source)
    if not isinstance(data, dict):
        raise SceneSchemaError("top level must be an object", "$", 1)
    for key in data:
        if key not in FIELDS:
            raise SceneSchemaError(f"unknown field {key!r}", key, loc.line(key))
    for key in ("kind", "knots", "control"):
        if key not in data:
            raise SceneSchemaError(f"missing required field {key!r}", key, None)
    kind = data["kind"]
    if kind not in KINDS:
        raise SceneSchemaError(f"kind must be one of {KINDS}", "kind", loc.line("kind"))
    if kind == "curve":
        knots = _vector(data["knots"], "knots", loc)
        control = _points(data["control"], "control", loc, (2, 3))
    else:
        knots = _points(data["knots"], "knots", loc, (2,))
        control = _points(data["control"], "control", loc, (3,))
    n = len(knots)
    if len(control) != n:
        raise SceneLengthError(f"{len(control)} control points for {n} knots", "control", loc.line("control"))

    def per_knot(key):
        if data.get(key) is None:
            return None
        v = _vector(data[key], key, loc)
        if v.size != n:
            raise SceneLengthError(f"{v.size} values for {n} knots", key, loc.line(key))
        bad = np.flatnonzero(v <= 0)
        if bad.size:
            p = f"{key}[{bad[0]}]"
            raise SceneValueError(f"{key} must be positive", p, loc.line(p))
        return v

    coeffs = per_knot("coefficients")
    weights = per_knot("weights")
    lifting = None
    if data.get("lifting") is not None:
        lifting = _vector(data["lifting"], "lifting", loc)
        if lifting.size != n:
            raise SceneLengthError(f"{lifting.size} lifting values for {n} knots", "lifting", loc.line("lifting"))

    scale = ScaleParams()
    if data.get("scale") is not None:
        sc = data["scale"]
        if not isinstance(sc, dict) or set(sc) - {"k0", "k1"}:
            raise SceneSchemaError("scale must be an object with k0 and/or k1", "scale", loc.line("scale"))
        k0 = _number(sc.get("k0", 1), "scale.k0", loc)
        k1 = _number(sc.get("k1", 1), "scale.k1", loc)
        if k0 <= 0 or k1 <= 0:
            raise SceneValueError("scale parameters must be positive", "scale", loc.line("scale"))
        if kind == "surface" and (k0, k1) != (1.0, 1.0):
            raise SceneSchemaError("scale applies to curves only", "scale", loc.line("scale"))
        scale = ScaleParams(k0, k1)

    normalization = data.get("normalization", "primitive")
    if normalization not in ("primitive", "unit"):
        raise SceneSchemaError("normalization must be 'primitive' or 'unit'", "normalization",
                               loc.line("normalization"))
    name = data.get("name", "")
    if not isinstance(name, str):
        raise SceneSchemaError("name must be a string", "name", loc.line("name"))

    scene = Scene(kind, knots, control, coeffs, weights, scale, lifting, normalization, name)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            scene.build()
    except PreconditionError as exc:
        raise SceneSchemaError(str(exc), None, None) from None
    except GTBezierError as exc:
        raise SceneDegenerateError(str(exc), "knots", loc.line("knots")) from None
    return scene


def loads_scene(text: str) -> Scene:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneParseError(f"invalid JSON: {exc.msg}", f"column {exc.colno}", exc.lineno) from None
    return scene_from_dict(data, text)


def bundled_scene_path(name: str):
    """Path of a scene shipped with the package (``.scene`` optional), or ``None``."""
    base = Path(name).name
    for cand in (base, base + ".scene"):
        ref = resources.files("gtbezier") / "scenes" / cand
        if ref.is_file():
            return ref
    return None


def bundled_scenes() -> list:
    return sorted(p.name for p in (resources.files("gtbezier") / "scenes").iterdir()
                  if p.name.endswith(".scene"))


def load_scene(path) -> Scene:
    """Read and validate a scene file.

    A missing path whose file name matches a bundled scene loads that scene.
    """
    p = Path(path)
    if not p.exists():
        ref = bundled_scene_path(p.name)
        if ref is None:
            raise FileNotFoundError(f"no such scene file: {path}")
        return loads_scene(ref.read_text(encoding="utf-8"))
    return loads_scene(p.read_text(encoding="utf-8"))


def _fmt(x) -> str:
    return format(float(x), ".17g")


def dumps_scene(scene: Scene) -> str:
    """Serialize with every number at 17 significant digits (round-trips exactly)."""
    def vec(v):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"

    def pts(a):
        return "[\n    " + ",\n    ".join(vec(p) for p in a) + "\n  ]"

    parts = [f'"kind": {json.dumps(scene.kind)}']
    if scene.name:
        parts.append(f'"name": {json.dumps(scene.name)}')
    parts.append('"knots": ' + (vec(scene.knots) if scene.kind == "curve" else pts(scene.knots)))
    if scene.coefficients is not None:
        parts.append('"coefficients": ' + vec(scene.coefficients))
    if scene.weights is not None:
        parts.append('"weights": ' + vec(scene.weights))
    parts.append('"control": ' + pts(scene.control))
    if scene.kind == "curve" and (scene.scale.k0, scene.scale.k1) != (1.0, 1.0):
        parts.append(f'"scale": {{"k0": {_fmt(scene.scale.k0)}, "k1": {_fmt(scene.scale.k1)}}}')
    if scene.lifting is not None:
        parts.append('"lifting": ' + vec(scene.lifting))
    if scene.normalization != "primitive":
        parts.append(f'"normalization": {json.dumps(scene.normalization)}')
    return "{\n  " + ",\n  ".join(parts) + "\n}\n"


def save_scene(scene: Scene, path) -> None:
    Path(path).write_text(dumps_scene(scene), encoding="utf-8")
