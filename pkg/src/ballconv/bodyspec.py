"""Body specification documents: JSON text that parses to exactly one convex body.

Example documents::

    {"kind": "ball", "dim": 2, "center": [0, 0], "radius": 1}
    {"kind": "ellipsoid", "dim": 2, "axes": [2, 1]}
    {"kind": "support_curve", "dim": 2, "c0": 1, "cos": [0, 0, 0.1]}
    {"kind": "pnorm2d", "dim": 2, "r": 1.5}
    {"kind": "arc_body", "dim": 2, "disks": {"centers": [[-0.5, 0], [0.5, 0]], "radii": [1, 1]}}
    {"kind": "arc_body", "dim": 2, "arcs": [{"center": [0, 0], "radius": 1, "start": 0, "end": 6.283185307179586}]}
"""
from __future__ import annotations

import hashlib
import json
from typing import Any

from .bodies import Arc, ArcBody2D, Ball, ConvexBody, Ellipsoid, PNormBall2D, SupportCurve2D
from .errors import ParameterError

_FIELDS = {
    "ball": ({"center", "radius"}, set()),
    "ellipsoid": ({"axes"}, {"center"}),
    "support_curve": ({"c0"}, {"cos", "sin"}),
    "pnorm2d": ({"r"}, {"scale", "axis_cutoff"}),
    "arc_body": (set(), {"arcs", "disks"}),
}


def _floats(v, name, length=None) -> list:
    if not isinstance(v, (list, tuple)) or not all(isinstance(x, (int, float)) and not isinstance(x, bool)
                                                   for x in v):
        raise ParameterError(f"field '{name}' must be a list of numbers")
    if length is not None and len(v) != length:
        raise ParameterError(f"field '{name}' must have {length} entries")
    return [float(x) for x in v]


def _number(v, name) -> float:
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ParameterError(f"field '{name}' must be a number")
    return float(v)


def _keys(d: dict, allowed: set, where: str) -> None:
    extra = set(d) - allowed
    if extra:
        raise ParameterError(f"unknown field(s) in {where}: {', '.join(sorted(extra))}")


def normalize(doc: Any) -> dict:
    """Validate a decoded document and return it with floats and defaults filled in.

    Raises
    ------
    ParameterError
        On unknown kinds or fields, missing fields or wrong types.
    """
    if not isinstance(doc, dict):
        raise ParameterError("body spec must be a JSON object")
    kind = doc.get("kind")
    if kind not in _FIELDS:
        raise ParameterError(f"unknown body kind {kind!r}; expected one of {', '.join(_FIELDS)}")
    required, optional = _FIELDS[kind]
    _keys(doc, required | optional | {"kind", "dim"}, f"'{kind}' spec")
    missing = required - set(doc)
    if missing:
        raise ParameterError(f"missing field(s) for '{kind}': {', '.join(sorted(missing))}")
    out: dict = {"kind": kind}
    if kind == "ball":
        out["center"] = _floats(doc["center"], "center")
        out["radius"] = _number(doc["radius"], "radius")
        dim = len(out["center"])
    elif kind == "ellipsoid":
        out["axes"] = _floats(doc["axes"], "axes")
        dim = len(out["axes"])
        out["center"] = _floats(doc.get("center", [0.0] * dim), "center", dim)
    elif kind == "support_curve":
        out["c0"] = _number(doc["c0"], "c0")
        out["cos"] = _floats(doc.get("cos", []), "cos")
        out["sin"] = _floats(doc.get("sin", []), "sin")
        dim = 2
    elif kind == "pnorm2d":
        out["r"] = _number(doc["r"], "r")
        out["scale"] = _number(doc.get("scale", 1.0), "scale")
        out["axis_cutoff"] = _number(doc.get("axis_cutoff", 1e-8), "axis_cutoff")
        dim = 2
    else:
        if ("arcs" in doc) == ("disks" in doc):
            raise ParameterError("arc_body needs exactly one of 'arcs' or 'disks'")
        if "disks" in doc:
            disks = doc["disks"]
            if not isinstance(disks, dict):
                raise ParameterError("field 'disks' must be an object")
            _keys(disks, {"centers", "radii"}, "'disks'")
            if "centers" not in disks or "radii" not in disks:
                raise ParameterError("'disks' needs 'centers' and 'radii'")
            out["disks"] = {"centers": [_floats(c, "disks.centers", 2) for c in disks["centers"]],
                            "radii": _floats(disks["radii"], "disks.radii")}
        else:
            arcs = doc["arcs"]
            if not isinstance(arcs, list):
                raise ParameterError("field 'arcs' must be a list")
            norm = []
            for a in arcs:
                if not isinstance(a, dict):
                    raise ParameterError("each arc must be an object")
                _keys(a, {"center", "radius", "start", "end"}, "arc")
                if set(a) != {"center", "radius", "start", "end"}:
                    raise ParameterError("each arc needs center, radius, start and end")
                norm.append({"center": _floats(a["center"], "arc.center", 2),
                             "radius": _number(a["radius"], "arc.radius"),
                             "start": _number(a["start"], "arc.start"),
                             "end": _number(a["end"], "arc.end")})
            out["arcs"] = norm
        dim = 2
    if "dim" in doc:
        if doc["dim"] != dim or isinstance(doc["dim"], bool):
            raise ParameterError(f"field 'dim' = {doc['dim']!r} does not match the parameters (dim {dim})")
    out["dim"] = dim
    return out


def parse(text: str) -> dict:
    """Decode and normalise a JSON body spec."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"body spec is not valid JSON: {exc}") from None
    return normalize(doc)


def dumps(spec: dict) -> str:
    """Canonical JSON text of a normalised spec."""
    return json.dumps(normalize(spec), sort_keys=True, separators=(",", ":"))


def digest(spec: dict) -> str:
    return hashlib.sha256(dumps(spec).encode()).hexdigest()[:16]


def build(spec: dict) -> ConvexBody:
    """Construct the body described by a spec."""
    s = normalize(spec)
    kind = s["kind"]
    if kind == "ball":
        return Ball(tuple(s["center"]), s["radius"])
    if kind == "ellipsoid":
        return Ellipsoid(tuple(s["axes"]), tuple(s["center"]))
    if kind == "support_curve":
        return SupportCurve2D(s["c0"], tuple(s["cos"]), tuple(s["sin"]))
    if kind == "pnorm2d":
        return PNormBall2D(s["r"], s["scale"], s["axis_cutoff"])
    if "disks" in s:
        return ArcBody2D.from_disks(s["disks"]["centers"], s["disks"]["radii"])
    return ArcBody2D(tuple(Arc(tuple(a["center"]), a["radius"], a["start"], a["end"]) for a in s["arcs"]))


def load(path: str) -> tuple[dict, ConvexBody]:
    """Read a spec file and build its body."""
    with open(path, encoding="utf-8") as fh:
        spec = parse(fh.read())
    return spec, build(spec)


def from_body(body: ConvexBody) -> dict:
    """Spec document reproducing ``body``; arc bodies are written as explicit arcs."""
    if isinstance(body, Ball):
        doc = {"kind": "ball", "center": list(body.center), "radius": body.radius}
    elif isinstance(body, Ellipsoid):
        doc = {"kind": "ellipsoid", "axes": list(body.axes), "center": list(body.center)}
    elif isinstance(body, SupportCurve2D):
        doc = {"kind": "support_curve", "c0": body.c0, "cos": list(body.cos), "sin": list(body.sin)}
    elif isinstance(body, PNormBall2D):
        doc = {"kind": "pnorm2d", "r": body.r, "scale": body.scale, "axis_cutoff": body.axis_cutoff}
    elif isinstance(body, ArcBody2D):
        doc = {"kind": "arc_body", "arcs": [{"center": list(a.center), "radius": a.radius,
                                             "start": a.start, "end": a.end} for a in body.arcs]}
    else:
        raise ParameterError(f"no spec form for {type(body).__name__}")
    return normalize(doc)
