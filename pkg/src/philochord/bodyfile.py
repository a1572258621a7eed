"""JSON body description files.

Schema (version 1).  Every document is an object with ``"schema": 1`` and a
``"kind"`` selecting one of::

    {"kind": "angle",    "vertex": [x, y], "arm1": [u, v], "arm2": [u, v], "theta": t?}
    {"kind": "strip",    "line1": {"base": [..], "dir": [..]}, "line2": {...}}
    {"kind": "polygon",  "vertices": [[x, y], ...]}            # counter-clockwise
    {"kind": "ellipse",  "center": [x, y], "a": a, "b": b, "rotation": r?}
    {"kind": "polytope", "halfspaces": [{"normal": [..], "offset": o}, ...]}
    {"kind": "simplex",  "vertices": [[..], ...]}               # n + 1 points in R^n
    {"kind": "ball",     "center": [..], "radius": r}

``"schema"`` may be omitted on input; it is always written on output.
"""
from __future__ import annotations

import json
from pathlib import Path

from .bodies import Angle2D, Ball, Body, Ellipse2D, Polygon2D, PolytopeH, SimplexV, Strip2D
from .geometry import Line

SCHEMA_VERSION = 1


class BodyFileError(ValueError):
    pass


def _line(obj) -> Line:
    return Line(obj["base"], obj["dir"])


def body_from_dict(doc: dict) -> Body:
    if not isinstance(doc, dict):
        raise BodyFileError("body description must be a JSON object")
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise BodyFileError(f"unsupported schema version {schema!r}")
    kind = doc.get("kind")
    try:
        if kind == "angle":
            return Angle2D(doc["vertex"], doc["arm1"], doc["arm2"], doc.get("theta"))
        if kind == "strip":
            return Strip2D(_line(doc["line1"]), _line(doc["line2"]))
        if kind == "polygon":
            return Polygon2D(doc["vertices"])
        if kind == "ellipse":
            return Ellipse2D(doc["center"], doc["a"], doc["b"], doc.get("rotation", 0.0))
        if kind == "polytope":
            hs = doc["halfspaces"]
            return PolytopeH([h["normal"] for h in hs], [h["offset"] for h in hs])
        if kind == "simplex":
            return SimplexV(doc["vertices"])
        if kind == "ball":
            return Ball(doc["center"], doc["radius"])
    except (KeyError, TypeError) as exc:
        raise BodyFileError(f"malformed {kind} description: {exc}") from exc
    except ValueError as exc:
        raise BodyFileError(str(exc)) from exc
    raise BodyFileError(f"unknown body kind {kind!r}")


def body_to_dict(body: Body) -> dict:
    return {"schema": SCHEMA_VERSION, **body.to_dict()}


def load_body(path) -> Body:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BodyFileError(f"invalid JSON: {exc}") from exc
    return body_from_dict(doc)


def dump_body(body: Body, path) -> None:
    Path(path).write_text(json.dumps(body_to_dict(body), indent=2) + "\n", encoding="utf-8")
