"""JSON and CSV serialization.

Function definition format (also the CLI input):

    {
      "functions": {
        "f": {
          "domain": [lo, hi],              // "-inf"/"inf" allowed
          "pieces": [
            {"on": [a, b], "lower": "<expr>", "upper": "<expr>",   // upper optional
             "envelopes": {"left": {"liminf": ..., "limsup": ...},
                           "right": {...}}}                        // optional
          ],
          "points": [{"x": ..., "value": [lo, hi]}]
        }
      }
    }

Scalars serialize as integers where possible and as exact strings
otherwise in rational mode ("0.25" or "1/3"), and as plain numbers in
float mode.  Grid functions serialize to CSV with the fixed header
``x,lo,hi``.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from typing import Dict, List, Optional, TextIO

from . import expr as ex
from . import piecewise as pw
from .baire import GridFunction
from .errors import EngineError
from .interval import Interval
from .piecewise import Domain, HFunction
from .scalars import Scalar, format_scalar, to_scalar


def scalar_to_json(value: Scalar):
    if isinstance(value, Fraction):
        if value.denominator == 1:
            return int(value)
        return format_scalar(value)
    return float(value)


def scalar_from_json(data) -> Scalar:
    if isinstance(data, bool):
        raise EngineError("booleans are not scalars")
    if isinstance(data, (int, float, str)):
        return to_scalar(data)
    raise EngineError(f"cannot read scalar from {data!r}")


def _end_from_json(data, which: str) -> Optional[Scalar]:
    if isinstance(data, str) and data.strip() in ("-inf", "inf", "+inf"):
        text = data.strip()
        if which == "lo" and text == "-inf":
            return None
        if which == "hi" and text in ("inf", "+inf"):
            return None
        raise EngineError(f"{text!r} is not a valid {which} domain end")
    return scalar_from_json(data)


def _end_to_json(value: Optional[Scalar], which: str):
    if value is None:
        return "-inf" if which == "lo" else "inf"
    return scalar_to_json(value)


def interval_to_json(a: Interval):
    if a.is_point:
        return scalar_to_json(a.lo)
    return [scalar_to_json(a.lo), scalar_to_json(a.hi)]


def interval_from_json(data) -> Interval:
    if isinstance(data, (list, tuple)):
        if len(data) != 2:
            raise EngineError(f"interval needs two entries, got {data!r}")
        return Interval.of(scalar_from_json(data[0]), scalar_from_json(data[1]))
    return Interval.point(scalar_from_json(data))


def _envelope_pair_from_json(data):
    if data is None:
        return None
    return (scalar_from_json(data["liminf"]), scalar_from_json(data["limsup"]))


def hfunction_from_json(data: dict) -> HFunction:
    domain = Domain(
        _end_from_json(data["domain"][0], "lo"),
        _end_from_json(data["domain"][1], "hi"),
    )
    points = []
    for entry in data.get("points", ()):
        points.append((scalar_from_json(entry["x"]), interval_from_json(entry["value"])))
    points.sort(key=lambda t: t[0])
    piece_specs = []
    for entry in data.get("pieces", ()):
        on = entry["on"]
        lo = _end_from_json(on[0], "lo")
        hi = _end_from_json(on[1], "hi")
        lower = ex.parse(entry["lower"])
        upper = ex.parse(entry["upper"]) if "upper" in entry else None
        envelopes = entry.get("envelopes", {})
        piece_specs.append(
            (
                lo,
                hi,
                pw.make_piece(
                    lo,
                    hi,
                    lower,
                    upper,
                    declared_left=_envelope_pair_from_json(envelopes.get("left")),
                    declared_right=_envelope_pair_from_json(envelopes.get("right")),
                ),
            )
        )
    piece_specs.sort(key=lambda t: (t[0] is not None, t[0]))
    return pw.hfunction(domain, points, [p for _, _, p in piece_specs])


def _envelope_to_json(env: Optional[pw.EndEnvelope]):
    if env is None:
        return None
    return {
        "liminf": scalar_to_json(env.liminf),
        "limsup": scalar_to_json(env.limsup),
        "provenance": env.provenance,
    }


def hfunction_to_json(f: HFunction) -> dict:
    pieces = []
    for piece in f.pieces:
        entry = {
            "on": [_end_to_json(piece.lo, "lo"), _end_to_json(piece.hi, "hi")],
            "lower": ex.to_text(piece.lower),
        }
        if not piece.is_real:
            entry["upper"] = ex.to_text(piece.upper)
        envelopes = {}
        left = _envelope_to_json(piece.lower_left)
        right = _envelope_to_json(piece.lower_right)
        if left is not None:
            envelopes["left"] = left
        if right is not None:
            envelopes["right"] = right
        if envelopes:
            entry["envelopes"] = envelopes
        pieces.append(entry)
    return {
        "domain": [_end_to_json(f.domain.lo, "lo"), _end_to_json(f.domain.hi, "hi")],
        "pieces": pieces,
        "points": [
            {"x": scalar_to_json(p.x), "value": interval_to_json(p.value)}
            for p in f.points
        ],
    }


def load_defs(path: str) -> Dict[str, HFunction]:
    """Read a definitions file.

    Normally a {"functions": {...}} map; a bare function object (as written
    by the CLI ``op`` command) is accepted too and bound to the name
    "result", so operation outputs can be fed straight back in.
    """
    with open(path, "r", encoding="utf-8") as fp:
        data = json.load(fp)
    if not isinstance(data, dict):
        raise EngineError("definition files must hold a JSON object")
    if "functions" in data:
        return {
            name: hfunction_from_json(body)
            for name, body in data["functions"].items()
        }
    if "domain" in data and "pieces" in data:
        return {"result": hfunction_from_json(data)}
    raise EngineError("definition files need a top-level 'functions' map")


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def grid_to_csv(grid: GridFunction, fp: TextIO) -> None:
    writer = csv.writer(fp)
    writer.writerow(["x", "lo", "hi"])
    for i, value in enumerate(grid.values):
        writer.writerow(
            [format_scalar(grid.x(i)), format_scalar(value.lo), format_scalar(value.hi)]
        )


def grid_from_csv(fp: TextIO) -> GridFunction:
    reader = csv.reader(fp)
    header = next(reader)
    if header != ["x", "lo", "hi"]:
        raise EngineError("grid CSV must start with the header x,lo,hi")
    xs: List[Scalar] = []
    values: List[Interval] = []
    for row in reader:
        xs.append(to_scalar(row[0]))
        values.append(Interval.of(row[1], row[2]))
    if len(xs) < 1:
        raise EngineError("empty grid CSV")
    h = xs[1] - xs[0] if len(xs) > 1 else to_scalar(1)
    return GridFunction(xs[0], h, tuple(values))
