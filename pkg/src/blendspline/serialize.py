"""CSV data files and JSON model files.

Data CSV: header ``t,c0,...,c{k-1}``, one row per point, strictly increasing
``t``. Model JSON (``format_version`` 1) stores the anchors and, per unit
interval, the Bezier control vectors of the left and right tangent-space
pieces. Every real is written with 17 significant digits so that loading a
saved model reproduces evaluations bit for bit.
"""

from __future__ import annotations

import csv
import io
import json
import math
import re

import numpy as np

from .blend import AnchorSet, BlendedSpline, IntervalPieces
from .errors import InvalidInputError
from .manifold import Point, make_manifold
from .spline1d import CubicSegment, KnotGrid

FORMAT_VERSION = 1
_MARK = re.compile(r'"@@([^"@]*)@@"')


def format_real(x: float) -> str:
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.16e}"


def parse_lambda(text) -> float:
    if isinstance(text, str) and text.strip().lower() in ("inf", "infinity", "+inf"):
        return math.inf
    try:
        lam = float(text)
    except (TypeError, ValueError):
        raise InvalidInputError(f"lambda must be a positive number or 'inf', got {text!r}") from None
    if not lam > 0.0:
        raise InvalidInputError(f"lambda must be positive, got {text!r}")
    return lam


# -- CSV --------------------------------------------------------------------

def read_data_csv(path, manifold):
    """Read ``(times, points)`` from a data file, validating manifold membership."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise InvalidInputError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    k = manifold.ambient_dim
    expected = ["t"] + [f"c{j}" for j in range(k)]
    if header != expected:
        raise InvalidInputError(f"{path}: header must be {','.join(expected)}, got {','.join(header)}")
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    if len(body) < 2:
        raise InvalidInputError(f"{path}: need at least two data rows")
    try:
        table = np.array([[float(c) for c in r] for r in body])
    except ValueError as exc:
        raise InvalidInputError(f"{path}: {exc}") from exc
    if table.shape[1] != k + 1:
        raise InvalidInputError(f"{path}: rows must have {k + 1} columns")
    times = table[:, 0]
    if np.any(np.diff(times) <= 0.0):
        raise InvalidInputError(f"{path}: times must be strictly increasing")
    points = []
    for row, coords in enumerate(table[:, 1:], start=2):
        try:
            points.append(manifold.point(coords))
        except InvalidInputError as exc:
            raise InvalidInputError(f"{path}, line {row}: {exc}") from exc
    return times, points


def write_curve_csv(path, header, rows):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        buf.write(",".join(f"{float(x):.17g}" for x in row) + "\n")
    with open(path, "w", newline="") as fh:
        fh.write(buf.getvalue())


def write_data_csv(path, times, coords):
    coords = np.asarray(coords, dtype=float)
    header = ["t"] + [f"c{j}" for j in range(coords.shape[1])]
    write_curve_csv(path, header, np.column_stack([times, coords]))


# -- model JSON -------------------------------------------------------------

def _reals(values):
    return [f"@@{format_real(v)}@@" for v in np.asarray(values, dtype=float).reshape(-1)]


def _pieces_to_json(pieces):
    return [
        {"breakpoints": _reals(p.breakpoints), "control": [_reals(row) for row in p.control]}
        for p in pieces
    ]


def model_to_dict(spline: BlendedSpline) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "manifold": spline.manifold.descriptor.to_dict(),
        "n": spline.n,
        "lambda": f"@@{format_real(spline.lam)}@@" if math.isfinite(spline.lam) else "inf",
        "times": _reals(spline.times),
        "anchors": {
            "indices": list(spline.anchors.indices),
            "points": [_reals(p.coords) for p in spline.anchors.points],
        },
        "intervals": [
            {"i": iv.i, "left_pieces": _pieces_to_json(iv.left), "right_pieces": _pieces_to_json(iv.right)}
            for iv in spline.intervals
        ],
    }


def dumps_model(spline: BlendedSpline) -> str:
    text = json.dumps(model_to_dict(spline), indent=1)
    return _MARK.sub(r"\1", text) + "\n"


def save_model(spline: BlendedSpline, path):
    with open(path, "w", newline="") as fh:
        fh.write(dumps_model(spline))


def _pieces_from_json(raw, dim, where):
    if not isinstance(raw, list) or not raw:
        raise InvalidInputError(f"{where}: expected a non-empty list of pieces")
    out = []
    for p in raw:
        bp = [float(x) for x in p["breakpoints"]]
        control = np.array(p["control"], dtype=float)
        if len(bp) != 2 or not bp[0] < bp[1] or control.shape != (4, dim):
            raise InvalidInputError(f"{where}: malformed piece")
        control.flags.writeable = False
        out.append(CubicSegment((bp[0], bp[1]), control))
    return tuple(out)


def loads_model(text: str) -> BlendedSpline:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"model is not valid JSON: {exc}") from exc
    try:
        if raw.get("format_version") != FORMAT_VERSION:
            raise InvalidInputError(f"unsupported format_version {raw.get('format_version')!r}")
        M = make_manifold(raw["manifold"]["kind"], int(raw["manifold"]["ambient_dim"]))
        n = int(raw["n"])
        lam = parse_lambda(raw["lambda"])
        times = KnotGrid(np.array(raw["times"], dtype=float)).times
        indices = tuple(int(k) for k in raw["anchors"]["indices"])
        points = tuple(M.point(p) for p in raw["anchors"]["points"])
        if len(indices) != n + 1 or len(points) != n + 1:
            raise InvalidInputError(f"model must have {n + 1} anchors")
        if len(raw["intervals"]) != n:
            raise InvalidInputError(f"model must have {n} intervals")
        intervals = []
        for i, iv in enumerate(raw["intervals"]):
            if int(iv["i"]) != i:
                raise InvalidInputError(f"interval {i} is out of order")
            left = _pieces_from_json(iv["left_pieces"], M.ambient_dim, f"interval {i} left")
            right = _pieces_from_json(iv["right_pieces"], M.ambient_dim, f"interval {i} right")
            for pieces in (left, right):
                if pieces[0].breakpoints[0] != i or pieces[-1].breakpoints[1] != i + 1:
                    raise InvalidInputError(f"interval {i}: pieces do not cover [{i}, {i + 1}]")
            intervals.append(IntervalPieces(i, left, right))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        if isinstance(exc, InvalidInputError):
            raise
        raise InvalidInputError(f"malformed model: {exc!r}") from exc
    return BlendedSpline(M, n, lam, times, AnchorSet(indices, points), tuple(intervals))


def load_model(path) -> BlendedSpline:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc}") from exc
    return loads_model(text)


def count_control_vectors(model: dict) -> int:
    """Number of tangent control vectors stored in a model dict (as parsed JSON)."""
    return sum(
        len(p["control"]) for iv in model["intervals"] for side in ("left_pieces", "right_pieces")
        for p in iv[side]
    )
