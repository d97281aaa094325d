"""Deterministic JSON/CSV/SVG writers.

Floats go out with 17 significant digits so a report round-trips exactly and
two runs of the same configuration produce identical bytes.
"""
from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = "1.0"


def fmt(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return "%.17g" % x


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}{_string(str(k))}: {_encode(v, indent, level + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)
               for v in obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, np.ndarray):
        return _encode(obj.tolist(), indent, level)
    return _scalar(obj)


def _scalar(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return _string(str(v))


def _string(s: str) -> str:
    import json

    return json.dumps(s)


def dumps(obj, indent: int = 2) -> str:
    """JSON text with keys in insertion order and %.17g floats."""
    return _encode(obj, indent, 0) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(dumps(obj), encoding="utf-8")
    return path


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path


def pairs_rows(records):
    for r in records:
        yield (r.x[0], r.x[1], r.y[0], r.y[1], r.integral, r.ratio, r.case)


def write_pairs(path, records) -> Path:
    return write_csv(path, ["x1", "y1", "x2", "y2", "integral", "ratio", "case"], pairs_rows(records))


def write_boxcounts(path, estimate) -> Path:
    d = estimate.diagnostics
    return write_csv(path, ["scale", "count"], zip(d["scales"], d["counts"]))


def write_nets(path, estimate) -> Path:
    rows = estimate.diagnostics.get("table", [])
    return write_csv(path, ["i", "k", "j_witness", "N_j"], rows)


def write_polyline(path, vertices) -> Path:
    return write_csv(path, ["x", "y"], ((float(x), float(y)) for x, y in vertices))


# --- SVG ----------------------------------------------------------------------

CANVAS = 1024
VIEW = 1.1


def _to_px(x: float, y: float) -> tuple[str, str]:
    s = CANVAS / (2 * VIEW)
    return "%.3f" % ((x + VIEW) * s), "%.3f" % ((VIEW - y) * s)


def _path(vertices) -> str:
    pts = [_to_px(x, y) for x, y in vertices]
    return "M " + " L ".join(f"{a} {b}" for a, b in pts)


def render_svg(polylines, points=()) -> str:
    """Square, tent and optional point overlay on a 1024 px canvas over [-1.1, 1.1]^2.

    ``points`` is a sequence of (x, y, flag); flagged points are drawn filled.
    """
    square, upper, lower = polylines
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" '
           f'viewBox="0 0 {CANVAS} {CANVAS}">',
           f'<rect width="{CANVAS}" height="{CANVAS}" fill="white"/>',
           f'<path d="{_path(square)} Z" fill="#dde8f4" stroke="black" stroke-width="1.5"/>']
    # removed tent region: close upper and mirrored lower outlines
    tent = np.vstack([upper, lower[::-1]])
    out.append(f'<path d="{_path(tent)} Z" fill="white" stroke="black" stroke-width="0.5"/>')
    for x, y, flag in points:
        px, py = _to_px(x, y)
        fill = "#c0392b" if flag else "none"
        out.append(f'<circle cx="{px}" cy="{py}" r="3" fill="{fill}" stroke="#c0392b"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, polylines, points=()) -> Path:
    path = Path(path)
    path.write_text(render_svg(polylines, points), encoding="utf-8")
    return path
