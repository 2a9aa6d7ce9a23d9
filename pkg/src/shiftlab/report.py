"""Serialization helpers: 17-digit JSON/CSV, content hashes, SVG step plots and
staged (all-or-nothing) output directories."""

from __future__ import annotations

import hashlib
import math
import os
import shutil
import tempfile
from pathlib import Path

import numpy as np


def _num(x: float) -> str:
    if math.isnan(x):
        return '"NaN"'
    if math.isinf(x):
        return '"Infinity"' if x > 0 else '"-Infinity"'
    return format(x, ".17g")


def dumps(obj, indent: int | None = 1, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits and keys sorted."""
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = "," if indent is None else ","
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps({"re": obj.real, "im": obj.imag}, indent, _level)
    if isinstance(obj, str):
        import json

        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{dumps(str(k), None)}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj, key=str)]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in seq]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_csv(path, header, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(x) for x in row) + "\n")


def _cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def step_svg(breakpoints, values, x_range, title: str = "", width: int = 640, height: int = 240) -> str:
    """Piecewise-constant polyline with breakpoints marked.

    ``values`` has one entry per interval between consecutive x-coordinates of
    ``[x_range[0], *breakpoints, x_range[1]]``.
    """
    xs = np.concatenate(([x_range[0]], np.asarray(breakpoints, float), [x_range[1]]))
    vs = np.asarray(values, float)
    lo, hi = float(vs.min()), float(vs.max())
    if hi == lo:
        lo, hi = lo - 1, hi + 1
    pad = 20

    def px(x):
        return pad + (x - x_range[0]) / (x_range[1] - x_range[0]) * (width - 2 * pad)

    def py(y):
        return height - pad - (y - lo) / (hi - lo) * (height - 2 * pad)

    pts = []
    for i, v in enumerate(vs):
        pts.append(f"{px(xs[i]):.6g},{py(v):.6g}")
        pts.append(f"{px(xs[i + 1]):.6g},{py(v):.6g}")
    marks = "".join(f'<circle cx="{px(b):.6g}" cy="{py(0.0 if lo <= 0 <= hi else lo):.6g}" r="1.5"/>' for b in xs[1:-1])
    zero = f'<line x1="{pad}" x2="{width - pad}" y1="{py(0.0):.6g}" y2="{py(0.0):.6g}" stroke="#bbb"/>' if lo <= 0 <= hi else ""
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        f"<title>{title}</title>"
        f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#444"/>'
        f"{zero}"
        f'<polyline fill="none" stroke="#1f4e99" points="{" ".join(pts)}"/>'
        f'<g fill="#c33">{marks}</g>'
        "</svg>\n"
    )


class StagedOutput:
    """Collect files in a hidden sibling directory and move them into place only
    when the block exits cleanly; on error nothing reaches ``out``."""

    def __init__(self, out):
        self.out = Path(out)
        self.staging: Path | None = None
        self.files: list[str] = []

    def __enter__(self) -> "StagedOutput":
        self.out.mkdir(parents=True, exist_ok=True)
        self.staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.out))
        return self

    def path(self, name: str) -> Path:
        if name not in self.files:
            self.files.append(name)
        return self.staging / name

    def __exit__(self, exc_type, exc, tb):
        try:
            if exc_type is None:
                for name in self.files:
                    os.replace(self.staging / name, self.out / name)
        finally:
            shutil.rmtree(self.staging, ignore_errors=True)
        return False
