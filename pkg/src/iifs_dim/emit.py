"""CSV and SVG writers with byte-deterministic output."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from .cover import BoxCountSeries
from .errors import UsageError
from .formulas import DimCurve

__all__ = ["Series", "PlotSpec", "emit_csv", "emit_table", "read_csv", "emit_svg", "render_svg"]

WIDTH, HEIGHT = 800, 600
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 180, 30, 60
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def emit_table(header: Sequence[str], columns: Sequence[Sequence], path=None) -> str:
    """Write columns as CSV; returns the text and writes it when ``path`` is given."""
    n = {len(c) for c in columns}
    if len(n) > 1:
        raise UsageError("CSV columns have different lengths")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([_fmt(v) for v in row])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def emit_csv(obj, path=None) -> str:
    """``theta,lower,upper`` for a curve or ``delta,count`` for a box series."""
    if isinstance(obj, DimCurve):
        return emit_table(("theta", "lower", "upper"), (obj.theta, obj.lower, obj.upper), path)
    if isinstance(obj, BoxCountSeries):
        return emit_table(("delta", "count"), (obj.deltas, obj.counts), path)
    raise UsageError(f"cannot write {type(obj).__name__} as CSV")


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and float matrix of a CSV written by :func:`emit_table`."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise UsageError(f"{path} is empty")
    try:
        data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=np.float64)
    except ValueError as exc:
        raise UsageError(f"{path} has non-numeric values: {exc}") from exc
    return rows[0], data.reshape(len(rows) - 1, len(rows[0]))


@dataclass(frozen=True)
class Series:
    label: str
    x: tuple
    y: tuple
    style: str = "solid"

    def __post_init__(self):
        x = tuple(float(v) for v in self.x)
        y = tuple(float(v) for v in self.y)
        if len(x) != len(y) or not x:
            raise UsageError(f"series {self.label!r} needs matching, non-empty x and y")
        if not all(math.isfinite(v) for v in x + y):
            raise UsageError(f"series {self.label!r} has non-finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)


@dataclass(frozen=True)
class PlotSpec:
    series: tuple
    x_label: str = "theta"
    y_label: str = "dimension"
    x_range: tuple | None = None
    y_range: tuple | None = None
    title: str = ""
    output_path: str | None = None

    def __post_init__(self):
        if not self.series:
            raise UsageError("a plot needs at least one series")
        object.__setattr__(self, "series", tuple(self.series))


def _range(values, given) -> tuple[float, float]:
    if given is not None:
        lo, hi = float(given[0]), float(given[1])
    else:
        lo, hi = min(values), max(values)
    if hi - lo < 1e-12:
        pad = max(abs(lo) * 0.05, 0.5)
        lo, hi = lo - pad, hi + pad
    return lo, hi


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step - 1e-9) * step
    out = []
    k = 0
    while start + k * step <= hi + 1e-9 * step:
        out.append(start + k * step)
        k += 1
    return out


def _tick_label(v: float) -> str:
    return f"{v:.6g}" if abs(v) > 1e-12 else "0"


def render_svg(spec: PlotSpec) -> str:
    """SVG document for ``spec`` on a fixed 800 by 600 canvas."""
    xs = [v for s in spec.series for v in s.x]
    ys = [v for s in spec.series for v in s.y]
    x0, x1 = _range(xs, spec.x_range)
    y0, y1 = _range(ys, spec.y_range)
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return MARGIN_T + ph - (v - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
    ]
    if spec.title:
        out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="20" text-anchor="middle" font-size="14">{escape(spec.title)}</text>')
    out.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>'
    )
    for t in _ticks(x0, x1):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{MARGIN_T + ph}" x2="{px:.2f}" y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px:.2f}" y="{MARGIN_T + ph + 20}" text-anchor="middle" font-size="12">{_tick_label(t)}</text>')
    for t in _ticks(y0, y1):
        py = sy(t)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{py:.2f}" x2="{MARGIN_L}" y2="{py:.2f}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{py + 4:.2f}" text-anchor="end" font-size="12">{_tick_label(t)}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2:.2f}" y="{HEIGHT - 15}" text-anchor="middle" font-size="13">{escape(spec.x_label)}</text>')
    out.append(
        f'<text x="18" y="{MARGIN_T + ph / 2:.2f}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {MARGIN_T + ph / 2:.2f})">{escape(spec.y_label)}</text>'
    )
    for k, s in enumerate(spec.series):
        color = PALETTE[k % len(PALETTE)]
        dash = ' stroke-dasharray="6 4"' if s.style == "dashed" else ""
        pts = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in zip(s.x, s.y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2"{dash} points="{pts}"/>')
        ly = MARGIN_T + 15 + 20 * k
        lx = WIDTH - MARGIN_R + 15
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 25}" y2="{ly}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 32}" y="{ly + 4}" font-size="12">{escape(s.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(spec: PlotSpec, path=None) -> str:
    """Render ``spec`` and write it to ``path`` (or ``spec.output_path``)."""
    text = render_svg(spec)
    target = path if path is not None else spec.output_path
    if target is not None:
        Path(target).write_text(text)
    return text
