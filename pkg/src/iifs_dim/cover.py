"""Box counting, slope brackets and a two-scale cover cost model.

Cells are half-open ``[k delta, (k+1) delta)`` anchored at the origin.  A
coordinate equal to the enclosing box edge ``upper`` (1 by default) goes
into the last cell below that edge, so ``x = 1`` is counted with
``[1 - delta, 1)`` when ``1/delta`` is an integer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, GuardError, SearchExhaustedError, UsageError
from .pressure import DimBracket

__all__ = [
    "SequenceSet",
    "LatticeInversion",
    "BoxCountSeries",
    "CoverCost",
    "box_count",
    "box_count_series",
    "box_dim_regression",
    "least_squares_slope",
    "lattice_cover_cost",
    "fit_dim_theta",
    "cost_constant",
    "DEFAULT_LOG10_DELTAS",
]

MAX_ENUMERATED = 20_000_000


@dataclass(frozen=True)
class SequenceSet:
    """``{n^-p : n >= 1} ∪ {0}``."""

    p: float = 1.0


@dataclass(frozen=True)
class LatticeInversion:
    """``{x / |x|^2 : x in {n^p : n >= 1}^d}``; for ``d = 1`` the sequence set."""

    p: float
    d: int = 1


@dataclass(frozen=True, eq=False)
class BoxCountSeries:
    deltas: np.ndarray
    counts: np.ndarray
    convention: str = "origin-anchored half-open cells"

    def __post_init__(self):
        d = np.asarray(self.deltas, dtype=np.float64)
        c = np.asarray(self.counts, dtype=np.int64)
        order = np.argsort(-d)
        object.__setattr__(self, "deltas", d[order])
        object.__setattr__(self, "counts", c[order])

    def rows(self) -> list[tuple[float, int]]:
        return [(float(a), int(b)) for a, b in zip(self.deltas, self.counts)]


def _cell_indices(x: np.ndarray, delta: float, upper: float) -> np.ndarray:
    idx = np.floor(x / delta).astype(np.int64)
    last = int(math.ceil(upper / delta)) - 1
    idx[(x == upper) & (idx > last)] = last
    return idx


def _count_points(points, delta: float, upper: float) -> int:
    pts = np.asarray(points, dtype=np.float64)
    if pts.size == 0:
        raise UsageError("cannot box-count an empty set")
    if pts.ndim == 1:
        pts = pts[:, None]
    idx = _cell_indices(pts, delta, upper)
    return int(len(np.unique(idx, axis=0)))


def _count_sequence(p: float, delta: float) -> int:
    # enumerate n^-p while consecutive gaps are at least delta; below that
    # every cell from 0 up to the last enumerated point is hit
    cells = set()
    n = 1
    while True:
        x = n ** (-p)
        gap = x - (n + 1) ** (-p)
        if gap < delta:
            last = int(_cell_indices(np.array([x]), delta, 1.0)[0])
            return len(cells | set(range(last + 1)))
        cells.add(int(_cell_indices(np.array([x]), delta, 1.0)[0]))
        n += 1


def _count_lattice(p: float, d: int, delta: float) -> int:
    # beyond n_max every image has norm below delta and lands in cell 0,
    # which the corner point (n_max, ..., n_max) already occupies
    n_max = int(math.ceil(delta ** (-1.0 / p))) + 1
    if n_max**d > MAX_ENUMERATED:
        raise GuardError(f"enumerating {n_max}^{d} lattice points is too many; use a coarser delta")
    axis = np.arange(1, n_max + 1, dtype=np.float64) ** p
    grids = np.meshgrid(*([axis] * d), indexing="ij")
    x = np.stack([g.ravel() for g in grids], axis=1)
    img = x / np.sum(x * x, axis=1, keepdims=True)
    return _count_points(img, delta, 1.0)


def box_count(obj, delta: float, upper: float = 1.0) -> int:
    """Number of delta-cells meeting a point cloud or an analytic set."""
    if not 0 < delta < 1:
        raise DomainError(f"delta must lie in (0, 1), got {delta}")
    if isinstance(obj, SequenceSet):
        return _count_sequence(obj.p, delta)
    if isinstance(obj, LatticeInversion):
        if obj.d == 1:
            return _count_sequence(obj.p, delta)
        return _count_lattice(obj.p, obj.d, delta)
    return _count_points(obj, delta, upper)


def box_count_series(obj, deltas: Iterable[float], upper: float = 1.0) -> BoxCountSeries:
    ds = [float(x) for x in deltas]
    return BoxCountSeries(np.array(ds), np.array([box_count(obj, x, upper) for x in ds]))


def _check_series(series: BoxCountSeries) -> None:
    if len(series.deltas) < 4:
        raise GuardError("need at least 4 scales for a slope bracket")
    span = math.log10(series.deltas.max() / series.deltas.min())
    if span < 2 - 1e-9:
        raise GuardError(f"scales span {span:.2f} decades, need at least 2")


def box_dim_regression(series: BoxCountSeries) -> DimBracket:
    """Slope bracket from chords ``log N`` vs ``-log delta``.

    The bracket is the min and max over all pairwise chords among the
    finest half of the scales; its midpoint is the point estimate.
    """
    _check_series(series)
    return _chord_bracket(series.deltas, series.counts)


def _chord_bracket(deltas: np.ndarray, counts: np.ndarray) -> DimBracket:
    k = len(deltas)
    deep = slice(k - max(2, k // 2), k)
    x = -np.log(deltas[deep])
    y = np.log(counts[deep].astype(np.float64))
    slopes = []
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            slopes.append((y[j] - y[i]) / (x[j] - x[i]))
    return DimBracket(float(min(slopes)), float(max(slopes)))


def least_squares_slope(series: BoxCountSeries) -> float:
    """Least-squares slope over all scales (a convenience estimate)."""
    x = -np.log(series.deltas)
    y = np.log(series.counts.astype(np.float64))
    return float(np.polyfit(x, y, 1)[0])


# -- two-scale cover cost -----------------------------------------------------


@dataclass(frozen=True)
class CoverCost:
    p: float
    d: int
    theta: float
    s: float
    log_delta: float
    log_cost: float

    @property
    def delta(self) -> float:
        return math.exp(self.log_delta)

    @property
    def cost(self) -> float:
        return math.exp(self.log_cost)


def _log_ceil_exp(y: float) -> float:
    """``log(ceil(exp(y)))`` without overflow."""
    if y < 40:
        return math.log(math.ceil(math.exp(y) - 1e-12))
    return y


def _log_cost(p: float, d: int, theta: float, s: float, log_delta: float) -> float:
    log_n = _log_ceil_exp(-theta / (p + theta) * log_delta)
    first = d * np.logaddexp(-p * log_n - theta * log_delta, 0.0) + theta * s * log_delta
    second = d * log_n + s * log_delta
    return float(np.logaddexp(first, second))


def lattice_cover_cost(
    p: float, d: int, theta: float, s: float, delta: float | None = None, log_delta: float | None = None
) -> CoverCost:
    """Cost ``(n^-p / delta^theta + 1)^d delta^(theta s) + n^d delta^s``.

    This is the s-weighted cost of covering the inverted lattice with sets
    of size ``delta`` near the origin and size ``delta^theta`` elsewhere,
    with ``n = ceil(delta^(-theta/(p+theta)))``.  The scale may be passed as
    ``log_delta`` to reach far below the float range.
    """
    if log_delta is None:
        if delta is None or not 0 < delta < 0.1:
            raise DomainError(f"delta must lie in (0, 0.1), got {delta}")
        log_delta = math.log(delta)
    elif log_delta >= math.log(0.1):
        raise DomainError("delta must be below 0.1")
    if not 0 < theta <= 1:
        raise DomainError(f"theta must lie in (0, 1], got {theta}")
    if not p > 0 or d < 1 or s < 0:
        raise DomainError("need p > 0, d >= 1 and s >= 0")
    return CoverCost(p, d, theta, s, log_delta, _log_cost(p, d, theta, s, log_delta))


def cost_constant(d: int) -> float:
    """Bound ``C`` with ``1 <= cost < C`` at the critical exponent."""
    return 2.0 ** (d + 1)


#: default scales for :func:`fit_dim_theta`, as base-10 logarithms
DEFAULT_LOG10_DELTAS = tuple(np.linspace(-2.0, -300.0, 150))


def fit_dim_theta(
    p: float,
    d: int,
    theta: float,
    deltas: Sequence[float] | None = None,
    log10_deltas: Sequence[float] | None = None,
    s_step: float = 0.005,
    max_ratio: float = 1e3,
) -> float:
    """Smallest ``s`` on a grid whose cover cost stays bounded across scales.

    Bounded means ``max cost / min cost < max_ratio`` over the scales.  The
    cost drifts by ``delta^-(s* - s)`` away from the critical exponent, so
    the scales must span enough decades for the drift to exceed
    ``max_ratio``; the default spans about 300.
    """
    if log10_deltas is None:
        if deltas is None:
            log10_deltas = DEFAULT_LOG10_DELTAS
        else:
            log10_deltas = [math.log10(x) for x in deltas]
    lds = np.asarray(log10_deltas, dtype=np.float64) * math.log(10)
    if lds.max() - lds.min() < 3 * math.log(10) - 1e-9:
        raise GuardError("scales must span at least 3 decades")
    limit = math.log(max_ratio)
    steps = int(round(d / s_step))
    for k in range(steps + 1):
        s = k * s_step
        logs = [_log_cost(p, d, theta, s, ld) for ld in lds]
        if max(logs) - min(logs) < limit:
            return s
    raise SearchExhaustedError("no s on the grid keeps the cost bounded")
