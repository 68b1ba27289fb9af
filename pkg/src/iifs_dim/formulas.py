"""Closed-form intermediate dimension curves and their consequences.

Curves are sampled on a theta grid in ``[0, 1]`` and always carry a lower
and an upper value per grid point; where only bounds are known the two are
kept apart rather than collapsed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, GridMismatchError, NoTransitionError, RegimeError
from .pressure import DimBracket

__all__ = [
    "DimCurve",
    "HolderReport",
    "FbmReport",
    "ContinuityReport",
    "theta_grid",
    "seq_dim_theta",
    "lattice_dim_theta",
    "seq_curve",
    "lattice_curve",
    "zero_curve",
    "combine_max",
    "phase_transition_theta",
    "assouad_box_lower_bound",
    "banaji_lower_bound",
    "holder_bounds",
    "fbm_image_dims",
    "continuity_at_zero_check",
    "slope_breaks",
]

GRID_POINTS = 513


@dataclass(frozen=True, eq=False)
class DimCurve:
    """Per-theta brackets ``[lower[i], upper[i]]`` on an increasing grid."""

    theta: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    source: str = ""

    def __post_init__(self):
        for name in ("theta", "lower", "upper"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.theta.shape == self.lower.shape == self.upper.shape):
            raise ValueError("theta, lower and upper must have the same length")

    def __len__(self) -> int:
        return len(self.theta)

    def bracket(self, i: int) -> DimBracket:
        return DimBracket(float(self.lower[i]), float(self.upper[i]))

    def upper_at(self, theta: float) -> float:
        return float(np.interp(theta, self.theta, self.upper))

    def lower_at(self, theta: float) -> float:
        return float(np.interp(theta, self.theta, self.lower))

    def same_grid(self, other: "DimCurve") -> bool:
        return self.theta.shape == other.theta.shape and bool(np.array_equal(self.theta, other.theta))


def theta_grid(n: int = GRID_POINTS, extra: Iterable[float] = ()) -> np.ndarray:
    """``n`` uniform points on ``[0, 1]`` with the ``extra`` points inserted."""
    pts = np.linspace(0.0, 1.0, n)
    add = [float(x) for x in extra if 0.0 <= x <= 1.0]
    if add:
        pts = np.union1d(pts, add)
        # drop uniform points that sit within rounding of an inserted one
        keep = np.ones(len(pts), dtype=bool)
        for i in range(1, len(pts)):
            if pts[i] - pts[i - 1] < 1e-12:
                keep[i if pts[i] not in add else i - 1] = False
        pts = pts[keep]
    return pts


def _check_theta(theta) -> np.ndarray:
    th = np.asarray(theta, dtype=np.float64)
    if np.any(th < 0) or np.any(th > 1) or np.any(np.isnan(th)):
        raise DomainError(f"theta must lie in [0, 1], got {theta!r}")
    return th


def seq_dim_theta(p: float, theta):
    """``theta / (p + theta)``, the intermediate dimension of ``{n^-p}``."""
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    th = _check_theta(theta)
    out = th / (p + th)
    return float(out) if out.ndim == 0 else out


def lattice_dim_theta(p: float, d: int, theta):
    """``d theta / (p + theta)`` for the inverted lattice ``G_{p,d}``."""
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    if int(d) != d or d < 1:
        raise DomainError(f"d must be a positive integer, got {d}")
    th = _check_theta(theta)
    out = d * th / (p + th)
    return float(out) if out.ndim == 0 else out


def seq_curve(p: float, grid: Sequence[float] | None = None) -> DimCurve:
    th = theta_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    v = seq_dim_theta(p, th)
    return DimCurve(th, v, v, f"sequence p={p:g}")


def lattice_curve(p: float, d: int, grid: Sequence[float] | None = None) -> DimCurve:
    th = theta_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    v = lattice_dim_theta(p, d, th)
    return DimCurve(th, v, v, f"lattice p={p:g} d={d}")


def zero_curve(grid: Sequence[float] | None = None) -> DimCurve:
    """The curve of a finite set."""
    th = theta_grid() if grid is None else np.asarray(grid, dtype=np.float64)
    z = np.zeros_like(th)
    return DimCurve(th, z, z, "finite set")


def combine_max(h: DimBracket, *curves: DimCurve) -> DimCurve:
    """Pointwise ``max{h, curve}``; at ``theta = 0`` the value is ``h`` itself.

    Several curves on the same grid may be passed and are all maxed in.
    """
    if not curves:
        raise ValueError("combine_max needs at least one curve")
    base = curves[0]
    for c in curves[1:]:
        if not base.same_grid(c):
            raise GridMismatchError("curves are sampled on different theta grids")
    lo = np.maximum.reduce([c.lower for c in curves] + [np.full(len(base), h.lower)])
    hi = np.maximum.reduce([c.upper for c in curves] + [np.full(len(base), h.upper)])
    zero = base.theta == 0
    lo[zero] = h.lower
    hi[zero] = h.upper
    src = " | ".join(c.source for c in curves)
    return DimCurve(base.theta, lo, hi, f"max(h=[{h.lower:g},{h.upper:g}], {src})")


def phase_transition_theta(h: float, p: float, d: int = 1) -> float:
    """The theta where ``d theta / (p + theta)`` reaches ``h``."""
    if h < 0:
        raise DomainError(f"h must be non-negative, got {h}")
    if not p > 0:
        raise DomainError(f"p must be positive, got {p}")
    if h >= d / (p + 1):
        raise NoTransitionError(f"h = {h} is not below the box dimension {d}/(p+1) = {d / (p + 1)}")
    return p * h / (d - h)


def assouad_box_lower_bound(theta: float, dim_a: float, dim_b: float):
    """Lower bound ``theta A B / (A - (1 - theta) B)`` for ``dim_theta``.

    ``A`` is the Assouad dimension and ``B`` the lower box dimension.  With
    ``A = d`` and ``B = d/(p+1)`` this equals the inverted lattice curve.
    """
    th = np.asarray(theta, dtype=np.float64)
    denom = dim_a - (1.0 - th) * dim_b
    if np.any(denom <= 0):
        raise DomainError("denominator A - (1 - theta) B is not positive")
    out = th * dim_a * dim_b / denom
    return float(out) if out.ndim == 0 else out


# interface name kept for callers of the published API
banaji_lower_bound = assouad_box_lower_bound


# -- Hölder exponents between restricted continued fraction sets ----------------


@dataclass(frozen=True, eq=False)
class HolderReport:
    """Upper bounds on Hölder exponents of maps sending ``F_p`` onto ``F_q``."""

    p: float
    q: float
    h_p: float
    h_q: float
    theta_opt: float
    bound_intermediate: float
    bound_closed_form: float
    bound_hausdorff: float
    bound_box: float
    curve_p: DimCurve
    curve_q: DimCurve
    bound: np.ndarray = field(repr=False)

    @property
    def theta(self) -> np.ndarray:
        return self.curve_p.theta

    @property
    def argmin_theta(self) -> float:
        return float(self.theta[int(np.argmin(self.bound))])


def _holder_regime(p: float, q: float, h_p: float, h_q: float) -> None:
    checks = [
        (1 < p, "1 < p"),
        (p < q, "p < q"),
        (q < 2 * p - 1, "q < 2p - 1"),
        (1 / (2 * p) < h_p, "1/(2p) < h_p"),
        (h_p < 1 / (p + 1), "h_p < 1/(p+1)"),
        (p * h_p / (q - q * h_p + p * h_p) < h_q, "p h_p / (q - q h_p + p h_p) < h_q"),
        (h_q < 1 / (q + 1), "h_q < 1/(q+1)"),
    ]
    for ok, text in checks:
        if not ok:
            raise RegimeError(f"parameters violate {text} (p={p}, q={q}, h_p={h_p}, h_q={h_q})")


def holder_bounds(p: float, q: float, h_p: float, h_q: float, grid: Sequence[float] | None = None) -> HolderReport:
    """Bound curve ``dim_theta F_q / dim_theta F_p`` and its minimum.

    ``h_p`` and ``h_q`` are the Hausdorff dimensions of the two sets, whose
    fixed-point parts have power-law exponents ``p`` and ``q``.
    """
    _holder_regime(p, q, h_p, h_q)
    theta_opt = q * h_q / (1 - h_q)
    th = theta_grid(extra=(theta_opt, p * h_p / (1 - h_p))) if grid is None else np.asarray(grid, dtype=np.float64)
    cp = combine_max(DimBracket(h_p, h_p), seq_curve(p, th))
    cq = combine_max(DimBracket(h_q, h_q), seq_curve(q, th))
    bound = cq.upper / cp.upper
    return HolderReport(
        p=p,
        q=q,
        h_p=h_p,
        h_q=h_q,
        theta_opt=theta_opt,
        bound_intermediate=float(bound.min()),
        bound_closed_form=(p - p * h_q + q * h_q) / q,
        bound_hausdorff=h_q / h_p,
        bound_box=(p + 1) / (q + 1),
        curve_p=cp,
        curve_q=cq,
        bound=bound,
    )


# -- fractional Brownian images ----------------------------------------------


@dataclass(frozen=True)
class FbmReport:
    hausdorff_image: float
    box_image_strictly_below_ambient: bool
    all_equal_ambient: bool


def fbm_image_dims(h: float, alpha: float, ambient: int = 1) -> FbmReport:
    """Dimensions of the image of a set of Hausdorff dimension ``h`` under index-``alpha`` fBm.

    ``ambient = 1`` is the real case, ``ambient = 2`` the complex one where
    the threshold on ``alpha`` is ``h/2``.
    """
    if ambient not in (1, 2):
        raise DomainError(f"ambient must be 1 or 2, got {ambient}")
    if not 0 < h <= ambient:
        raise DomainError(f"h must lie in (0, {ambient}], got {h}")
    if not 0 < alpha < 1:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha}")
    threshold = h / ambient
    if alpha > threshold:
        return FbmReport(min(h / alpha, float(ambient)), True, False)
    return FbmReport(float(ambient), False, True)


# -- curve diagnostics --------------------------------------------------------


@dataclass(frozen=True)
class ContinuityReport:
    continuous: bool
    extrapolated_gap: float
    gaps: tuple

    def __bool__(self) -> bool:
        return self.continuous


def continuity_at_zero_check(
    curve: DimCurve,
    h: DimBracket,
    eps_grid: Sequence[float] | None = None,
    tol: float = 1e-3,
) -> ContinuityReport:
    """Do the upper values approach ``h.upper`` as theta decreases to 0?

    The gaps ``|upper(theta) - h.upper|`` on ``eps_grid`` (default: the eight
    smallest positive grid points) must not increase toward 0 and their
    linear extrapolation to ``theta = 0`` must be within ``tol``.
    """
    if eps_grid is None:
        pos = curve.theta[curve.theta > 0]
        eps = pos[:8]
    else:
        eps = np.sort(np.asarray(eps_grid, dtype=np.float64))
    if len(eps) < 2:
        raise ValueError("need at least two positive theta values")
    gaps = np.abs(np.interp(eps, curve.theta, curve.upper) - h.upper)
    monotone = bool(np.all(np.diff(gaps) >= -1e-12))
    slope = (gaps[1] - gaps[0]) / (eps[1] - eps[0])
    extrap = float(gaps[0] - slope * eps[0])
    ok = monotone and abs(extrap) <= tol
    return ContinuityReport(ok, extrap, tuple(float(g) for g in gaps))


def slope_breaks(curve: DimCurve, factor: float = 10.0, which: str = "upper") -> list[float]:
    """Theta values where the slope of a sampled curve jumps.

    A change in slope between consecutive grid intervals counts as a break
    when it exceeds ``factor`` times the slope changes two intervals away on
    either side (the local curvature scale).  Adjacent flagged points are
    merged and reported at the one with the largest change.
    """
    th = curve.theta
    v = curve.upper if which == "upper" else curve.lower
    s = np.diff(v) / np.diff(th)
    ds = np.abs(np.diff(s))  # ds[i] is the change at grid point i + 1
    n = len(ds)
    flagged = []
    for i in range(n):
        ref = max(ds[i - 2] if i >= 2 else 0.0, ds[i + 2] if i + 2 < n else 0.0)
        if ds[i] > factor * ref and ds[i] > 1e-9:
            flagged.append(i)
    breaks = []
    group: list[int] = []
    for i in flagged:
        if group and i != group[-1] + 1:
            breaks.append(group)
            group = []
        group.append(i)
    if group:
        breaks.append(group)
    return [float(th[max(g, key=lambda j: ds[j]) + 1]) for g in breaks]


def holder_regime_ok(p: float, q: float, h_p: float, h_q: float) -> bool:
    try:
        _holder_regime(p, q, h_p, h_q)
    except RegimeError:
        return False
    return True
