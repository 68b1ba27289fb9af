"""Dimension reports for continued fraction sets with restricted digits.

For a digit set ``I`` the limit set ``F_I`` has intermediate dimensions
``max{h, dim_theta {1/b : b in I}}``.  The reciprocal set is bi-Lipschitz to
a sequence set ``{n^-p}`` for real power families and to an inverted
lattice in the plane for complex ones.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .digits import ComplexPowerFamily, DigitSet, Explicit, FullTruncated, PowerFamily
from .errors import SearchExhaustedError, UsageError
from .formulas import DimCurve, combine_max, lattice_curve, seq_curve, theta_grid, zero_curve
from .ifs import CfComplexSystem, CfRealSystem
from .pressure import DimBracket, finiteness_parameter, hausdorff_bracket

__all__ = [
    "CfReport",
    "cf_system",
    "cf_report",
    "cf_fixed_points",
    "cf_sample_points",
    "search_power_l",
    "fixed_point_box_dim",
]


@dataclass(frozen=True, eq=False)
class CfReport:
    digit_set: DigitSet
    h_bracket: DimBracket
    theta_s: float
    fixed_point_box_dim: float
    curve: DimCurve
    h_supplied: bool = False

    def to_json(self) -> dict:
        return {
            "digitSet": self.digit_set.to_json(),
            "hBracket": self.h_bracket.to_json(),
            "hSupplied": self.h_supplied,
            "thetaS": self.theta_s,
            "fixedPointBoxDim": self.fixed_point_box_dim,
            "curve": {
                "theta": self.curve.theta.tolist(),
                "lower": self.curve.lower.tolist(),
                "upper": self.curve.upper.tolist(),
                "source": self.curve.source,
            },
        }


def cf_system(digit_set: DigitSet):
    """The real or complex continued fraction system for ``digit_set``."""
    if digit_set.is_complex:
        return CfComplexSystem(digit_set)
    return CfRealSystem(digit_set)


def fixed_point_box_dim(digit_set: DigitSet) -> float:
    """Box dimension of ``{1/b : b in I}``."""
    if isinstance(digit_set, PowerFamily):
        return 1.0 / (digit_set.p + 1.0)
    if isinstance(digit_set, ComplexPowerFamily):
        return 2.0 / (digit_set.p + 1.0)
    if isinstance(digit_set, (Explicit, FullTruncated)):
        return 0.0
    raise UsageError(f"unknown digit set {digit_set!r}")


def _family_curve(digit_set: DigitSet, grid: np.ndarray) -> DimCurve:
    if isinstance(digit_set, PowerFamily):
        return seq_curve(digit_set.p, grid)
    if isinstance(digit_set, ComplexPowerFamily):
        return lattice_curve(digit_set.p, 2, grid)
    return zero_curve(grid)


def cf_report(
    digit_set: DigitSet,
    level: int = 4,
    truncation: int | None = None,
    grid: Sequence[float] | None = None,
    h: float | DimBracket | None = None,
) -> CfReport:
    """Hausdorff bracket, finiteness parameter and theta-curve for ``F_I``.

    Pass ``h`` to skip the pressure computation and use a known value.
    """
    if h is None:
        bracket = hausdorff_bracket(cf_system(digit_set), level, truncation)
    elif isinstance(h, DimBracket):
        bracket = h
    else:
        bracket = DimBracket(float(h), float(h))
    theta_s = finiteness_parameter(digit_set)
    box = fixed_point_box_dim(digit_set)
    if grid is None:
        extra = []
        amb = 2 if digit_set.is_complex else 1
        p = getattr(digit_set, "p", None)
        if p is not None and 0 < bracket.upper < amb / (p + 1):
            extra.append(p * bracket.upper / (amb - bracket.upper))
        grid = theta_grid(extra=extra)
    grid = np.asarray(grid, dtype=np.float64)
    curve = combine_max(bracket, _family_curve(digit_set, grid))
    return CfReport(digit_set, bracket, theta_s, box, curve, h is not None)


def search_power_l(
    p: float,
    margin: float = 0.01,
    level: int = 1,
    truncation: int | None = None,
    l_start: int = 2,
    l_max: int = 1 << 16,
) -> tuple[int, DimBracket]:
    """Smallest doubling of ``l`` with ``h`` certified below ``1/(p+1) - margin``."""
    target = 1.0 / (p + 1.0) - margin
    l = l_start
    while l <= l_max:
        b = hausdorff_bracket(CfRealSystem(PowerFamily(p, l)), level, truncation)
        if b.upper < target:
            return l, b
        l *= 2
    raise SearchExhaustedError(f"no l <= {l_max} puts h below {target:.6g}")


def cf_fixed_points(digit_set: DigitSet, count: int) -> list:
    """Reciprocals ``1/b`` of the first ``count`` digits."""
    if count < 1:
        raise UsageError("count must be at least 1")
    digits = digit_set.first_exact(count)
    return [1 / b for b in digits]


def cf_sample_points(
    digit_set: DigitSet,
    num_points: int,
    depth: int,
    rng: np.random.Generator | int | None = None,
    truncation: int = 1000,
    return_words: bool = False,
):
    """Points of ``F_I`` from uniformly random words of the truncated alphabet.

    Each point is ``S_w(0)`` for a word ``w`` of ``depth`` maps drawn
    independently and uniformly from the first ``truncation`` maps (the
    rewritten alphabet when digit 1 is allowed).  With ``return_words`` the
    sampled alphabet indices are returned as well.
    """
    if depth < 1:
        raise UsageError("depth must be at least 1")
    rng = np.random.default_rng(rng)
    system = cf_system(digit_set)
    n = truncation if system.size is None else min(truncation, system.size)
    lead, pref = system.raw_alphabet(n)
    if len(lead) == 0:
        raise UsageError("truncated alphabet is empty")
    words = rng.integers(0, len(lead), size=(num_points, depth))
    x = np.zeros(num_points, dtype=lead.dtype)
    for k in range(depth - 1, -1, -1):
        idx = words[:, k]
        x = np.where(pref[idx], 1.0 / (1.0 + x), x)
        x = 1.0 / (lead[idx] + x)
    if return_words:
        return x, words, (lead, pref)
    return x
