"""Topological pressure and Hausdorff dimension brackets.

For a level ``n`` and exponent ``t`` the level sums are

    lowerSum = sum_w lower(w)**t,    upperSum = sum_w upper(w)**t

over all words of length ``n`` in the first ``N`` maps.  Lower derivative
bounds are supermultiplicative and upper bounds submultiplicative, which
gives, for every level,

    (1/n) log lowerSum_N  <=  P_N(t)  <=  P(t)  <=  (1/n) log fullUpperSum

where ``P_N`` is the pressure of the truncated subsystem and
``fullUpperSum`` adds a certified bound for the words that use at least one
map beyond the truncation.  The zero of the right-hand side bounds the
Hausdorff dimension ``h`` from above and the zero of the left-hand side
bounds ``h_N <= h`` from below.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .digits import ComplexPowerFamily, DigitSet, Explicit, FullTruncated, PowerFamily
from .errors import DomainError, SaturationWarning, UsageError
from .ifs import CfComplexSystem, CfRealSystem, GeometricRatios, SimilaritySystem

__all__ = [
    "DimBracket",
    "PressureEstimate",
    "phi_level",
    "phi_upper_certified",
    "pressure_estimate",
    "finiteness_parameter",
    "hausdorff_bracket",
    "similarity_h",
    "MAX_WORDS",
]

#: cap on the number of words enumerated at a single level
MAX_WORDS = 1 << 20

BISECT_LO = 1e-9
BISECT_MAXITER = 200


@dataclass(frozen=True)
class DimBracket:
    """Certified interval ``[lower, upper]`` for a dimension."""

    lower: float
    upper: float
    witness_level: int = 0
    witness_truncation: int = 0
    converged: bool = True

    @property
    def mid(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lower - slack <= x <= self.upper + slack

    def to_json(self) -> dict:
        return {
            "lower": self.lower,
            "upper": self.upper,
            "level": self.witness_level,
            "truncation": self.witness_truncation,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class PressureEstimate:
    t: float
    level: int
    truncation: int
    lower_value: float
    upper_value: float


# -- word enumeration ---------------------------------------------------------


def _alphabet_size(system) -> int | None:
    return system.size


def effective_truncation(system, level: int, truncation: int | None, max_words: int = MAX_WORDS) -> int:
    """Number of maps actually enumerated at ``level``.

    Capped by the alphabet size and by ``max_words ** (1/level)``.
    """
    if level < 1:
        raise UsageError(f"level must be at least 1, got {level}")
    size = _alphabet_size(system)
    cap = max(1, int(math.floor(max_words ** (1.0 / level) + 1e-9)))
    n = cap if truncation is None else min(int(truncation), cap)
    if size is not None:
        n = min(n, size)
    if n < 1:
        raise UsageError("truncation must be at least 1")
    return n


@lru_cache(maxsize=16)
def _word_log_bounds(system, level: int, n: int, hull: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """Natural logs of the lower and upper derivative bounds of all words.

    With ``hull`` the real continued fraction bounds are taken over the
    system's invariant interval instead of ``[0, 1]``.  Both choices give
    sub/supermultiplicative bounds and the same pressure in the limit.
    """
    if isinstance(system, SimilaritySystem):
        logs = system.log_ratio_array(n)
        acc = np.zeros(1)
        for _ in range(level):
            acc = (acc[:, None] + logs[None, :]).ravel()
        return acc, acc
    lead, pref = system.raw_alphabet(n)
    cplx = isinstance(system, CfComplexSystem)
    dtype = np.complex128 if cplx else np.float64
    q_prev = np.zeros(1, dtype=dtype)
    q = np.ones(1, dtype=dtype)
    for _ in range(level):
        qp2 = np.broadcast_to(q[:, None], (len(q), len(lead)))
        q2 = lead[None, :] * q[:, None] + q_prev[:, None]
        # prefixed maps append the raw digit 1 after the leading digit
        qp3 = np.where(pref[None, :], q2, qp2)
        q3 = np.where(pref[None, :], q2 + qp2, q2)
        q_prev, q = qp3.ravel(), q3.ravel()
    if cplx:
        centre = np.abs(q_prev / 2 + q)
        rad = np.abs(q_prev) / 2
        log_lower = -2.0 * np.log(centre + rad)
        with np.errstate(divide="ignore"):
            log_upper = -2.0 * np.log(np.maximum(centre - rad, 0.0))
        return log_lower, log_upper
    x_lo, x_hi = system.invariant_interval() if hull else (0.0, 1.0)
    return -2.0 * np.log(q_prev * x_hi + q), -2.0 * np.log(q_prev * x_lo + q)


def _power_sum(logs: np.ndarray, t: float) -> float:
    with np.errstate(over="ignore"):
        return float(np.sum(np.exp(t * logs)))


def _check_t(t: float) -> None:
    if not t > 0:
        raise DomainError(f"exponent t must be positive, got {t}")


def phi_level(system, level: int, t: float, truncation: int | None = None) -> tuple[float, float]:
    """Level sums ``(lowerSum, upperSum)`` over the first ``truncation`` maps.

    The upper sum is the truncated sum only; see :func:`phi_upper_certified`
    for the version that accounts for the omitted maps.
    """
    _check_t(t)
    n = effective_truncation(system, level, truncation)
    lo, hi = _word_log_bounds(system, level, n)
    return _power_sum(lo, t), _power_sum(hi, t)


# -- tails --------------------------------------------------------------------


def level_one_tail(system, n: int, t: float, hull: bool = False) -> float:
    """Upper bound for ``sum upper(b)**t`` over maps beyond the first ``n``."""
    size = _alphabet_size(system)
    if size is not None:
        if n >= size:
            return 0.0
        _, hi = _word_log_bounds(system, 1, size, hull)
        return _power_sum(hi[n:], t)
    if isinstance(system, SimilaritySystem):
        return system.ratios.tail_power_sum(n, t)  # infinite family without translations
    ds = system.digits
    if isinstance(ds, PowerFamily):
        # floor(k^p) >= k^p (1 - (M+1)^-p) for k > M, then an integral bound
        m = ds.l + n - 1
        sigma = 2.0 * ds.p * t
        if sigma <= 1:
            return math.inf
        shrink = 1.0 - (m + 1) ** (-ds.p)
        return shrink ** (-2.0 * t) * m ** (1 - sigma) / (sigma - 1)
    if isinstance(ds, ComplexPowerFamily):
        # at most (r+1)^(2/p) digits have modulus <= r, each term is at most
        # (|b| - 1/2)^(-2t); integrate by parts from the last included modulus
        if 2.0 * t <= 2.0 / ds.p:
            return math.inf
        rho = float(abs(ds.first(n)[-1]))
        kappa = (rho + 1) / (rho - 0.5)
        e = 2.0 / ds.p - 2.0 * t
        return 2.0 * t * kappa ** (2.0 / ds.p) * (rho - 0.5) ** e / (-e)
    raise UsageError(f"no tail bound for {ds!r}")


def phi_upper_certified(
    system, level: int, t: float, truncation: int | None = None, hull: bool = False
) -> float:
    """Upper bound for the full-alphabet level sum of upper derivative bounds.

    Words using a map beyond the truncation contribute at most
    ``(A + T)**n - A**n`` where ``A`` is the truncated level-one sum and ``T``
    the level-one tail bound.
    """
    _check_t(t)
    n = effective_truncation(system, level, truncation)
    _, hi = _word_log_bounds(system, level, n, hull)
    body = _power_sum(hi, t)
    tail = level_one_tail(system, n, t, hull)
    if tail == 0:
        return body
    if math.isinf(tail):
        return math.inf
    if level == 1:
        a = body
    else:
        _, hi1 = _word_log_bounds(system, 1, n, hull)
        a = _power_sum(hi1, t)
    return body + a**level * math.expm1(level * math.log1p(tail / a))


def pressure_estimate(system, t: float, level: int, truncation: int | None = None) -> PressureEstimate:
    """Lower and upper estimates of the pressure at ``t``.

    ``lower_value`` is ``(1/n) log lowerSum`` on the truncated alphabet and
    bounds the truncated subsystem's pressure from below.  ``upper_value``
    uses :func:`phi_upper_certified` and bounds the full pressure from above.
    """
    _check_t(t)
    n = effective_truncation(system, level, truncation)
    lo, _ = phi_level(system, level, t, n)
    up = phi_upper_certified(system, level, t, n)
    lower = math.log(lo) / level if lo > 0 else -math.inf
    upper = math.log(up) / level if up > 0 else -math.inf
    return PressureEstimate(t, level, n, lower, upper)


def finiteness_parameter(obj) -> float:
    """``inf {t : P(t) < inf}`` for a digit set or system."""
    ds = obj if isinstance(obj, DigitSet) else getattr(obj, "digits", obj)
    if isinstance(obj, SimilaritySystem):
        return 0.0
    if isinstance(ds, (Explicit, FullTruncated)):
        return 0.0
    if isinstance(ds, PowerFamily):
        return 1.0 / (2.0 * ds.p)
    if isinstance(ds, ComplexPowerFamily):
        return 1.0 / ds.p
    raise UsageError(f"unknown digit set {ds!r}")


# -- roots --------------------------------------------------------------------


def _bisect(f: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float, bool]:
    """Shrink ``[lo, hi]`` around the sign change of a decreasing ``f``.

    Assumes ``f(lo) >= 0 > f(hi)``.  Returns the final interval and whether
    the width fell below ``tol``.
    """
    for _ in range(BISECT_MAXITER):
        if hi - lo <= tol:
            return lo, hi, True
        mid = 0.5 * (lo + hi)
        if f(mid) >= 0:
            lo = mid
        else:
            hi = mid
    return lo, hi, hi - lo <= tol


def _root(f: Callable[[float], float], dim: float, tol: float) -> tuple[float, float, bool]:
    """Bracket ``inf {t : f(t) < 0}`` within ``[0, dim]``.

    Returns ``(lo, hi, converged)`` with ``f(lo) >= 0`` (or ``lo = 0``) and
    ``f(hi) < 0`` (or ``hi = dim`` on saturation).  A sign change below the
    resolution ``BISECT_LO`` is reported as the point 0.
    """
    if f(BISECT_LO) < 0:
        return 0.0, 0.0, True
    if f(dim) >= 0:
        return dim, dim, False
    return _bisect(f, BISECT_LO, dim, tol)


def _log_or_inf(x: float) -> float:
    if x <= 0:
        return -math.inf
    return math.log(x)


def hausdorff_bracket(
    system,
    level: int,
    truncation: int | None = None,
    tol: float = 1e-10,
    max_words: int = MAX_WORDS,
) -> DimBracket:
    """Certified bracket for the Hausdorff dimension of the limit set.

    Every level ``k <= level`` yields a valid bracket; the result is their
    intersection, so it only shrinks as ``level`` or ``truncation`` grows.
    Real continued fraction bounds are taken over the invariant interval of
    the digit set, which is much tighter than ``[0, 1]`` for finite sets.
    ``converged`` is False when the upper end saturated at the ambient
    dimension.
    """
    dim = float(system.ambient_dim)
    lower, upper = 0.0, dim
    converged = True
    n_used = 0
    for k in range(1, level + 1):
        n = effective_truncation(system, k, truncation, max_words)
        hull = isinstance(system, CfRealSystem)
        lo_logs, _ = _word_log_bounds(system, k, n, hull)

        def f_lo(t, lo_logs=lo_logs):
            return _log_or_inf(_power_sum(lo_logs, t))

        def f_up(t, k=k, n=n, hull=hull):
            return _log_or_inf(phi_upper_certified(system, k, t, n, hull))

        lo_k, _, _ = _root(f_lo, dim, tol)
        _, hi_k, ok = _root(f_up, dim, tol)
        lower = max(lower, lo_k)
        upper = min(upper, hi_k)
        if k == level:
            converged = ok
        n_used = n
    upper = max(upper, lower)
    return DimBracket(lower, upper, level, n_used, converged)


def similarity_h(ratios: Sequence[float] | GeometricRatios, ambient_dim: float = 1.0, tol: float = 1e-10) -> float:
    """Similarity dimension ``inf {t > 0 : sum c_i**t < 1}``.

    Saturates at ``ambient_dim`` with a :class:`SaturationWarning` when the
    sum stays at or above 1 there.
    """
    if isinstance(ratios, GeometricRatios):
        fam = ratios

        def total(t):
            return fam.tail_power_sum(0, t)

    else:
        logs = np.log(np.asarray(ratios, dtype=np.float64))
        if logs.size == 0:
            raise UsageError("need at least one ratio")
        if np.any(logs >= 0):
            raise UsageError("ratios must lie in (0, 1)")

        def total(t):
            return float(np.sum(np.exp(t * logs)))

    def f(t):
        return _log_or_inf(total(t))

    lo, hi, ok = _root(f, float(ambient_dim), tol)
    if not ok and lo == hi == ambient_dim:
        warnings.warn(f"similarity sum does not drop below 1 by t = {ambient_dim}", SaturationWarning, stacklevel=2)
        return float(ambient_dim)
    if lo == 0.0:
        return 0.0
    return 0.5 * (lo + hi)
