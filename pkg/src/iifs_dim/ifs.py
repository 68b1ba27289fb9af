"""Iterated function systems with countably many maps.

Three kinds of system are supported:

* similarity systems ``x -> c x + a`` on the cube ``[0, side]^d``,
* real continued fraction systems ``x -> 1/(b + x)`` on ``[0, 1]``,
* complex continued fraction systems ``z -> 1/(b + z)`` on the closed disc
  with centre 1/2 and radius 1/2.

When the digit 1 is allowed, ``x -> 1/(1 + x)`` is not a uniform contraction
on ``[0, 1]``.  Such systems are rewritten: every ``b != 1`` stays as is and
each ``b`` also contributes the two-step map ``x -> 1/(b + 1/(1 + x))``,
written here as ``CfReal(b, prefixed=True)``.  The rewritten system has the
same limit set up to a countable union of bi-Lipschitz copies, so the same
dimensions.

Composite maps of continued fraction words are kept as exact integer (or
Gaussian integer) continuants ``p_{n-1}, p_n, q_{n-1}, q_n`` with
``S_w(x) = (p_{n-1} x + p_n) / (q_{n-1} x + q_n)``.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence, Union

import numpy as np

from .digits import (
    ComplexPowerFamily,
    DigitSet,
    Explicit,
    FullTruncated,
    PowerFamily,
    digit_set_from_json,
)
from .errors import DomainError, InvalidWordError, UsageError

__all__ = [
    "Similarity",
    "CfReal",
    "CfComplex",
    "GeometricRatios",
    "SimilaritySystem",
    "CfRealSystem",
    "CfComplexSystem",
    "CylinderBounds",
    "AffineComposite",
    "MobiusComposite",
    "GaussInt",
    "compose_word",
    "word_norm_bounds",
    "fixed_point",
    "evaluate_point",
    "system_to_json",
    "system_from_json",
]


# -- maps -------------------------------------------------------------------


@dataclass(frozen=True)
class Similarity:
    """``x -> ratio * x + translation``."""

    ratio: float
    translation: tuple = (0.0,)

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise UsageError(f"similarity ratio must lie in (0, 1), got {self.ratio}")
        object.__setattr__(self, "translation", tuple(float(a) for a in np.atleast_1d(self.translation)))


@dataclass(frozen=True)
class CfReal:
    """``x -> 1/(digit + x)``, or ``x -> 1/(digit + 1/(1 + x))`` when prefixed."""

    digit: int
    prefixed: bool = False

    @property
    def raw(self) -> tuple:
        return (self.digit, 1) if self.prefixed else (self.digit,)


@dataclass(frozen=True)
class CfComplex:
    """``z -> 1/(digit + z)`` for a Gaussian integer digit."""

    digit: complex
    prefixed: bool = False

    @property
    def raw(self) -> tuple:
        return (self.digit, 1 + 0j) if self.prefixed else (self.digit,)


MapSpec = Union[Similarity, CfReal, CfComplex]


class GaussInt(NamedTuple):
    """Exact Gaussian integer ``re + im i``."""

    re: int
    im: int

    @classmethod
    def of(cls, z) -> "GaussInt":
        if isinstance(z, GaussInt):
            return z
        z = complex(z)
        return cls(int(z.real), int(z.imag))

    def __add__(self, o):  # type: ignore[override]
        return GaussInt(self.re + o.re, self.im + o.im)

    def __mul__(self, o):  # type: ignore[override]
        return GaussInt(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __complex__(self):
        return complex(self.re, self.im)

    def norm(self) -> int:
        return self.re * self.re + self.im * self.im


# -- systems ----------------------------------------------------------------


@dataclass(frozen=True)
class GeometricRatios:
    """Ratios ``scale * base**(start + k)`` for ``k = 0, 1, 2, ...``."""

    scale: float = 1.0
    base: float = 0.5
    start: int = 3

    def __post_init__(self):
        if not 0 < self.base < 1 or not self.scale > 0:
            raise UsageError("geometric ratios need scale > 0 and 0 < base < 1")
        if self.ratio(0) >= 1:
            raise UsageError("geometric ratios must all be below 1")

    def ratio(self, k: int) -> float:
        return self.scale * self.base ** (self.start + k)

    def first(self, n: int) -> np.ndarray:
        return self.scale * self.base ** (self.start + np.arange(n, dtype=np.float64))

    def tail_power_sum(self, n: int, t: float) -> float:
        """``sum_{k >= n} ratio(k)**t`` in closed form."""
        return self.scale**t * self.base ** (t * (self.start + n)) / (1 - self.base**t)


@dataclass(frozen=True)
class SimilaritySystem:
    """Similarities ``x -> c_i x + a_i`` acting on ``[0, side]^dim``.

    ``ratios`` is either a finite tuple or a :class:`GeometricRatios` family.
    ``translations`` defaults to all zeros; when it is given together with a
    family, the system consists of the first ``len(translations)`` maps of
    the family (this keeps very small ratios exact).
    """

    ratios: tuple | GeometricRatios
    translations: tuple | None = None
    dim: int = 1
    side: float = 1.0

    def __post_init__(self):
        family = isinstance(self.ratios, GeometricRatios)
        if not family:
            rs = tuple(float(c) for c in self.ratios)
            if not rs:
                raise UsageError("similarity system needs at least one map")
            for c in rs:
                if not 0 < c < 1:
                    raise UsageError(f"similarity ratio must lie in (0, 1), got {c}")
            object.__setattr__(self, "ratios", rs)
        if self.translations is not None:
            ts = tuple(tuple(float(a) for a in np.atleast_1d(t)) for t in self.translations)
            if any(len(t) != self.dim for t in ts):
                raise UsageError("translations must be d-vectors")
            if not family and len(ts) != len(self.ratios):
                raise UsageError("translations must give one vector per ratio")
            if not ts:
                raise UsageError("similarity system needs at least one map")
            object.__setattr__(self, "translations", ts)

    ambient_kind = "similarity"

    @property
    def ambient_dim(self) -> int:
        return self.dim

    @property
    def size(self) -> int | None:
        if self.translations is not None:
            return len(self.translations)
        return None if isinstance(self.ratios, GeometricRatios) else len(self.ratios)

    def ratio(self, i: int) -> float:
        if i < 0 or (self.size is not None and i >= self.size):
            raise InvalidWordError(f"map index {i} is not in the system")
        if isinstance(self.ratios, GeometricRatios):
            return self.ratios.ratio(i)
        return self.ratios[i]

    def translation(self, i: int) -> tuple:
        if self.translations is None:
            return (0.0,) * self.dim
        return self.translations[i]

    def map(self, i: int) -> Similarity:
        return Similarity(self.ratio(i), self.translation(i))

    def ratio_array(self, n: int) -> np.ndarray:
        if self.size is not None:
            n = min(n, self.size)
        if isinstance(self.ratios, GeometricRatios):
            return self.ratios.first(n)
        return np.array(self.ratios[:n], dtype=np.float64)

    def log_ratio_array(self, n: int) -> np.ndarray:
        """Natural logs of the first ``n`` ratios, exact even below float range."""
        if self.size is not None:
            n = min(n, self.size)
        if isinstance(self.ratios, GeometricRatios):
            r = self.ratios
            return math.log(r.scale) + (r.start + np.arange(n, dtype=np.float64)) * math.log(r.base)
        return np.log(np.array(self.ratios[:n], dtype=np.float64))

    def translation_array(self, n: int | None = None) -> np.ndarray:
        size = self.size if n is None else min(n, self.size or n)
        if self.translations is None:
            return np.zeros((size, self.dim))
        return np.array(self.translations[:size], dtype=np.float64)

    def contains(self, x) -> bool:
        x = np.atleast_1d(np.asarray(x, dtype=np.float64))
        return x.shape == (self.dim,) and bool(np.all((x >= 0) & (x <= self.side)))


class _CfSystem:
    digits: DigitSet

    @property
    def rewritten(self) -> bool:
        """True when digit 1 is present and two-step maps replace it."""
        return 1 in self.digits

    @property
    def size(self) -> int | None:
        n = self.digits.size
        if n is None:
            return None
        return 2 * n - 1 if self.rewritten else n

    def alphabet(self, n: int | None = None) -> list:
        """The first ``n`` maps of the (rewritten) alphabet; all of them if ``n`` is None."""
        if n is None:
            if not self.digits.is_finite:
                raise UsageError("an infinite alphabet needs a truncation")
            n = self.size
        digits = self.digits.first_exact(n)
        cls = self._map_cls
        if not self.rewritten:
            return [cls(b) for b in digits]
        out = []
        for b in digits:
            if b != 1:
                out.append(cls(b))
            out.append(cls(b, prefixed=True))
        return out[:n]

    def raw_alphabet(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        """First-digit array and prefixed mask for the first ``n`` maps."""
        if not self.rewritten:
            ds = self.digits.first(n)
            return ds, np.zeros(len(ds), dtype=bool)
        ds = self.digits.first(n)
        lead, pref = [], []
        for b in ds:
            if b != 1:
                lead.append(b)
                pref.append(False)
            lead.append(b)
            pref.append(True)
        dtype = ds.dtype
        return np.array(lead[:n], dtype=dtype), np.array(pref[:n], dtype=bool)

    def check_map(self, m) -> None:
        if not isinstance(m, self._map_cls):
            raise InvalidWordError(f"{m!r} is not a map of this system")
        if m.digit not in self.digits:
            raise InvalidWordError(f"digit {m.digit!r} is not in the digit set")
        if m.digit == 1 and not m.prefixed:
            raise InvalidWordError("digit 1 is only allowed inside a prefixed two-step map")
        if m.prefixed and not self.rewritten:
            raise InvalidWordError("prefixed maps only exist when digit 1 is in the set")


@dataclass(frozen=True)
class CfRealSystem(_CfSystem):
    """Real continued fractions with digits restricted to ``digits``."""

    digits: DigitSet
    _map_cls = CfReal
    ambient_kind = "cf-real"
    ambient_dim = 1

    def __post_init__(self):
        if self.digits.is_complex:
            raise UsageError("real continued fraction system needs a real digit set")
        if isinstance(self.digits, PowerFamily) and not self.digits.proper:
            raise UsageError("power family systems need p > 1 and l >= 2")

    @staticmethod
    def contains(x) -> bool:
        return 0.0 <= float(x) <= 1.0

    def invariant_interval(self) -> tuple[float, float]:
        """Smallest interval mapped into itself by every digit map.

        Its ends are the continued fractions ``[0; bmax, bmin, bmax, ...]``
        and ``[0; bmin, bmax, bmin, ...]``; with unbounded digits the left
        end is 0.  The ends are nudged outward by 1e-12 to absorb rounding.
        """
        a = float(self.digits.first_exact(1)[0])
        if not self.digits.is_finite:
            return 0.0, min(1.0, 1.0 / a + 1e-12)
        b = float(self.digits.first_exact(self.digits.size)[-1])
        hi = (-a * b + math.sqrt(a * a * b * b + 4 * a * b)) / (2 * a)
        lo = 1.0 / (b + hi)
        return max(0.0, lo - 1e-12), min(1.0, hi + 1e-12)


@dataclass(frozen=True)
class CfComplexSystem(_CfSystem):
    """Complex continued fractions with Gaussian digits."""

    digits: DigitSet
    _map_cls = CfComplex
    ambient_kind = "cf-complex"
    ambient_dim = 2

    def __post_init__(self):
        if not self.digits.is_complex and not isinstance(self.digits, ComplexPowerFamily):
            raise UsageError("complex continued fraction system needs a complex digit set")

    @staticmethod
    def contains(z) -> bool:
        return abs(complex(z) - 0.5) <= 0.5 + 1e-15


System = Union[SimilaritySystem, CfRealSystem, CfComplexSystem]


# -- words and composites -----------------------------------------------------


@dataclass(frozen=True)
class CylinderBounds:
    """Lower and upper bounds for ``|S_w'|`` over the domain."""

    lower: float
    upper: float


@dataclass(frozen=True)
class AffineComposite:
    """Composite similarity ``x -> ratio * x + translation``."""

    ratio: float
    translation: tuple


@dataclass(frozen=True)
class MobiusComposite:
    """Composite continued fraction map ``(p_prev x + p) / (q_prev x + q)``."""

    p_prev: object
    p: object
    q_prev: object
    q: object
    complex_digits: bool = False

    def __call__(self, x):
        if self.complex_digits:
            a, b, c, d = (complex(v) for v in (self.p_prev, self.p, self.q_prev, self.q))
            return (a * x + b) / (c * x + d)
        fx = Fraction(x) if not isinstance(x, Fraction) else x
        return float((self.p_prev * fx + self.p) / (self.q_prev * fx + self.q))


def _normalize_word(system: System, word: Sequence) -> list:
    if len(word) == 0:
        raise InvalidWordError("word must be non-empty")
    if isinstance(system, SimilaritySystem):
        out = []
        for i in word:
            if isinstance(i, bool) or int(i) != i:
                raise InvalidWordError(f"similarity words are map indices, got {i!r}")
            system.ratio(int(i))  # range check
            out.append(int(i))
        return out
    cls = system._map_cls
    out = []
    for s in word:
        m = s if isinstance(s, (CfReal, CfComplex)) else cls(s)
        system.check_map(m)
        out.append(m)
    return out


def _raw_digits(maps: list) -> list:
    raw = []
    for m in maps:
        raw.extend(m.raw)
    return raw


def compose_word(system: System, word: Sequence):
    """Compose the maps named by ``word`` (outermost first).

    Similarity words are sequences of map indices and give an
    :class:`AffineComposite`.  Continued fraction words are sequences of
    digits (or ``CfReal``/``CfComplex`` maps) and give exact continuants.
    """
    maps = _normalize_word(system, word)
    if isinstance(system, SimilaritySystem):
        ratio = 1.0
        trans = np.zeros(system.dim)
        for i in maps:
            trans = trans + ratio * np.asarray(system.translation(i))
            ratio *= system.ratio(i)
        return AffineComposite(ratio, tuple(float(a) for a in trans))
    if isinstance(system, CfRealSystem):
        p_prev, p, q_prev, q = 1, 0, 0, 1
        for b in _raw_digits(maps):
            b = int(b)
            p_prev, p = p, b * p + p_prev
            q_prev, q = q, b * q + q_prev
        return MobiusComposite(p_prev, p, q_prev, q)
    one, zero = GaussInt(1, 0), GaussInt(0, 0)
    p_prev, p, q_prev, q = one, zero, zero, one
    for b in _raw_digits(maps):
        b = GaussInt.of(b)
        p_prev, p = p, b * p + p_prev
        q_prev, q = q, b * q + q_prev
    return MobiusComposite(p_prev, p, q_prev, q, complex_digits=True)


def _real_bounds(q_prev: int, q: int) -> CylinderBounds:
    return CylinderBounds(float(Fraction(1, (q_prev + q) ** 2)), float(Fraction(1, q * q)))


def _disc_modulus_range(a: complex, b: complex) -> tuple[float, float]:
    """Exact min and max of ``|a z + b|`` over ``|z - 1/2| <= 1/2``."""
    centre = abs(a / 2 + b)
    rad = abs(a) / 2
    return max(centre - rad, 0.0), centre + rad


def _complex_bounds(q_prev: GaussInt, q: GaussInt) -> CylinderBounds:
    lo, hi = _disc_modulus_range(complex(q_prev), complex(q))
    upper = math.inf if lo == 0 else 1.0 / (lo * lo)
    return CylinderBounds(1.0 / (hi * hi), upper)


def word_norm_bounds(system: System, word: Sequence) -> CylinderBounds:
    """Bounds ``lower <= |S_w'(x)| <= upper`` over the whole domain.

    For similarities both bounds are the product of the ratios.
    """
    comp = compose_word(system, word)
    if isinstance(comp, AffineComposite):
        return CylinderBounds(comp.ratio, comp.ratio)
    if comp.complex_digits:
        return _complex_bounds(comp.q_prev, comp.q)
    return _real_bounds(comp.q_prev, comp.q)


def fixed_point(m):
    """Fixed point of a single contraction or of a composite map.

    Raises :class:`DomainError` for a map that is not a uniform contraction,
    such as an unprefixed digit 1.
    """
    if isinstance(m, Similarity):
        m = AffineComposite(m.ratio, m.translation)
    if isinstance(m, AffineComposite):
        if not 0 < m.ratio < 1:
            raise DomainError(f"ratio {m.ratio} is not a contraction")
        fp = tuple(a / (1 - m.ratio) for a in m.translation)
        return fp[0] if len(fp) == 1 else fp
    if isinstance(m, CfReal):
        sys = CfRealSystem(FullTruncated(max(int(m.digit), 1)))
        if m.digit == 1 and not m.prefixed:
            raise DomainError("x -> 1/(1 + x) is not a uniform contraction on [0, 1]")
        m = compose_word(sys, [m])
    elif isinstance(m, CfComplex):
        if m.digit == 1 and not m.prefixed:
            raise DomainError("z -> 1/(1 + z) is not a uniform contraction on the disc")
        if complex(m.digit).real < 1:
            raise DomainError(f"digit {m.digit} does not give a map of the disc")
        sys = CfComplexSystem(Explicit(tuple({complex(m.digit), 1 + 0j})))
        m = compose_word(sys, [m])
    if not isinstance(m, MobiusComposite):
        raise TypeError(f"cannot take the fixed point of {m!r}")
    bounds = _complex_bounds(m.q_prev, m.q) if m.complex_digits else _real_bounds(m.q_prev, m.q)
    if not bounds.upper < 1:
        raise DomainError("map is not a uniform contraction on its domain")
    # fixed points solve q_prev x^2 + (q - p_prev) x - p = 0
    a, q, pp, p = (complex(v) for v in (m.q_prev, m.q, m.p_prev, m.p))
    b, c = q - pp, -p
    if a == 0:
        root = -c / b
    else:
        disc = cmath.sqrt(b * b - 4 * a * c)
        roots = ((-b + disc) / (2 * a), (-b - disc) / (2 * a))
        root = min(roots, key=lambda z: abs(z - 0.5))
    return root if m.complex_digits else root.real


def _gsub(x: GaussInt, y: GaussInt) -> GaussInt:
    return GaussInt(x.re - y.re, x.im - y.im)


def evaluate_point(system: System, word: Sequence, anchor):
    """``S_w(anchor)`` evaluated innermost map first."""
    maps = _normalize_word(system, word)
    if not system.contains(anchor):
        raise DomainError(f"anchor {anchor!r} is outside the domain")
    if isinstance(system, SimilaritySystem):
        x = np.atleast_1d(np.asarray(anchor, dtype=np.float64))
        for i in reversed(maps):
            x = system.ratio(i) * x + np.asarray(system.translation(i))
        return float(x[0]) if system.dim == 1 else tuple(float(v) for v in x)
    x = complex(anchor) if isinstance(system, CfComplexSystem) else float(anchor)
    for b in reversed(_raw_digits(maps)):
        x = 1 / (b + x)
    return x


# -- JSON -------------------------------------------------------------------


def system_to_json(system: System) -> dict:
    """JSON-ready dict describing ``system``."""
    if isinstance(system, SimilaritySystem):
        if isinstance(system.ratios, GeometricRatios):
            r = system.ratios
            ratios = {"type": "geometric", "scale": r.scale, "base": r.base, "start": r.start}
        else:
            ratios = list(system.ratios)
        out = {"kind": "similarity", "dim": system.dim, "side": system.side, "ratios": ratios}
        if system.translations is not None:
            out["translations"] = [list(t) for t in system.translations]
        return out
    return {"kind": system.ambient_kind, "digits": system.digits.to_json()}


def system_from_json(obj: dict | str) -> System:
    """Inverse of :func:`system_to_json`; also accepts a JSON string."""
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise UsageError(f"system is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict) or "kind" not in obj:
        raise UsageError("system JSON needs a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "cf-real":
            return CfRealSystem(digit_set_from_json(obj["digits"]))
        if kind == "cf-complex":
            return CfComplexSystem(digit_set_from_json(obj["digits"]))
        if kind == "similarity":
            r = obj["ratios"]
            if isinstance(r, dict):
                if r.get("type") != "geometric":
                    raise UsageError(f"unknown ratio family {r!r}")
                ratios = GeometricRatios(r.get("scale", 1.0), r.get("base", 0.5), r.get("start", 3))
            else:
                ratios = tuple(r)
            trans = obj.get("translations")
            return SimilaritySystem(
                ratios,
                None if trans is None else tuple(tuple(t) for t in trans),
                int(obj.get("dim", 1)),
                float(obj.get("side", 1.0)),
            )
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed system JSON: {exc}") from exc
    raise UsageError(f"unknown system kind {kind!r}")
