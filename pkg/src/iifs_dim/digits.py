"""Digit sets for restricted continued fractions.

A digit set ``I`` selects which partial quotients are allowed.  Real sets are
subsets of the positive integers, complex sets are Gaussian integers with
positive real part.  Every set enumerates its digits in a fixed order
(increasing modulus, ties broken by argument) so a truncation to the first
``n`` digits is well defined.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import UsageError

__all__ = [
    "DigitSet",
    "Explicit",
    "PowerFamily",
    "ComplexPowerFamily",
    "FullTruncated",
    "floor_power",
]


def floor_power(n: int, p: float) -> int:
    """Return ``floor(n**p)`` exactly for a positive integer ``n``."""
    if float(p).is_integer():
        return n ** int(p)
    v = float(n) ** p
    m = math.floor(v)
    r = round(v)
    if abs(v - r) <= 1e-12 * max(v, 1.0):
        # near an integer: settle it with exact arithmetic when p is a
        # short rational, otherwise trust the float
        frac = Fraction(p).limit_denominator(1000)
        if float(frac) == p and frac.denominator <= 1000:
            a, b = frac.numerator, frac.denominator
            m = r if r**b <= n**a else r - 1
    return m


def _floor_power_array(ns: np.ndarray, p: float) -> np.ndarray:
    x = ns.astype(np.float64)
    if float(p).is_integer():
        return x ** int(p)
    v = x**p
    vals = np.floor(v)
    fix = np.nonzero(np.abs(v - np.round(v)) <= 1e-12 * np.maximum(vals, 1.0))[0]
    for k in fix:
        vals[k] = floor_power(int(ns[k]), p)
    return vals


@lru_cache(maxsize=8)
def _complex_power_digits(p: float, R: float, n: int) -> np.ndarray:
    m = max(4, int(math.isqrt(n)) + 2)
    while True:
        ks = np.arange(1, m + 1, dtype=np.int64)
        vals = _floor_power_array(ks, p)
        z = (vals[:, None] + 1j * vals[None, :]).ravel()
        z = z[np.abs(z) >= R]
        order = np.lexsort((np.angle(z), np.abs(z)))
        z = z[order]
        # any digit with a coordinate index above m has modulus at least
        # floor((m+1)**p), so the first n are settled once they sit below it
        if len(z) >= n and abs(z[n - 1]) < floor_power(m + 1, p):
            out = z[:n].copy()
            out.setflags(write=False)
            return out
        m *= 2


def _gauss_key(z: complex) -> tuple[float, float]:
    return (abs(z), cmath.phase(z))


class DigitSet:
    """Common interface for digit sets."""

    is_complex: bool = False

    @property
    def is_finite(self) -> bool:
        return self.size is not None

    @property
    def size(self) -> int | None:
        return None

    def first(self, n: int) -> np.ndarray:
        """First ``n`` digits in enumeration order (float or complex array)."""
        raise NotImplementedError

    def first_exact(self, n: int) -> list:
        """First ``n`` digits as Python ints (real) or complex numbers."""
        arr = self.first(n)
        if self.is_complex:
            return [complex(int(z.real), int(z.imag)) for z in arr]
        return [int(v) for v in arr]

    def __contains__(self, b) -> bool:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Explicit(DigitSet):
    """A finite, explicitly listed digit set."""

    digits: tuple

    def __post_init__(self):
        if len(self.digits) == 0:
            raise UsageError("explicit digit set must be non-empty")
        cplx = any(isinstance(b, complex) for b in self.digits)
        norm = []
        for b in self.digits:
            if cplx:
                z = complex(b)
                if not (z.real.is_integer() and z.imag.is_integer()) or z.real < 1:
                    raise UsageError(f"complex digit {b!r} must be a Gaussian integer with real part >= 1")
                norm.append(z)
            else:
                if int(b) != b or b < 1:
                    raise UsageError(f"digit {b!r} must be a positive integer")
                norm.append(int(b))
        if len(set(norm)) != len(norm):
            raise UsageError("explicit digit set has repeated digits")
        key = _gauss_key if cplx else None
        object.__setattr__(self, "digits", tuple(sorted(norm, key=key)))

    @property
    def is_complex(self) -> bool:  # type: ignore[override]
        return isinstance(self.digits[0], complex)

    @property
    def size(self) -> int:
        return len(self.digits)

    def first(self, n: int) -> np.ndarray:
        dtype = np.complex128 if self.is_complex else np.float64
        return np.array(self.digits[:n], dtype=dtype)

    def first_exact(self, n: int) -> list:
        return list(self.digits[:n])

    def __contains__(self, b) -> bool:
        return b in self.digits

    def to_json(self) -> dict:
        if self.is_complex:
            return {"type": "explicit", "digits": [[int(z.real), int(z.imag)] for z in self.digits]}
        return {"type": "explicit", "digits": list(self.digits)}


@dataclass(frozen=True)
class PowerFamily(DigitSet):
    """Digits ``floor(n**p)`` for integers ``n >= l``.

    ``p = 1, l = 1`` (all positive integers) is accepted so that the
    finiteness parameter can be queried, but continued fraction systems
    require ``p > 1`` and ``l >= 2``.
    """

    p: float
    l: int = 2

    def __post_init__(self):
        if not self.p >= 1:
            raise UsageError(f"power family needs p >= 1, got {self.p}")
        if int(self.l) != self.l or self.l < 1:
            raise UsageError(f"power family needs an integer l >= 1, got {self.l}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "l", int(self.l))

    @property
    def proper(self) -> bool:
        """True when the family satisfies ``p > 1`` and ``l >= 2``."""
        return self.p > 1 and self.l >= 2

    def first(self, n: int) -> np.ndarray:
        ns = np.arange(self.l, self.l + n, dtype=np.int64)
        return _floor_power_array(ns, self.p)

    def first_exact(self, n: int) -> list:
        return [floor_power(k, self.p) for k in range(self.l, self.l + n)]

    def __contains__(self, b) -> bool:
        if int(b) != b or b < 1:
            return False
        b = int(b)
        k = max(self.l, int(round(b ** (1.0 / self.p))) - 2)
        while True:
            v = floor_power(k, self.p)
            if v == b:
                return True
            if v > b:
                return False
            k += 1

    def to_json(self) -> dict:
        return {"type": "power", "p": self.p, "l": self.l}


@dataclass(frozen=True)
class ComplexPowerFamily(DigitSet):
    """Gaussian digits ``floor(m**p) + floor(n**p) i`` outside the open disc of radius ``R``."""

    p: float
    R: float = 0.0
    is_complex = True

    def __post_init__(self):
        if not self.p > 1:
            raise UsageError(f"complex power family needs p > 1, got {self.p}")
        if not self.R >= 0:
            raise UsageError(f"radius must be non-negative, got {self.R}")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "R", float(self.R))

    def first(self, n: int) -> np.ndarray:
        if n <= 0:
            return np.zeros(0, dtype=np.complex128)
        return _complex_power_digits(self.p, self.R, int(n))

    def __contains__(self, b) -> bool:
        z = complex(b)
        if abs(z) < self.R:
            return False
        re, im = z.real, z.imag
        if not (re.is_integer() and im.is_integer()):
            return False
        fam = PowerFamily(self.p, 1)
        return int(re) in fam and int(im) in fam

    def to_json(self) -> dict:
        return {"type": "complex-power", "p": self.p, "R": self.R}


@dataclass(frozen=True)
class FullTruncated(DigitSet):
    """The digits ``1, 2, ..., N``."""

    N: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise UsageError(f"truncation N must be a positive integer, got {self.N}")
        object.__setattr__(self, "N", int(self.N))

    @property
    def size(self) -> int:
        return self.N

    def first(self, n: int) -> np.ndarray:
        return np.arange(1, min(n, self.N) + 1, dtype=np.float64)

    def first_exact(self, n: int) -> list:
        return list(range(1, min(n, self.N) + 1))

    def __contains__(self, b) -> bool:
        return int(b) == b and 1 <= b <= self.N

    def to_json(self) -> dict:
        return {"type": "full", "N": self.N}


def digit_set_from_json(obj: dict) -> DigitSet:
    """Build a digit set from its JSON form."""
    try:
        kind = obj["type"]
        if kind == "explicit":
            ds = []
            for b in obj["digits"]:
                if isinstance(b, (list, tuple)):
                    ds.append(complex(int(b[0]), int(b[1])))
                else:
                    ds.append(b)
            return Explicit(tuple(ds))
        if kind == "power":
            return PowerFamily(obj["p"], obj.get("l", 2))
        if kind == "complex-power":
            return ComplexPowerFamily(obj["p"], obj.get("R", 0.0))
        if kind == "full":
            return FullTruncated(obj["N"])
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed digit set {obj!r}: {exc}") from exc
    raise UsageError(f"unknown digit set type {obj.get('type')!r}")
