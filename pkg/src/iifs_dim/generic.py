"""Random-translation ensembles of similarity systems.

A realized system has maps ``S_i(x) = c_i x + t_i`` with ratios from a fixed
family accumulating only at 0 and translations drawn uniformly from the
window ``[0, c)^d``.  For almost every translation vector the attractor is
dense in a cube, so its box dimension equals ``d``.  The helpers here sample
such attractors and measure how densely they fill that cube.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .cover import _chord_bracket
from .errors import ContainmentError, DomainError, GuardError, UsageError
from .ifs import AffineComposite, GeometricRatios, Similarity, SimilaritySystem
from .pressure import DimBracket

__all__ = [
    "RandomSystemSpec",
    "DensityReport",
    "SeedResult",
    "GenericExperiment",
    "realize_system",
    "zero_translation_system",
    "fixed_point_lemma_check",
    "sample_attractor",
    "density_fraction",
    "window_box_counts",
    "default_scales",
    "generic_box_dim_experiment",
    "DEFAULT_MAPS",
    "GUARD_FACTOR",
]

#: maps realized by default; measured to give near-full density at 1/32 in the plane
DEFAULT_MAPS = 8192
#: minimum samples per finest cell, ``num_samples >= GUARD_FACTOR * delta_min^-d``
GUARD_FACTOR = 64
BATCH = 8192


@dataclass(frozen=True)
class RandomSystemSpec:
    ratios: GeometricRatios = field(default_factory=GeometricRatios)
    d: int = 1
    window: float = 1.0
    maps: int = DEFAULT_MAPS
    seed: int = 0

    def __post_init__(self):
        if not isinstance(self.ratios, GeometricRatios):
            raise UsageError("ratios must be a geometric family accumulating at 0")
        if int(self.d) != self.d or self.d < 1:
            raise UsageError(f"ambient dimension must be a positive integer, got {self.d}")
        if not 0 < self.window <= 1:
            raise UsageError(f"window side must lie in (0, 1], got {self.window}")
        if int(self.maps) != self.maps or self.maps < 1:
            raise UsageError(f"number of maps must be a positive integer, got {self.maps}")
        if not 0 <= int(self.seed) < 2**64:
            raise UsageError("seed must be a 64-bit unsigned integer")

    @property
    def side(self) -> float:
        return 1.0 + self.window

    def to_json(self) -> dict:
        r = self.ratios
        return {
            "ratios": {"type": "geometric", "scale": r.scale, "base": r.base, "start": r.start},
            "d": self.d,
            "window": self.window,
            "maps": self.maps,
            "seed": int(self.seed),
        }


def _check_containment(system: SimilaritySystem, window: float) -> None:
    side = 1.0 + window
    ts = system.translation_array()
    for i in range(system.size):
        c = system.ratio(i)
        if c * side > 1.0:
            raise ContainmentError(f"map {i}: ratio {c} does not fit [0, {side}]^d into [0, 1]^d")
        if np.any(ts[i] < 0) or np.any(ts[i] + c * side > side):
            raise ContainmentError(f"map {i}: translated image leaves [0, {side}]^d")


def realize_system(spec: RandomSystemSpec) -> SimilaritySystem:
    """Draw translations uniformly from ``[0, window)^d`` and build the system."""
    rng = np.random.default_rng(int(spec.seed))
    t = rng.random((spec.maps, spec.d)) * spec.window
    system = SimilaritySystem(spec.ratios, tuple(map(tuple, t)), dim=spec.d, side=spec.side)
    _check_containment(system, spec.window)
    return system


def zero_translation_system(spec: RandomSystemSpec) -> SimilaritySystem:
    """The same ratios with every translation zero; its attractor is ``{0}``."""
    t = tuple((0.0,) * spec.d for _ in range(spec.maps))
    return SimilaritySystem(spec.ratios, t, dim=spec.d, side=spec.side)


def fixed_point_lemma_check(g, u, q, delta: float) -> tuple[bool, bool]:
    """Test ``fix(g+u)`` near ``q`` both directly and through ``u``.

    ``g`` is a :class:`Similarity` or :class:`AffineComposite` contraction.
    Returns ``(|fix(g+u) - q| < delta, |u - (q - g(fix(g+u)))| < delta)``;
    the two always agree.
    """
    if isinstance(g, (Similarity, AffineComposite)):
        c, a = g.ratio, g.translation
    else:
        raise UsageError(f"expected a similarity, got {g!r}")
    if not 0 <= c < 1:
        raise DomainError(f"ratio {c} is not a contraction")
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    u = np.atleast_1d(np.asarray(u, dtype=np.float64))
    q = np.atleast_1d(np.asarray(q, dtype=np.float64))
    fix = (a + u) / (1.0 - c)
    g_fix = c * fix + a
    left = float(np.linalg.norm(fix - q)) < delta
    right = float(np.linalg.norm(u - (q - g_fix))) < delta
    return left, right


def _batch_points(c: np.ndarray, t: np.ndarray, anchor: np.ndarray, seed: int, b: int, depth: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(b,)))
    words = rng.integers(0, len(c), size=(BATCH, depth))
    x = np.broadcast_to(anchor, (BATCH, len(anchor))).copy()
    for k in range(depth - 1, -1, -1):
        w = words[:, k]
        x = c[w, None] * x + t[w]
    return x


def sample_attractor(
    system: SimilaritySystem,
    num_points: int,
    depth: int = 40,
    seed: int = 0,
    start: int = 0,
    anchor=None,
) -> np.ndarray:
    """Points ``S_w(anchor)`` for i.i.d. uniform words of length ``depth``.

    Point ``k`` depends only on ``(seed, k)``: words come in batches of
    :data:`BATCH`, each with its own stream split from ``seed``, so
    ``start`` selects a slice of the same infinite sequence.
    """
    if system.size is None:
        raise UsageError("sampling needs a finite system")
    if depth < 1 or num_points < 0 or start < 0:
        raise UsageError("need depth >= 1 and non-negative counts")
    c = system.ratio_array(system.size)
    t = system.translation_array()
    if anchor is None:
        anchor = np.full(system.dim, system.side / 2.0)
    anchor = np.atleast_1d(np.asarray(anchor, dtype=np.float64))
    stop = start + num_points
    chunks = []
    for b in range(start // BATCH, -(-stop // BATCH)):
        pts = _batch_points(c, t, anchor, seed, b, depth)
        lo = max(start - b * BATCH, 0)
        hi = min(stop - b * BATCH, BATCH)
        chunks.append(pts[lo:hi])
    if not chunks:
        return np.zeros((0, system.dim))
    return np.concatenate(chunks)


@dataclass(frozen=True)
class DensityReport:
    delta: float
    fraction_hit: float
    num_samples: int
    seed: int | None = None

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "fractionHit": self.fraction_hit,
            "numSamples": self.num_samples,
            "seed": self.seed,
        }


def _cells_per_side(delta: float, window: float) -> int:
    k = window / delta
    m = round(k)
    if m < 1 or abs(k - m) > 1e-9 * max(k, 1.0):
        raise DomainError(f"delta {delta} does not divide the window side {window}")
    return int(m)


def _window_cells(points: np.ndarray, z: np.ndarray, delta: float, window: float) -> np.ndarray:
    rel = points - z
    inside = np.all((rel >= 0) & (rel < window), axis=1)
    idx = np.floor(rel[inside] / delta).astype(np.int64)
    m = _cells_per_side(delta, window)
    np.minimum(idx, m - 1, out=idx)
    return np.unique(idx, axis=0)


def _as_cloud(points, d: int | None = None) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None] if d in (None, 1) else pts.reshape(-1, d)
    return pts


def density_fraction(points, z=None, delta: float = 1 / 32, window: float = 1.0, seed: int | None = None) -> DensityReport:
    """Fraction of the ``delta``-cells of ``z + [0, window)^d`` holding a point."""
    pts = _as_cloud(points, None if z is None else np.atleast_1d(z).size)
    d = pts.shape[1] if pts.size else (1 if z is None else np.atleast_1d(z).size)
    z = np.zeros(d) if z is None else np.atleast_1d(np.asarray(z, dtype=np.float64))
    m = _cells_per_side(delta, window)
    if pts.size == 0:
        return DensityReport(delta, 0.0, 0, seed)
    hit = len(_window_cells(pts, z, delta, window))
    return DensityReport(delta, hit / m**d, len(pts), seed)


def window_box_counts(points, scales: Sequence[float], z=None, window: float = 1.0) -> np.ndarray:
    """Occupied-cell counts of the cloud inside ``z + [0, window)^d``, one per scale."""
    pts = _as_cloud(points)
    z = np.zeros(pts.shape[1]) if z is None else np.atleast_1d(np.asarray(z, dtype=np.float64))
    return np.array([len(_window_cells(pts, z, s, window)) for s in scales], dtype=np.int64)


def default_scales(d: int, num_samples: int, window: float = 1.0, guard: float = GUARD_FACTOR) -> list[float]:
    """Dyadic scales from ``window`` down to the finest one the sample budget supports."""
    scales = [window]
    while num_samples >= guard * (window / (scales[-1] / 2)) ** d:
        scales.append(scales[-1] / 2)
    return scales


def _check_scales(scales: Sequence[float], d: int, num_samples: int, window: float, guard: float) -> None:
    if len(scales) < 3:
        raise GuardError("need at least 3 scales")
    lo, hi = min(scales), max(scales)
    if hi > window:
        raise DomainError("scales must not exceed the window side")
    if math.log10(hi / lo) < 1.5 - 1e-9:
        raise GuardError(f"scales span {math.log10(hi / lo):.2f} decades, need at least 1.5")
    need = guard * (window / lo) ** d
    if num_samples < need - 1e-9:
        raise GuardError(f"{num_samples} samples are too few for delta {lo:g}; need {math.ceil(need)} or coarser scales")


@dataclass(frozen=True)
class SeedResult:
    seed: int
    bracket: DimBracket
    counts: tuple
    density: DensityReport

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "bracket": self.bracket.to_json(),
            "counts": list(self.counts),
            "density": self.density.to_json(),
        }


@dataclass(frozen=True)
class GenericExperiment:
    spec: RandomSystemSpec
    scales: tuple
    num_samples: int
    slack: float
    density_threshold: float
    results: tuple

    @property
    def pass_fraction(self) -> float:
        """Fraction of seeds whose bracket lower end is at least ``d - slack``."""
        ok = [r.bracket.lower >= self.spec.d - self.slack for r in self.results]
        return sum(ok) / len(ok)

    @property
    def density_pass_fraction(self) -> float:
        ok = [r.density.fraction_hit >= self.density_threshold for r in self.results]
        return sum(ok) / len(ok)

    def to_json(self) -> dict:
        return {
            "spec": self.spec.to_json(),
            "scales": list(self.scales),
            "numSamples": self.num_samples,
            "slack": self.slack,
            "densityThreshold": self.density_threshold,
            "perSeed": [r.to_json() for r in self.results],
            "passFraction": self.pass_fraction,
            "densityPassFraction": self.density_pass_fraction,
        }


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("IIFS_DIM_THREADS", "1")))
    except ValueError:
        raise UsageError("IIFS_DIM_THREADS must be an integer")


def generic_box_dim_experiment(
    spec: RandomSystemSpec,
    scales: Sequence[float] | None = None,
    num_samples: int = 100_000,
    seeds: Sequence[int] = tuple(range(10)),
    slack: float | None = None,
    depth: int = 40,
    density_delta: float | None = None,
    density_threshold: float = 0.99,
    z=None,
    guard: float = GUARD_FACTOR,
) -> GenericExperiment:
    """Box-count slope brackets and density for an ensemble of seeds.

    Each seed realizes its own system (``spec`` with that seed) and samples
    ``num_samples`` points.  Counts are taken over the cells of
    ``z + [0, window)^d``; the bracket comes from chords among the finest
    half of the scales.  ``slack`` defaults to ``0.1 d`` and the density is
    measured at the finest scale unless ``density_delta`` is given.
    """
    d = spec.d
    scales = default_scales(d, num_samples, spec.window, guard) if scales is None else sorted(scales, reverse=True)
    _check_scales(scales, d, num_samples, spec.window, guard)
    slack = 0.1 * d if slack is None else float(slack)
    density_delta = min(scales) if density_delta is None else density_delta
    z = np.zeros(d) if z is None else np.atleast_1d(np.asarray(z, dtype=np.float64))
    seeds = [int(s) for s in seeds]
    if not seeds:
        raise UsageError("need at least one seed")

    def run(seed: int) -> SeedResult:
        system = realize_system(replace(spec, seed=seed))
        pts = sample_attractor(system, num_points=num_samples, depth=depth, seed=seed)
        counts = window_box_counts(pts, scales, z, spec.window)
        bracket = _chord_bracket(np.asarray(scales), counts)
        dens = density_fraction(pts, z, density_delta, spec.window, seed)
        return SeedResult(seed, bracket, tuple(int(c) for c in counts), dens)

    workers = _thread_count()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(run, seeds))
    else:
        results = [run(s) for s in seeds]
    return GenericExperiment(spec, tuple(scales), num_samples, slack, density_threshold, tuple(results))
