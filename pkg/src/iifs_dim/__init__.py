"""Dimension theory of infinitely generated attractors.

Pressure brackets for similarity and continued fraction systems, closed-form
intermediate dimension curves, a cover-cost estimator, box counting, and
random-translation ensemble experiments.
"""
from __future__ import annotations

from .cf import CfReport, cf_fixed_points, cf_report, cf_sample_points, cf_system, search_power_l
from .cover import (
    BoxCountSeries,
    LatticeInversion,
    SequenceSet,
    box_count,
    box_count_series,
    box_dim_regression,
    fit_dim_theta,
    lattice_cover_cost,
)
from .digits import ComplexPowerFamily, DigitSet, Explicit, FullTruncated, PowerFamily
from .emit import PlotSpec, Series, emit_csv, emit_svg
from .errors import (
    ContainmentError,
    DomainError,
    GridMismatchError,
    GuardError,
    IifsError,
    InvalidWordError,
    NoTransitionError,
    RegimeError,
    SaturationWarning,
    SearchExhaustedError,
    UsageError,
)
from .formulas import (
    DimCurve,
    assouad_box_lower_bound,
    banaji_lower_bound,
    combine_max,
    continuity_at_zero_check,
    fbm_image_dims,
    holder_bounds,
    lattice_curve,
    lattice_dim_theta,
    phase_transition_theta,
    seq_curve,
    seq_dim_theta,
    slope_breaks,
    theta_grid,
)
from .generic import (
    DensityReport,
    RandomSystemSpec,
    density_fraction,
    fixed_point_lemma_check,
    generic_box_dim_experiment,
    realize_system,
    sample_attractor,
)
from .ifs import (
    CfComplexSystem,
    CfRealSystem,
    GeometricRatios,
    Similarity,
    SimilaritySystem,
    compose_word,
    evaluate_point,
    fixed_point,
    system_from_json,
    system_to_json,
    word_norm_bounds,
)
from .pressure import (
    DimBracket,
    finiteness_parameter,
    hausdorff_bracket,
    phi_level,
    pressure_estimate,
    similarity_h,
)

__version__ = "0.1.0"
