from __future__ import annotations

import numpy as np
import pytest

from iifs_dim.errors import DomainError, GridMismatchError, NoTransitionError, RegimeError
from iifs_dim.formulas import (
    DimCurve,
    assouad_box_lower_bound,
    banaji_lower_bound,
    combine_max,
    continuity_at_zero_check,
    fbm_image_dims,
    holder_bounds,
    holder_regime_ok,
    lattice_curve,
    lattice_dim_theta,
    phase_transition_theta,
    seq_curve,
    seq_dim_theta,
    slope_breaks,
    theta_grid,
    zero_curve,
)
from iifs_dim.pressure import DimBracket


def test_seq_examples():
    assert seq_dim_theta(1, 1) == 0.5
    assert seq_dim_theta(2, 0) == 0.0
    assert seq_dim_theta(2, 0.5) == pytest.approx(0.2)


def test_lattice_examples():
    assert lattice_dim_theta(2, 2, 1) == pytest.approx(2 / 3)
    assert lattice_dim_theta(1, 2, 1) == 1.0
    assert lattice_dim_theta(3.7, 5, 0) == 0.0


def test_theta_out_of_range():
    with pytest.raises(DomainError):
        seq_dim_theta(2, 1.5)
    with pytest.raises(DomainError):
        lattice_dim_theta(2, 1, -0.1)


def test_theta_grid():
    g = theta_grid()
    assert len(g) == 513 and g[0] == 0 and g[-1] == 1
    g2 = theta_grid(extra=(6 / 7,))
    assert 6 / 7 in g2 and np.all(np.diff(g2) > 0)


def test_combine_max_examples():
    g = theta_grid()
    c = combine_max(DimBracket(0.3, 0.3), seq_curve(2, g))
    assert c.bracket(len(g) - 1).lower == pytest.approx(1 / 3)
    assert c.bracket(0).upper == 0.3 and c.bracket(0).lower == 0.3
    base = seq_curve(2, g)
    same = combine_max(DimBracket(0, 0), base)
    np.testing.assert_array_equal(same.upper, base.upper)
    full = combine_max(DimBracket(1, 1), base)
    assert np.all(full.upper == 1)


def test_combine_max_grid_mismatch():
    with pytest.raises(GridMismatchError):
        combine_max(DimBracket(0.3, 0.3), seq_curve(2, theta_grid(9)), seq_curve(2, theta_grid(17)))


def test_combine_max_keeps_brackets():
    c = combine_max(DimBracket(0.2, 0.25), seq_curve(2, theta_grid(5)))
    assert np.all(c.lower <= c.upper)
    assert c.lower[0] == 0.2 and c.upper[0] == 0.25


def test_phase_transition():
    assert phase_transition_theta(0.25, 2, 1) == pytest.approx(2 / 3)
    for h in (0.05, 0.1, 0.3):
        assert phase_transition_theta(h, 2, 1) == pytest.approx(2 * h / (1 - h))
    assert phase_transition_theta(1e-12, 2, 1) == pytest.approx(0, abs=1e-11)
    with pytest.raises(NoTransitionError):
        phase_transition_theta(0.4, 2, 1)


def test_assouad_box_bound_examples():
    assert banaji_lower_bound(1.0, 2.0, 0.7) == pytest.approx(0.7)
    assert banaji_lower_bound(0.5, 2, 1) == pytest.approx(2 / 3)
    g = theta_grid()
    for p, d in ((1, 1), (2, 2), (3.5, 3)):
        np.testing.assert_allclose(banaji_lower_bound(g, d, d / (p + 1)), lattice_dim_theta(p, d, g), atol=1e-12)
    assert banaji_lower_bound is assouad_box_lower_bound


def test_holder_example():
    rep = holder_bounds(2, 2.9, 0.26, 0.22)
    assert rep.bound_intermediate == pytest.approx((2 - 0.44 + 0.638) / 2.9, abs=1e-12)
    assert rep.bound_box == pytest.approx(3 / 3.9)
    assert rep.bound_hausdorff == pytest.approx(0.22 / 0.26)
    assert rep.bound_intermediate < rep.bound_box < rep.bound_hausdorff
    assert rep.theta_opt == pytest.approx(2.9 * 0.22 / 0.78)
    assert rep.argmin_theta == pytest.approx(rep.theta_opt, abs=1 / 512)


def test_holder_regime_names_inequality():
    with pytest.raises(RegimeError, match="p < q"):
        holder_bounds(2, 1.5, 0.26, 0.22)
    with pytest.raises(RegimeError, match="h_q < 1/\\(q\\+1\\)"):
        holder_bounds(2, 2.9, 0.26, 0.3)
    assert not holder_regime_ok(2, 2.9, 0.2, 0.22)


def test_fbm_examples():
    r = fbm_image_dims(0.3, 0.5, 1)
    assert r.hausdorff_image == pytest.approx(0.6) and r.box_image_strictly_below_ambient and not r.all_equal_ambient
    r = fbm_image_dims(0.3, 0.2, 1)
    assert r.all_equal_ambient and r.hausdorff_image == 1.0
    r = fbm_image_dims(0.8, 0.5, 2)
    assert r.hausdorff_image == pytest.approx(1.6) and r.box_image_strictly_below_ambient


def test_fbm_continuous_at_threshold():
    for h, amb in ((0.3, 1), (0.8, 2)):
        thr = h / amb
        below = fbm_image_dims(h, thr, amb).hausdorff_image
        above = fbm_image_dims(h, np.nextafter(thr, 1), amb).hausdorff_image
        assert below == amb
        assert above == pytest.approx(amb, rel=1e-12)


def test_continuity_examples():
    g = theta_grid()
    for h in (0.0, 0.1, 0.3, 0.45):
        c = combine_max(DimBracket(h, h), seq_curve(2, g))
        assert continuity_at_zero_check(c, DimBracket(h, h))
    const = DimCurve(g, np.full_like(g, 0.5), np.full_like(g, 0.5), "constant")
    assert not continuity_at_zero_check(const, DimBracket(0.3, 0.3))
    assert continuity_at_zero_check(lattice_curve(2, 2, g), DimBracket(0, 0))


def test_slope_breaks_single_transition():
    g = theta_grid(extra=(6 / 7,))
    c = combine_max(DimBracket(0.3, 0.3), seq_curve(2, g))
    assert slope_breaks(c) == [pytest.approx(6 / 7)]
    assert slope_breaks(seq_curve(2, g)) == []
    assert slope_breaks(zero_curve(g)) == []


def test_curve_arrays_read_only():
    c = seq_curve(2, theta_grid(5))
    with pytest.raises(ValueError):
        c.upper[0] = 1.0
