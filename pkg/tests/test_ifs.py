from __future__ import annotations

import json
import math
from fractions import Fraction

import numpy as np
import pytest

from iifs_dim.digits import ComplexPowerFamily, Explicit, FullTruncated, PowerFamily
from iifs_dim.errors import DomainError, InvalidWordError, UsageError
from iifs_dim.ifs import (
    CfComplex,
    CfComplexSystem,
    CfReal,
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

from oracles import cf_composite_exact, derivative_extrema


def test_similarity_composition():
    s = SimilaritySystem((0.5,))
    comp = compose_word(s, [0, 0])
    assert comp.ratio == 0.25
    assert comp.translation == (0.0,)


def test_similarity_composition_with_translations():
    s = SimilaritySystem((0.5, 0.25), ((0.1,), (0.5,)))
    comp = compose_word(s, [0, 1])
    # S_0(S_1(x)) = 0.5 (0.25 x + 0.5) + 0.1
    assert comp.ratio == 0.125
    assert comp.translation == pytest.approx((0.35,))


def test_cf_word_2_2_continuants():
    s = CfRealSystem(Explicit((2, 3)))
    comp = compose_word(s, [2, 2])
    assert (comp.q_prev, comp.q) == (2, 5)
    assert (comp.p_prev, comp.p) == (1, 2)
    for x in (0.0, 0.3, 1.0):
        assert comp(x) == pytest.approx((2 + x) / (5 + 2 * x), abs=1e-15)


def test_cf_single_digit():
    comp = compose_word(CfRealSystem(Explicit((3,))), [3])
    assert comp.q == 3
    assert comp(0.5) == pytest.approx(1 / 3.5)


def test_compose_matches_matrix_oracle():
    s = CfRealSystem(FullTruncated(7))
    for word in ([2, 3, 7], [5, 5, 5, 5], [7, 2, 4, 6, 3]):
        comp = compose_word(s, word)
        a, b, c, d = cf_composite_exact(word)
        assert (comp.p_prev, comp.p, comp.q_prev, comp.q) == (a, b, c, d)


def test_deep_words_stay_exact():
    s = CfRealSystem(Explicit((2, 3)))
    comp = compose_word(s, [3] * 60)
    assert isinstance(comp.q, int)
    assert comp.q > 2**64
    assert comp.p_prev * comp.q - comp.p * comp.q_prev in (1, -1)


def test_invalid_word():
    s = CfRealSystem(Explicit((2, 3)))
    with pytest.raises(InvalidWordError):
        compose_word(s, [4])
    with pytest.raises(InvalidWordError):
        compose_word(s, [])
    with pytest.raises(InvalidWordError):
        compose_word(SimilaritySystem((0.5,)), [1])


def test_digit_one_only_prefixed():
    s = CfRealSystem(Explicit((1, 2)))
    with pytest.raises(InvalidWordError):
        compose_word(s, [1])
    comp = compose_word(s, [CfReal(1, prefixed=True)])
    # 1/(1 + 1/(1 + x))
    assert comp(0.0) == pytest.approx(0.5)


def test_norm_bounds_examples():
    s = CfRealSystem(Explicit((2, 3)))
    b = word_norm_bounds(s, [2, 2])
    assert b.lower == pytest.approx(1 / 49, abs=0)
    assert b.upper == pytest.approx(1 / 25, abs=0)
    b = word_norm_bounds(s, [2])
    assert (b.lower, b.upper) == (1 / 9, 1 / 4)
    b = word_norm_bounds(SimilaritySystem((1 / 3, 1 / 3)), [0, 1])
    assert b.lower == b.upper == pytest.approx(1 / 9)


@pytest.mark.parametrize("word", [[2], [2, 2], [3, 2, 5], [5, 4, 3, 2]])
def test_norm_bounds_match_dense_sampling(word):
    b = word_norm_bounds(CfRealSystem(FullTruncated(5)), word)
    lo, hi = derivative_extrema(word)
    assert b.lower == pytest.approx(lo, rel=1e-5)
    assert b.upper == pytest.approx(hi, rel=1e-5)


def test_complex_bounds_enclose_samples():
    s = CfComplexSystem(Explicit((2 + 0j, 2 + 1j, 3 - 1j)))
    word = [2 + 1j, 3 - 1j, 2 + 0j]
    b = word_norm_bounds(s, word)
    comp = compose_word(s, word)
    q_prev, q = complex(comp.q_prev), complex(comp.q)
    th = np.linspace(0, 2 * np.pi, 2001)
    rs = np.linspace(0, 0.5, 101)
    z = 0.5 + rs[:, None] * np.exp(1j * th[None, :])
    deriv = 1 / np.abs(q_prev * z + q) ** 2
    assert b.lower <= deriv.min() * (1 + 1e-12)
    assert deriv.max() <= b.upper * (1 + 1e-12)
    # the disc bounds are attained on the boundary
    assert deriv.min() == pytest.approx(b.lower, rel=1e-4)
    assert deriv.max() == pytest.approx(b.upper, rel=1e-4)


def test_fixed_points():
    assert fixed_point(Similarity(0.5, (0.3,))) == pytest.approx(0.6)
    assert fixed_point(Similarity(0.25)) == 0.0
    assert fixed_point(CfReal(2)) == pytest.approx(math.sqrt(2) - 1, abs=1e-14)
    assert fixed_point(CfReal(1, prefixed=True)) == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-14)
    z = fixed_point(CfComplex(2 + 0j))
    assert abs(z - 1 / (2 + z)) < 1e-14


def test_fixed_point_non_contraction():
    with pytest.raises(DomainError):
        fixed_point(CfReal(1))


def test_evaluate_point_examples():
    s = CfRealSystem(Explicit((2,)))
    x = evaluate_point(s, [2] * 20, 0.0)
    assert abs(x - (math.sqrt(2) - 1)) < 1e-8
    sim = SimilaritySystem((0.5,))
    assert evaluate_point(sim, [0] * 10, 1.0) == 2.0**-10
    s5 = CfRealSystem(FullTruncated(5))
    assert evaluate_point(s5, [3], 0.25) == 1 / (3 + 0.25)


def test_evaluate_point_anchor_outside():
    with pytest.raises(DomainError):
        evaluate_point(CfRealSystem(Explicit((2,))), [2], 1.5)
    with pytest.raises(DomainError):
        evaluate_point(CfComplexSystem(Explicit((2 + 0j,))), [2 + 0j], 1j)


def test_evaluate_matches_composite_exactly():
    s = CfRealSystem(FullTruncated(9))
    word = [9, 4, 2, 7]
    comp = compose_word(s, word)
    a, b, c, d = cf_composite_exact(word)
    x = Fraction(1, 3)
    assert comp(x) == float((a * x + b) / (c * x + d))


def test_invariant_interval():
    lo, hi = CfRealSystem(Explicit((1, 2))).invariant_interval()
    # [0; 2, 1, 2, 1, ...] and [0; 1, 2, 1, 2, ...]
    assert lo == pytest.approx((math.sqrt(3) - 1) / 2, abs=1e-11)
    assert hi == pytest.approx(math.sqrt(3) - 1, abs=1e-11)
    assert CfRealSystem(PowerFamily(2, 2)).invariant_interval() == (0.0, pytest.approx(0.25))


def test_rewritten_alphabet():
    s = CfRealSystem(Explicit((1, 2, 3)))
    assert s.rewritten and s.size == 5
    assert s.alphabet() == [CfReal(1, True), CfReal(2), CfReal(2, True), CfReal(3), CfReal(3, True)]
    assert not CfRealSystem(Explicit((2, 3))).rewritten


def test_system_validation():
    with pytest.raises(UsageError):
        SimilaritySystem((1.0,))
    with pytest.raises(UsageError):
        CfRealSystem(PowerFamily(1.0, 1))
    with pytest.raises(UsageError):
        CfRealSystem(ComplexPowerFamily(2))
    with pytest.raises(UsageError):
        CfComplexSystem(Explicit((2, 3)))


@pytest.mark.parametrize(
    "system",
    [
        CfRealSystem(PowerFamily(2.0, 5)),
        CfRealSystem(Explicit((1, 2))),
        CfComplexSystem(ComplexPowerFamily(2.0, 10.0)),
        CfComplexSystem(Explicit((2 + 1j, 3 + 0j))),
        SimilaritySystem((0.25, 0.5), ((0.0,), (0.5,))),
        SimilaritySystem(GeometricRatios(1.0, 0.5, 2)),
        SimilaritySystem(GeometricRatios(), ((0.1, 0.2),) * 3, dim=2, side=2.0),
    ],
)
def test_json_round_trip(system):
    obj = system_to_json(system)
    text = json.dumps(obj)
    assert system_from_json(text) == system
    assert system_to_json(system_from_json(obj)) == obj


def test_json_errors():
    with pytest.raises(UsageError):
        system_from_json("{not json")
    with pytest.raises(UsageError):
        system_from_json({"kind": "nope"})
    with pytest.raises(UsageError):
        system_from_json({"kind": "cf-real"})


def test_family_system_with_translations_keeps_tiny_ratios():
    s = SimilaritySystem(GeometricRatios(), tuple((0.0,) for _ in range(2000)))
    assert s.size == 2000
    logs = s.log_ratio_array(2000)
    assert logs[-1] == pytest.approx((3 + 1999) * math.log(0.5))
    with pytest.raises(InvalidWordError):
        s.ratio(2000)
