from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from behametric.values import (
    EXACT,
    INF,
    ConfigurationError,
    NumericMode,
    TOP_INF,
    TOP_ONE,
    TopBound,
    Value,
    add_ext,
    dist_e,
    format_magnitude,
    inf_fin,
    parse_magnitude,
    pth_power,
    pth_root,
    scale,
    sup_fin,
    top,
    values_close,
    zero,
)


def v1(q):
    return Value(F(q), TOP_ONE)


def vi(q):
    return Value(INF if q == "inf" else F(q), TOP_INF)


class TestDistE:
    def test_finite(self):
        assert dist_e(v1("3/10"), v1("7/10")) == v1("2/5")

    def test_inf_inf_is_zero(self):
        assert dist_e(vi("inf"), vi("inf")) == zero(TOP_INF)

    def test_finite_to_inf(self):
        assert dist_e(vi(5), vi("inf")) == Value(INF, TOP_INF)

    def test_mixed_bounds_rejected(self):
        with pytest.raises(ConfigurationError):
            dist_e(v1("1/2"), vi("1/2"))


class TestAddExt:
    def test_finite(self):
        assert add_ext(v1("1/2"), v1("1/4")) == v1("3/4")

    def test_absorbs_infinity(self):
        assert add_ext(vi(3), vi("inf")) == Value(INF, TOP_INF)

    def test_zero_identity(self):
        assert add_ext(zero(TOP_ONE), v1("2/3")) == v1("2/3")

    def test_clamp(self):
        assert add_ext(v1("3/4"), v1("3/4"), clamp=True) == v1(1)
        with pytest.raises(ConfigurationError):
            add_ext(v1("3/4"), v1("3/4"))


class TestSupInf:
    def test_sup(self):
        assert sup_fin([v1(0), v1("1/2"), v1("1/3")]) == v1("1/2")

    def test_inf_singleton(self):
        assert inf_fin([vi("inf")]) == Value(INF, TOP_INF)

    def test_identity(self):
        assert sup_fin([v1("1/7")]) == v1("1/7")

    def test_empty_rejected(self):
        with pytest.raises(ConfigurationError):
            sup_fin([])


class TestValueInvariants:
    def test_above_top_rejected(self):
        with pytest.raises(ConfigurationError):
            Value(F(2), TOP_ONE)

    def test_negative_rejected(self):
        with pytest.raises(ConfigurationError):
            Value(F(-1, 2), TOP_ONE)

    def test_infinity_needs_infinite_bound(self):
        with pytest.raises(ConfigurationError):
            Value(INF, TOP_ONE)

    def test_float_marks_inexact(self):
        v = Value(0.5, TOP_ONE)
        assert not v.is_exact
        assert v1("1/2").is_exact

    def test_ordering_inf_greatest(self):
        assert vi(1000) < Value(INF, TOP_INF)

    def test_finite_top_positive(self):
        with pytest.raises(ConfigurationError):
            TopBound.finite(0)


grid_one = st.fractions(min_value=0, max_value=1, max_denominator=50)
mag_inf = st.one_of(
    st.just(INF), st.fractions(min_value=0, max_denominator=50)
)


@given(grid_one, grid_one, grid_one)
def test_dist_e_is_a_pseudometric_on_finite_values(a, b, c):
    va, vb, vc = v1(a), v1(b), v1(c)
    assert dist_e(va, vb) == dist_e(vb, va)
    assert dist_e(va, va).is_zero
    assert dist_e(va, vc) <= add_ext(dist_e(va, vb), dist_e(vb, vc), clamp=True)


@given(mag_inf, mag_inf, mag_inf)
def test_dist_e_triangle_with_extended_values(a, b, c):
    va, vb, vc = vi(a) if a is not INF else vi("inf"), None, None
    va = Value(a, TOP_INF)
    vb = Value(b, TOP_INF)
    vc = Value(c, TOP_INF)
    assert dist_e(va, vb) == dist_e(vb, va)
    assert dist_e(va, vc) <= add_ext(dist_e(va, vb), dist_e(vb, vc))


@given(mag_inf)
def test_magnitude_format_parse_round_trip(m):
    assert parse_magnitude(format_magnitude(m)) == m


@given(grid_one, grid_one)
def test_nonexpansiveness_of_distance_to_a_point(a, b):
    # d_e(a, .) moves by at most the distance between its two arguments
    anchor = v1("1/3")
    lhs = dist_e(dist_e(anchor, v1(a)), dist_e(anchor, v1(b)))
    assert lhs <= dist_e(v1(a), v1(b))


class TestRoots:
    def test_perfect_power_is_exact(self):
        v = pth_root(Value(F(1, 4), TOP_ONE), 2)
        assert v.is_exact and v == v1("1/2")

    def test_irrational_marked_inexact(self):
        v = pth_root(Value(F(1, 2), TOP_ONE), 2)
        assert not v.is_exact
        assert abs(v.as_float() - 0.5**0.5) < 1e-12

    def test_power_inverts_root(self):
        v = pth_power(pth_root(Value(F(8, 27), TOP_INF), 3), 3)
        assert v == Value(F(8, 27), TOP_INF)


class TestModes:
    def test_exact_vs_float_agreement(self):
        exact = dist_e(v1("1/3"), v1("2/3"))
        approx = dist_e(Value(1 / 3, TOP_ONE), Value(2 / 3, TOP_ONE))
        assert values_close(exact, approx, NumericMode.approx(1e-9))

    def test_exact_mode_exact_compare(self):
        assert values_close(v1("1/3"), v1("1/3"), EXACT)
        assert not values_close(v1("1/3"), v1("1/3") if False else v1("2/3"), EXACT)

    def test_bad_tolerance(self):
        with pytest.raises(ConfigurationError):
            NumericMode.approx(0.0)


def test_scale_infinity():
    assert scale(Value(INF, TOP_INF), F(1, 2)).is_infinite


def test_top_of_bounds():
    assert top(TOP_ONE) == v1(1)
    assert top(TOP_INF).is_infinite
