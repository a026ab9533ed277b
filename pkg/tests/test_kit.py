from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import b1, iter1_params, problem
from lfl3.errors import HypothesisFailed, ProfileUnsupported
from lfl3.kit import (
    NUM,
    ZeroData,
    _log_b,
    certify,
    check_main_inequality,
    check_zero_conditions,
    derive_params,
    nondegenerate_bound,
    zero_conditions_exact,
)
from lfl3.problem import MultStructure, sup_y
from lfl3.rigor import Const, Sym, eval_at, floor

INDEPENDENT = MultStructure("all_independent")


def within(x: float, target: float, rel: float) -> bool:
    return abs(x / target - 1) <= rel


# -- the recipe on the Fibonacci example ----------------------------------------------------------


def test_recipe_constants_for_fibonacci(ex1_params):
    c1, c2, c3 = (c.mid for c in ex1_params.c)
    assert 82.65 <= c1 <= 82.66
    assert 100.13 <= c2 <= 100.14
    assert 795.28 <= c3 <= 795.29


def test_k_grows_linearly_with_the_expected_coefficient(ex1, ex1_params):
    coef = sup_y(ex1, ex1_params.K / Sym("Y")).hi_float
    assert abs(coef - 221_945) <= 1


def test_third_coefficient_box_sides(ex1, ex1_params):
    T = [sup_y(ex1, t).hi_float for t in ex1_params.Tk]
    assert T[0] == 4577 and T[1] == 5544


def test_log_b_and_nondegenerate_bound_for_fibonacci(ex1, ex1_params):
    assert sup_y(ex1, ex1_params.log_b).hi_float < 54.58
    B2 = nondegenerate_bound(ex1_params, ex1).B2.hi_float
    assert within(B2, 42.68e6, 0.01)


def test_fibonacci_first_tuple_is_certified(ex1, ex1_params):
    assert check_main_inequality(ex1_params, ex1).holds
    assert check_zero_conditions(ex1_params, ex1).holds


def test_fibonacci_third_iteration_tuple_gives_the_final_level(ex1):
    kit = certify(ex1, Fraction("19.4e6"), "1.06", 104, "7.4", "9.4")
    assert kit is not None
    assert kit.bound.B2.hi_float <= 17.92e6 * 1.02


# -- the x^2 + 7 example ---------------------------------------------------------------------------


def test_x2plus7_first_tuple_is_certified(ex2, ex2_params):
    assert check_main_inequality(ex2_params, ex2).holds
    assert check_zero_conditions(ex2_params, ex2).holds
    assert sup_y(ex2, ex2_params.log_b).hi_float < 59.6


def test_x2plus7_box_sides_with_zero_height_variant(ex2_h2zero):
    p = iter1_params("ex2_h2zero")
    R = [sup_y(ex2_h2zero, r).hi_float for r in p.Rk]
    assert R[0] == 2299 and R[1] == 16_737
    assert within(sup_y(ex2_h2zero, p.K / Sym("Y")).hi_float, 231_600, 0.001)
    assert within(nondegenerate_bound(p, ex2_h2zero).B2.hi_float, 83.69e6, 0.01)
    assert sup_y(ex2_h2zero, p.log_b).hi_float < 59.6


def test_rounded_up_k_override_is_rejected(ex2_h2zero):
    # the recipe gives K = floor(231569.4 Y); 231600 Y lies above it
    with pytest.raises(HypothesisFailed):
        derive_params(ex2_h2zero, b1("ex2_h2zero"), "0.08", 106, 21, "5.5", k_override="floor(231600*Y)")
    p = derive_params(ex2_h2zero, b1("ex2_h2zero"), "0.08", 106, 21, "5.5", k_override="floor(231500*Y)")
    assert sup_y(ex2_h2zero, p.K / Sym("Y")).hi_float <= 231_500


def test_bundled_x2plus7_box_sides_differ_by_the_alpha2_height(ex2_params, ex2):
    # with h(alpha_2) = log(2)/2 the a_2 majorant grows, and so do the R_k
    R = [sup_y(ex2, r).hi_float for r in ex2_params.Rk]
    assert R[0] > 2299 and R[1] > 16_737


def test_k_override_above_the_recipe_value_is_rejected(ex2):
    with pytest.raises(HypothesisFailed):
        derive_params(ex2, b1("ex2"), "0.08", 106, 21, "5.5", k_override="floor(300000*Y)")


# -- hypotheses and failing tuples ------------------------------------------------------------------


def test_m_below_one_is_rejected(ex1):
    with pytest.raises(HypothesisFailed):
        derive_params(ex1, b1("ex1"), "0.75", 167, "0.5", 10)


def test_tiny_tuple_fails_the_main_inequality(ex1):
    p = derive_params(ex1, b1("ex1"), "0.75", 5, 1, 2)
    assert not check_main_inequality(p, ex1).holds
    assert certify(ex1, b1("ex1"), "0.75", 5, 1, 2) is None


def _ints_at(params, Y):
    env = {"Y": Y}
    ints = lambda t: tuple(int(eval_at(x, env).lo) for x in t)  # noqa: E731
    return ZeroData(ints(params.Rk), ints(params.Sk), ints(params.Tk), int(eval_at(params.K, env).lo), params.L, params.chi)


def test_halving_c3_breaks_only_the_third_box_condition(ex1, ex1_params):
    Y = 10**20
    data = _ints_at(ex1_params, Y)
    assert zero_conditions_exact(data, ex1.mult).holds
    a1, a2, a3 = ex1_params.a
    c3 = Const.of(ex1_params.c[2] / 2)
    half = lambda x: int(eval_at(floor(x), {"Y": Y}).lo)  # noqa: E731
    halved = ZeroData(
        data.Rk[:2] + (half(c3 * a2 * a3),),
        data.Sk[:2] + (half(c3 * a1 * a3),),
        data.Tk[:2] + (half(c3 * a1 * a2),),
        data.K,
        data.L,
        data.chi,
    )
    verdicts = {v.name: v.holds for v in zero_conditions_exact(halved, ex1.mult).conditions}
    assert verdicts.pop("box3 product > 3K^2L") is False
    assert all(verdicts.values())


def test_small_symmetric_boxes_satisfy_both_profiles():
    data = ZeroData((10,) * 3, (10,) * 3, (10,) * 3, 3, 5, Fraction(1, 10))
    assert zero_conditions_exact(data, INDEPENDENT).holds
    assert zero_conditions_exact(data, INDEPENDENT, "partial_degree", 2, 2).holds


def test_partial_degree_threshold_arithmetic():
    # 6 K1 K2 L = 120 for K1 = K2 = 2, L = 5: the third box 11^3 passes,
    # a box just below 120 fails
    ok = ZeroData((10, 10, 10), (10, 10, 10), (10, 10, 10), 3, 5, Fraction(1, 10))
    assert zero_conditions_exact(ok, INDEPENDENT, "partial_degree", 2, 2).holds
    bad = ZeroData((10, 10, 3), (10, 10, 4), (10, 10, 4), 3, 5, Fraction(1, 10))  # 4*5*5 = 100 < 120
    v = {c.name: c.holds for c in zero_conditions_exact(bad, INDEPENDENT, "partial_degree", 2, 2).conditions}
    assert v["box3 product > 6K1K2L"] is False
    edge = ZeroData((10, 10, 3), (10, 10, 4), (10, 10, 5), 3, 5, Fraction(1, 10))  # 4*5*6 = 120, not > 120
    v = {c.name: c.holds for c in zero_conditions_exact(edge, INDEPENDENT, "partial_degree", 2, 2).conditions}
    assert v["box3 product > 6K1K2L"] is False


def test_partial_degrees_out_of_range_are_rejected():
    data = ZeroData((10,) * 3, (10,) * 3, (10,) * 3, 3, 5, Fraction(1, 10))
    with pytest.raises(ProfileUnsupported):
        zero_conditions_exact(data, INDEPENDENT, "partial_degree", 3, 2)
    with pytest.raises(ProfileUnsupported):
        zero_conditions_exact(data, INDEPENDENT, "bogus")


def test_partial_degree_profile_returns_a_verdict_on_fibonacci(ex1, ex1_params):
    zc = check_zero_conditions(ex1_params, ex1, "partial_degree")
    assert zc.profile == "partial_degree" and len(zc.conditions) == 5
    assert isinstance(zc.holds, bool)


def test_log_b_formula_on_tiny_integers():
    # K = 2, R = S = T = 2, b = (1, 1, 1): both log arguments are (1 + 1)/2 = 1
    q = dict(R=2, S=2, T=2, K=2)
    got = _log_b(NUM, q, (1.0, 1.0, 1.0), 1, 1)
    assert abs(got - (-2 * math.log(2) + 11 / 3)) < 1e-12
    # exact log b: eta0 = zeta0 = 1 and the factorial product is 1!^1 = 1
    assert got >= 0.0


# -- monotonicity ----------------------------------------------------------------------------------


@settings(max_examples=8, deadline=None)
@given(st.floats(min_value=0.05, max_value=1.0))
def test_log_b_grows_with_the_coefficient_bound(shrink):
    p = problem("ex1")
    big, small = b1("ex1"), b1("ex1").hi_float * shrink
    hi = derive_params(p, big, "0.75", 167, 6, 10)
    lo = derive_params(p, Fraction(small), "0.75", 167, 6, 10)
    assert sup_y(p, lo.log_b).hi <= sup_y(p, hi.log_b).hi
