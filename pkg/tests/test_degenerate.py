from __future__ import annotations

import dataclasses
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import iter1_params, problem
from lfl3.degenerate import (
    EXCLUDED,
    UNBOUNDED,
    DegenerateConfig,
    Inapplicable,
    LogSquareBound,
    URelationBounds,
    UnboundedProvider,
    best_case_bound,
    c1_case_bound,
    case_bound,
    degenerate_bound,
    eliminate_and_reduce,
    reconstruct_relation,
    two_log_lower_bound,
    u_bounds,
    u_bounds_from_ints,
)
from lfl3.kit import derive_params
from lfl3.errors import DenominatorNonpositive, NoConstantUBound, ProviderHypothesisFailed
from lfl3.problem import sup_y
from lfl3.rigor import Const, Sym, const_value
from lfl3.rigor.interval import CertScalar

from test_problem import toy

Y = Sym("Y")
EX1_FIXED = DegenerateConfig.fixed(10, "0.61")
EX2_FIXED = DegenerateConfig.fixed(180, "0.61")


def within(x: float, target: float, rel: float) -> bool:
    return abs(x / target - 1) <= rel


def sup(p, e) -> float:
    return sup_y(p, e).hi_float


# -- small-coefficient case -----------------------------------------------------------------------


def test_fibonacci_small_coefficient_case_is_excluded(ex1, ex1_params):
    c1 = c1_case_bound(ex1_params, ex1)
    assert isinstance(c1, Inapplicable)
    assert c1.cap.hi_float < 5600


def test_x2plus7_small_coefficient_case_is_excluded(ex2, ex2_params, ex2_h2zero):
    assert isinstance(c1_case_bound(ex2_params, ex2), Inapplicable)
    cap = c1_case_bound(iter1_params("ex2_h2zero"), ex2_h2zero)
    assert isinstance(cap, Inapplicable) and cap.cap.hi_float < 16_800


def test_cap_above_the_floor_is_a_live_bound(ex1_params):
    # same boxes, but a target floor below the cap
    low_floor = toy()
    cap = c1_case_bound(ex1_params, low_floor)
    assert not isinstance(cap, Inapplicable)
    assert cap.hi_float == 5544


# -- relation bounds ------------------------------------------------------------------------------


def test_fibonacci_relation_bounds(ex1, ex1_params):
    ub = u_bounds(ex1_params, ex1)
    assert const_value(ub.U1).hi_float == 65
    assert const_value(ub.U2).hi_float == 130
    assert within(sup(ex1, ub.U3 / Y), 49.87, 0.01)
    assert ub.constant == (True, True, False)


def test_x2plus7_relation_bounds_with_zero_height_variant(ex2_h2zero):
    ub = u_bounds(iter1_params("ex2_h2zero"), ex2_h2zero)
    assert within(sup(ex2_h2zero, ub.U1 / Y), 239.64, 0.01)
    assert const_value(ub.U2).hi_float == 328
    assert within(const_value(ub.U3).hi_float, 2735, 0.01)


def test_symmetric_integer_relation_bounds():
    assert u_bounds_from_ints(10, 10, 10, 21) == (Fraction(11),) * 3


def test_threshold_not_above_the_box_sides_is_rejected():
    with pytest.raises(DenominatorNonpositive):
        u_bounds_from_ints(10, 10, 10, 10)


# -- elimination ------------------------------------------------------------------------------------


def test_fibonacci_elimination_sizes(ex1, ex1_params):
    form = eliminate_and_reduce(ex1, u_bounds(ex1_params, ex1), 1)
    a1, a2 = form.sizes(10)
    assert sup(ex1, a1) <= 1368.2 * 1.02 and within(sup(ex1, a1), 1368.2, 0.02)
    assert sup(ex1, a2 / Y) <= 524 * 1.02 and within(sup(ex1, a2 / Y), 524, 0.02)
    assert form.kept == (2, 3)


def test_fibonacci_two_log_coefficient(ex1, ex1_params):
    form = eliminate_and_reduce(ex1, u_bounds(ex1_params, ex1), 1)
    lsb = two_log_lower_bound(form, 10, "0.61")
    assert within(sup(ex1, lsb.alpha / Y), 423_900, 0.02)
    assert abs(lsb.shift.mid - 4.687) < 0.01


def test_fibonacci_case_bounds(ex1, ex1_params):
    res = degenerate_bound(ex1_params, ex1, EX1_FIXED)
    first = next(r for r in res.eliminations if r.primary.eliminated_index == 1)
    assert within(first.primary.bound.hi_float, 34.86e6, 0.02)
    assert within(first.fallback.bound.hi_float, 39e6, 0.02)
    assert within(res.B3.hi_float, 39e6, 0.02)
    assert "C1 " + EXCLUDED in res.flags


def _x2plus7_hybrid():
    # relation bounds from the h(alpha_2) = 0 boxes with the true heights
    ub = u_bounds(iter1_params("ex2_h2zero"), problem("ex2_h2zero"))
    return problem("ex2"), ub


def test_x2plus7_two_log_data_with_reference_relation_bounds():
    p, ub = _x2plus7_hybrid()
    form = eliminate_and_reduce(p, ub, 2)
    a1, a2 = form.sizes(180)
    assert within(sup(p, a2), 2461.3, 0.02)
    assert sup(p, a1 / Y) <= (495.2 + 565.5 / 16.8) * 1.02
    lsb = two_log_lower_bound(form, 180, "0.61")
    assert within(sup(p, lsb.alpha / Y), 28_100, 0.02)
    assert abs(lsb.shift.mid - 4.185) < 0.01


def test_x2plus7_case_bounds_with_reference_relation_bounds():
    p, ub = _x2plus7_hybrid()
    main = best_case_bound(eliminate_and_reduce(p, ub, 2), EX2_FIXED).bound.hi_float
    zero = best_case_bound(eliminate_and_reduce(p, ub, 2, zero_u_case=True, fallback_index=3), EX2_FIXED).bound.hi_float
    assert within(main, 7.92e6, 0.02)
    assert within(zero, 54.2e6, 0.02)


def test_growing_relation_bound_cannot_be_eliminated(ex1, ex1_params):
    with pytest.raises(NoConstantUBound):
        eliminate_and_reduce(ex1, u_bounds(ex1_params, ex1), 3)


def test_zero_u_case_without_another_constant_bound_is_reported(ex1, ex1_params):
    ub = u_bounds(ex1_params, ex1)
    only_first = URelationBounds(ub.U1, ub.U3, ub.U3, ub.cM, ub.raw, (True, False, False), ub.exponents)
    with pytest.raises(NoConstantUBound):
        eliminate_and_reduce(ex1, only_first, 1, zero_u_case=True)


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.integers(-50, 50), min_size=3, max_size=3),
    st.lists(st.integers(-9, 9), min_size=2, max_size=2),
    st.integers(0, 2),
)
def test_eliminated_form_reproduces_the_original_relation(b, uv, e):
    # build u with u . b = 0 and u_e != 0, then check the exponent bookkeeping
    j, k = [i for i in range(3) if i != e]
    u = [0, 0, 0]
    u[j], u[k] = uv
    u[e] = 1
    b = list(b)
    # solve for b_e so that the relation holds (u_e = 1)
    b[e] = -(u[j] * b[j] + u[k] * b[k])
    kept, exps = reconstruct_relation(b, u, e)
    x = [Fraction(2), Fraction(3), Fraction(5)]  # stand-ins for the logarithms
    lhs = u[e] * sum(bi * xi for bi, xi in zip(b, x))
    rhs = sum(c * (ee * x[i] + ej * x[e]) for c, i, (ee, ej) in zip(kept, (j, k), exps))
    assert lhs == rhs


def test_unit_relation_keeps_the_remaining_coefficients():
    kept, exps = reconstruct_relation([4, 7, 4], [1, 0, -1], 0)
    assert kept == (7, 4)
    assert exps == ((1, 0), (1, 1))


# -- providers and combination -----------------------------------------------------------------------


def test_provider_without_a_bound_makes_the_case_unbounded(ex1, ex1_params):
    cfg = DegenerateConfig.fixed(10, "0.61", provider=UnboundedProvider())
    res = degenerate_bound(ex1_params, ex1, cfg)
    assert not res.B3.is_finite()
    assert UNBOUNDED in res.flags


def test_failed_provider_hypothesis_is_an_error(ex1, ex1_params):
    class Failing:
        name = "failing"

        def __call__(self, form, varrho, mu, cD):
            return LogSquareBound(None, None, CertScalar(0), False, "out of range")

    form = eliminate_and_reduce(ex1, u_bounds(ex1_params, ex1), 1)
    with pytest.raises(ProviderHypothesisFailed):
        two_log_lower_bound(form, 10, "0.61", Failing())


def test_case_bound_grows_with_the_relation_bound(ex1, ex1_params):
    ub = u_bounds(ex1_params, ex1)
    prev = 0.0
    for scale in (1, 2, 4, 8):
        grown = URelationBounds(
            Const.of(65 * scale), ub.U2, ub.U3, ub.cM, ub.raw, ub.constant, ub.exponents
        )
        form = eliminate_and_reduce(ex1, grown, 1)
        b = best_case_bound(form, EX1_FIXED).bound.hi_float
        assert b >= prev
        prev = b


def test_small_coefficient_cap_alone_bounds_the_target():
    # toy boxes with a threshold of 0, so no relation bound exists
    p = toy(p_min="10")
    params = dataclasses.replace(derive_params(p, 10**9, "1e-9", 5, 1, 2), cM=Const.of(0))
    res = degenerate_bound(params, p, DegenerateConfig.fixed(10, "0.61"))
    cap = c1_case_bound(params, p)
    assert not isinstance(cap, Inapplicable)
    assert res.B3.hi == cap.hi
    assert "no relation case" in res.flags


def test_bound_is_flagged_when_below_the_floor(ex1, ex1_params):
    res = degenerate_bound(ex1_params, ex1, EX1_FIXED)
    assert res.B3.hi_float > ex1.P_floor.hi_float or EXCLUDED in res.flags


def test_heuristic_only_mode_uses_one_elimination(ex1, ex1_params):
    cfg = DegenerateConfig.fixed(10, "0.61", try_all_eliminations=False)
    res = degenerate_bound(ex1_params, ex1, cfg)
    assert len(res.eliminations) == 1
    full = degenerate_bound(ex1_params, ex1, EX1_FIXED)
    assert full.B3.hi <= res.B3.hi


def test_unbounded_two_log_bound_gives_infinite_case_bound(ex1, ex1_params):
    form = eliminate_and_reduce(ex1, u_bounds(ex1_params, ex1), 1)
    lsb = LogSquareBound(None, None, CertScalar(0), True)
    assert not case_bound(form, lsb).is_finite()
