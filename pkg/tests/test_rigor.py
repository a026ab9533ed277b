from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfl3.errors import DomainViolation, ParseError, UndeclaredSymbol
from lfl3.rigor import const_value, eval_at, inf_over_domain, parse_expr, sup_over_domain
from lfl3.rigor import interval as iv
from lfl3.rigor.interval import CertScalar

# -- point evaluation --------------------------------------------------------------------------


def test_g_with_rst_equal_to_n_encloses_one_sixth():
    g = parse_expr("1/4 - N/(12*R*S*T)", ["N", "R", "S", "T"])
    v = eval_at(g, {"N": 1000, "R": 10, "S": 10, "T": 10})
    assert v.contains(Fraction(1, 6))
    assert float(v.width) < 1e-30


def test_rational_function_at_point_is_exact():
    e = parse_expr("(3*Y + 5)/(2*Y + 1)", ["Y"])
    v = eval_at(e, {"Y": 10})
    assert v.contains(Fraction(35, 21))


def test_log_of_constant_matches_high_precision_value():
    v = const_value(parse_expr("log(2.2*sqrt(7))"))
    with mpmath.workdps(60):
        ref = mpmath.log(mpmath.mpf("2.2") * mpmath.sqrt(7))
        assert v.contains(ref)
    assert abs(v.mid - 1.7614124) < 1e-7


def test_decimal_literals_are_exact():
    v = const_value(parse_expr("0.1 * 10"))
    assert v.contains(1)
    assert v.contains(Fraction(1)) and float(v.width) < 1e-35


def test_undeclared_symbol_is_rejected():
    with pytest.raises(UndeclaredSymbol):
        parse_expr("X + 1", ["Y"])


def test_parse_error_reports_the_offending_text():
    with pytest.raises(ParseError):
        parse_expr("log(2 +", [])


def test_log_of_nonpositive_interval_is_a_domain_violation():
    with pytest.raises(DomainViolation):
        iv.log(CertScalar(-1, 1))


# -- suprema over unbounded domains ----------------------------------------------------------------


def test_sup_of_decreasing_rational_function_is_tight():
    e = parse_expr("(3*Y + 5)/(2*Y + 1)", ["Y"])
    s = sup_over_domain(e, "Y", CertScalar("1e20"))
    assert s.hi >= mpmath.mpf(1.5)
    assert s.hi <= mpmath.mpf(1.5) + mpmath.mpf("1e-18")


def test_sup_of_identity_is_infinite():
    s = sup_over_domain(parse_expr("Y", ["Y"]), "Y", 2)
    assert not s.is_finite()


def test_inf_of_increasing_function_is_at_the_left_end():
    s = inf_over_domain(parse_expr("Y + 1/Y", ["Y"]), "Y", 2)
    assert s.lo <= 2.5 <= s.hi + 1e-30


def test_u_ratio_over_y_is_certified_near_the_reference_coefficient():
    # relation bound with a Y-linear numerator, divided by Y (quotient transform)
    e = parse_expr(
        "(876*Y + 1)*(202*Y + 1)/(0.08*sqrt(2300*(876*Y + 1)*(202*Y + 1)) - 876*Y)/Y", ["Y"]
    )
    s = sup_over_domain(e, "Y", CertScalar("17.4"))
    assert s.is_finite()
    assert abs(s.hi_float / 239.64 - 1) < 0.01


@settings(max_examples=60, deadline=None)
@given(st.floats(min_value=1.0, max_value=1e6), st.integers(min_value=0, max_value=5))
def test_sup_dominates_sampled_values(y0, k):
    e = parse_expr("(Y + 3)/(Y*Y + 1) + log(Y)/Y", ["Y"])
    s = sup_over_domain(e, "Y", 1)
    y = y0 * (1 + k)
    val = (y + 3) / (y * y + 1) + math.log(y) / y
    assert s.hi_float >= val * (1 - 1e-12)


# -- containment against a high-precision reference ---------------------------------------------

_TEMPLATES = [
    ("x*y + z", lambda x, y, z: x * y + z),
    ("(x - y)/(z*z + 1)", lambda x, y, z: (x - y) / (z * z + 1)),
    ("sqrt(x*x + y*y) - z", lambda x, y, z: mpmath.sqrt(x * x + y * y) - z),
    ("log(1 + x*x) * exp(y/8)", lambda x, y, z: mpmath.log(1 + x * x) * mpmath.exp(y / 8)),
    ("max(x, y) - min(y, z)", lambda x, y, z: max(x, y) - min(y, z)),
    ("(x + y + z)^3 / 7", lambda x, y, z: (x + y + z) ** 3 / 7),
    ("exp(-x*x) + pi*y", lambda x, y, z: mpmath.exp(-x * x) + mpmath.pi * y),
]


def test_random_evaluations_contain_the_100_digit_value():
    rng = np.random.default_rng(12345)
    parsed = [(parse_expr(t, ["x", "y", "z"]), f) for t, f in _TEMPLATES]
    n = 100_000
    vals = rng.uniform(-20, 20, size=(n, 3))
    picks = rng.integers(0, len(parsed), size=n)
    bad = 0
    with mpmath.workdps(100):
        for (x, y, z), k in zip(vals, picks):
            expr, ref_fn = parsed[k]
            # exact binary inputs so the reference is the same real number
            v = eval_at(expr, {"x": float(x), "y": float(y), "z": float(z)})
            ref = ref_fn(mpmath.mpf(float(x)), mpmath.mpf(float(y)), mpmath.mpf(float(z)))
            if not (v.lo <= ref <= v.hi):
                bad += 1
    assert bad == 0


@settings(max_examples=300, deadline=None)
@given(
    st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6),
    st.fractions(min_value=-1000, max_value=1000, max_denominator=10**6),
)
def test_arithmetic_encloses_exact_rationals(a, b):
    A, B = CertScalar(a), CertScalar(b)
    assert (A + B).contains(a + b)
    assert (A - B).contains(a - b)
    assert (A * B).contains(a * b)
    if b != 0:
        assert (A / B).contains(a / b)


@settings(max_examples=200, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1e6), st.floats(min_value=0, max_value=1e3))
def test_monotone_operations_respect_order(x, d):
    lo, hi = CertScalar(x), CertScalar(x + d)
    for fn in (iv.log, iv.sqrt, iv.exp if x + d < 500 else iv.sqrt):
        assert fn(lo).lo <= fn(hi).hi
    assert iv.floor(lo).lo <= iv.floor(hi).hi


def test_outward_rounding_keeps_one_third_inside():
    third = CertScalar(1) / 3
    with mpmath.workdps(80):
        assert third.lo < mpmath.mpf(1) / 3 < third.hi


def test_precision_context_restores_the_default():
    before = iv.get_precision()
    with iv.working_precision(256):
        assert iv.get_precision() == 256
        narrow = CertScalar(1) / 3
    assert iv.get_precision() == before
    assert narrow.width < (CertScalar(1) / 3).width
