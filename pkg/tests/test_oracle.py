from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lfl3.errors import HypothesisFailed, ScaleExceeded
from lfl3.oracle import (
    factorial_bound_check,
    factorial_sum_log,
    interpolation_count_check,
    interpolation_count_worst,
    plane_check_three,
    plane_check_two,
    plane_count_bruteforce,
    projection_check,
    random_plane,
    run_sweeps,
    theta_bruteforce,
    theta_lower_bound,
    theta_lower_bound_exact,
)

# -- weight sums -----------------------------------------------------------------------------------


def test_single_pair_has_zero_weight():
    assert theta_bruteforce((3, 1)) == 0
    assert theta_bruteforce((0, 0)) == 0


def test_closed_form_is_exact_at_a_full_layer():
    assert theta_bruteforce((2, 6)) == 8
    assert theta_lower_bound_exact(2, 6) == 8


def test_closed_form_accepts_the_boundary_count():
    assert theta_lower_bound((2, 3)).hi <= theta_bruteforce((2, 3))


def test_closed_form_below_the_minimum():
    assert theta_lower_bound((4, 30)).hi <= theta_bruteforce((4, 30))


def test_closed_form_outside_its_range_is_rejected():
    with pytest.raises(HypothesisFailed):
        theta_lower_bound_exact(3, 5)


def test_oversized_theta_query_is_refused():
    with pytest.raises(ScaleExceeded):
        theta_bruteforce((3, 20_000))


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 8), st.integers(0, 200))
def test_closed_form_never_exceeds_the_minimum(K0, extra):
    I = K0 * (K0 + 1) // 2 + extra
    assert theta_lower_bound_exact(K0, I) <= theta_bruteforce((K0, I))


# -- interpolation count inequality ----------------------------------------------------------------


@pytest.mark.parametrize("K,L", [(3, 5), (8, 12)])
def test_count_inequality_holds(K, L):
    assert interpolation_count_check(K, L)


def test_count_inequality_has_about_eleven_percent_room_at_the_corner():
    # the tightest point is I = N with LHS/RHS = 164/148
    holds, I, _ = interpolation_count_worst(3, 5)
    assert holds and I == 3 * 4 * 5 // 2
    assert interpolation_count_check(3, 5, Fraction("1.10"))
    assert not interpolation_count_check(3, 5, Fraction("1.11"))


def test_count_inequality_range_is_capped():
    with pytest.raises(ScaleExceeded):
        interpolation_count_check(9, 5)


# -- factorial product -----------------------------------------------------------------------------


@pytest.mark.parametrize("K", [2, 3, 500])
def test_factorial_bound_holds(K):
    assert factorial_bound_check(K)


def test_factorial_sum_matches_lgamma():
    K = 40
    ref = 12 / (K * (K - 1) * (K + 1)) * sum((K - k) * math.lgamma(k + 1) for k in range(K))
    assert abs(factorial_sum_log(K).mid - ref) < 1e-12


# -- lattice points on planes ----------------------------------------------------------------------


def test_plane_counts_on_small_boxes():
    assert plane_count_bruteforce(1, 1, 1, 0, 10, 10, 10) == 1
    # 1*x + 2*y + 3*z = 6 in [0,10]^3
    assert plane_count_bruteforce(1, 2, 3, 6, 10, 10, 10) == 7
    chk = plane_check_two(2, 3, 6, 5, 9, 9)
    assert chk.M == 12 and chk.part_a and chk.part_b


def test_plane_count_brute_force_agrees_with_a_loop():
    rng = random.Random(5)
    for _ in range(200):
        A, B, C, Dv, X, Y, Z = random_plane(rng)
        loop = sum(
            1 for x in range(X + 1) for y in range(Y + 1) for z in range(Z + 1) if A * x + B * y + C * z == Dv
        )
        assert plane_count_bruteforce(A, B, C, Dv, X, Y, Z) == loop


def test_plane_hypotheses_are_enforced():
    with pytest.raises(HypothesisFailed):
        plane_check_three(2, 4, 6, 0, 5, 5, 5)
    with pytest.raises(HypothesisFailed):
        plane_check_two(2, 3, 0, 0, 5, 5)


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_plane_conclusions_hold_on_random_planes(seed):
    A, B, C, Dv, X, Y, Z = random_plane(random.Random(seed))
    chk = plane_check_three(A, B, C, Dv, X, Y, Z)
    assert chk.part_a and chk.part_b
    if math.gcd(B, C) == 1:
        two = plane_check_two(B, C, Dv, X, Y, Z)
        assert two.part_a and two.part_b


# -- projection dichotomy --------------------------------------------------------------------------


def test_projection_either_spreads_or_finds_a_relation():
    chk = projection_check((3, 5, 7), 3, 3, 3, Fraction(1), Fraction(1), Fraction(1))
    assert chk.card_bound_holds
    assert chk.relation_found or not chk.relation_needed


# -- sweeps ----------------------------------------------------------------------------------------


def test_quick_sweeps_all_pass():
    results = run_sweeps(quick=True)
    assert len(results) == 6
    for name, ok, detail in results:
        assert ok, f"{name}: {detail}"
