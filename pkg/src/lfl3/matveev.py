"""First coefficient bound from Matveev's three-logarithm theorem.

Matveev's lower bound reads

    log|Lambda| > -C1 D^2 A1 A2 A3 log(1.5 e D log(eD) B)

with ``A_j >= max(D h(alpha_j), |log alpha_j|)`` and
``B >= max_j |b_j| A_j / A_{j0}``.  Played against the problem's upper bound
``log|Lambda| <= -G(Y) P + H(Y)`` this gives ``P < a + b log P`` and the
explicit root bound of :func:`solve_pw` turns that into a number.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import HypothesisFailed, InvariantViolated, NoBoundExtractable
from .problem import TARGET_SYMBOL, LinearFormProblem, inf_y, sup_y
from .rigor import (
    CertScalar,
    Const,
    ParamExpr,
    Sym,
    affine_in,
    const_value,
    emax,
    log,
)
from .rigor import interval as iv


def c1_constant(D: int, chi_real: int) -> CertScalar:
    """Matveev's C1 for n = 3 as a certified interval."""
    if D < 1 or chi_real not in (1, 2):
        raise ValueError("need D >= 1 and chi_real in {1, 2}")
    e = CertScalar.e()
    chi = CertScalar(chi_real)
    lead = CertScalar(5 * 16**5) / (6 * chi)
    D_ = CertScalar(D)
    tail = CertScalar(Fraction(2625, 100)) + iv.log(D_ * D_ * iv.log(e * D_))
    return lead * iv.power(e, 3) * (7 + 2 * chi) * iv.power(3 * e / 2, chi_real) * tail


@dataclass(frozen=True)
class MatveevInput:
    D: int
    chi_real: int
    A: tuple[ParamExpr, ParamExpr, ParamExpr]
    B_bound: ParamExpr
    reference: int  # index j0 with A_{j0} in the denominator of B


def _sample_float(problem: LinearFormProblem, expr: ParamExpr) -> float:
    y = problem.scale_symbol
    if y is None or y not in expr.free_symbols():
        return const_value(expr).mid
    from .rigor import eval_at

    return eval_at(expr, {y: problem.Y_min}).mid


def matveev_input(problem: LinearFormProblem) -> MatveevInput:
    """Smallest admissible A_j and the matching B for the problem's data."""
    D = problem.D
    A = tuple(emax(D * a.height, a.abs_log) for a in problem.alphas)
    chi_real = 1 if problem.case == "real" else 2
    # the reference index is free (all b_j are non-zero); the largest A gives the smallest B
    ref = max(range(3), key=lambda j: _sample_float(problem, A[j]))
    P_floor = Const.of(problem.P_floor)
    terms = []
    for j, c in enumerate(problem.coeffs):
        slope, offset = affine_in(c.bound, TARGET_SYMBOL)
        # slope*P + offset <= P*(slope + max(offset, 0)/P_floor) for P >= P_floor
        per_p = slope + emax(offset, 0) / P_floor
        terms.append(per_p * A[j] / A[ref] if j != ref else per_p)
    B = Sym(TARGET_SYMBOL) * emax(*terms)
    return MatveevInput(D, chi_real, A, B, ref)  # type: ignore[arg-type]


def check_input(problem: LinearFormProblem, inp: MatveevInput) -> None:
    """Certify A_j >= max(D h_j, |log alpha_j|) on the whole domain."""
    from .rigor import Extremum

    for j, (a, spec) in enumerate(zip(inp.A, problem.alphas), start=1):
        for need in (inp.D * spec.height, spec.abs_log):
            if isinstance(a, Extremum) and a.fn == "max" and need in a.args:
                continue
            if not inf_y(problem, a - need).certainly_ge(0):
                raise InvariantViolated(f"A_{j} is smaller than required")


def matveev_log_lambda_lb(inp: MatveevInput) -> ParamExpr:
    """Expression (in P and the scale symbol) provably below log|Lambda|."""
    C1 = Const.of(c1_constant(inp.D, inp.chi_real))
    e = Const(text="e")
    D = inp.D
    k = Const.of(Fraction(3, 2)) * e * D * log(e * D)
    return -(C1 * (D * D) * inp.A[0] * inp.A[1] * inp.A[2] * log(k * inp.B_bound))


def solve_pw(a, b, h) -> CertScalar:
    """Upper bound for the largest solution of x = a + b (log x)^h.

    Needs a >= 0, h >= 1, b > (1/h)^h and log(c) > 1 with c = h b^(1/h); the
    bound is (c log c + log c/(log c - 1) (a^(1/h) + c log log c))^h.  The
    largest root grows with a and b, so the upper ends of interval inputs are
    used.
    """
    a, b = iv.as_cert(a), iv.as_cert(b)
    hq = Fraction(h.mid) if isinstance(h, CertScalar) else Fraction(h)
    if hq < 1:
        raise HypothesisFailed(f"h = {hq} < 1")
    if a.certainly_lt(0) or not a.is_finite() or not b.is_finite():
        raise HypothesisFailed("need finite a >= 0 and finite b")
    a_top = CertScalar._raw(a._hi, a._hi) if not a.certainly_lt(0) else CertScalar(0)
    if a_top.certainly_lt(0):
        a_top = CertScalar(0)
    b_top = CertScalar._raw(b._hi, b._hi)
    hc = CertScalar(hq)
    if not b_top.certainly_gt(iv.power(1 / hc, hq)):
        raise HypothesisFailed(f"b = {b_top.hi_float:.6g} must exceed (1/h)^h")
    c = hc * iv.power(b_top, 1 / hq)
    lc = iv.log(c)
    if not lc.certainly_gt(CertScalar(1) + CertScalar("1e-9")):
        raise HypothesisFailed(f"log c = {lc.mid:.6g} must exceed 1")
    a_root = iv.power(iv.maximum(a_top, 0), 1 / hq) if a_top.certainly_positive() else CertScalar(0)
    inner = c * lc + (lc / (lc - 1)) * (a_root + c * iv.log(lc))
    return iv.power(inner, hq)


@dataclass(frozen=True)
class FirstBound:
    B1: CertScalar
    a: CertScalar
    b: CertScalar
    lower_bound: ParamExpr
    matveev: MatveevInput


def first_bound(problem: LinearFormProblem) -> FirstBound:
    """First certified bound B1 for the target coefficient."""
    inp = matveev_input(problem)
    check_input(problem, inp)
    G, H = problem.decreasing_part()
    if not inf_y(problem, G).certainly_positive():
        raise NoBoundExtractable("the upper bound for log|Lambda| does not decrease with P")
    C1 = Const.of(c1_constant(inp.D, inp.chi_real))
    e = Const(text="e")
    D = inp.D
    M = C1 * (D * D) * inp.A[0] * inp.A[1] * inp.A[2]
    k = Const.of(Fraction(3, 2)) * e * D * log(e * D)
    # B = P * beta(Y), so log(k B) = log P + log(k beta)
    beta = inp.B_bound / Sym(TARGET_SYMBOL)
    from .rigor import substitute

    beta = substitute(beta, {TARGET_SYMBOL: 1})
    ell = log(k * beta)
    a = sup_y(problem, (H + M * ell) / G)
    b = sup_y(problem, M / G)
    if not a.is_finite() or not b.is_finite():
        raise NoBoundExtractable("Matveev's bound grows faster than the decay of |Lambda| in the scale variable")
    a_pos = iv.maximum(a, 0)
    try:
        B1 = solve_pw(a_pos, b, 1)
    except HypothesisFailed as exc:
        raise NoBoundExtractable(f"cannot isolate P: {exc}") from None
    return FirstBound(B1, a, b, matveev_log_lambda_lb(inp), inp)
