"""Non-degenerate step: parameter recipe, the main inequality, the zero-estimate
conditions and the resulting bound B2.

All recipe formulas are written once in :func:`_recipe` against a tiny
"ops" interface.  The certified path instantiates it with parametric
expressions in the scale variable Y; the screening path instantiates it with
numpy arrays over a whole (L, m, rho) grid.  Only the certified path is ever
reported.

The a_i entering the recipe are *monomial majorants* of the exact
``rho|log a_i| - log|a_i| + 2 cD h(a_i)``: a constant when that quantity is
bounded on the Y-domain, otherwise ``kappa * Y**e`` with
``kappa = sup(a_i / Y**e)``.  Any majorant is admissible for the theorem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ConversionSlackTooLarge, HypothesisFailed, ProfileUnsupported
from .problem import (
    TARGET_SYMBOL,
    LinearFormProblem,
    coefficient_lower,
    inf_y,
    nonnegative_y,
    positive_y,
    sup_y,
)
from .rigor import (
    CertScalar,
    Const,
    ParamExpr,
    Sym,
    const_value,
    emax,
    eval_float,
    exp,
    floor,
    log,
    over_power,
    sqrt,
    substitute,
    tail_info,
)
from .rigor import interval as iv

PROFILES = ("total_degree", "partial_degree")
EPS_MAX = Fraction(1, 1000)


def as_fraction(x) -> Fraction:
    """Exact value of a user parameter (floats go through their shortest repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


# -- the a_i ---------------------------------------------------------------------------


def a_expressions(problem: LinearFormProblem, rho) -> tuple[ParamExpr, ParamExpr, ParamExpr]:
    """Exact ``rho|log a| - log|a| + 2 cD h`` for the three numbers."""
    r = Const.of(as_fraction(rho))
    out = []
    for spec in problem.alphas:
        # real case: log|a| = |log a|; imaginary case: log|a| = 0
        weight = r - 1 if problem.case == "real" else r
        out.append(weight * spec.abs_log + (2 * problem.cD) * spec.height)
    return tuple(out)  # type: ignore[return-value]


@dataclass(frozen=True)
class Majorant:
    """``kappa * Y**exponent`` (exponent 0: the constant kappa)."""

    expr: ParamExpr
    kappa: CertScalar
    exponent: Fraction

    def at(self, Y):
        k = self.kappa.hi_float
        if self.exponent == 0:
            return k + 0 * np.asarray(Y, dtype=float) if isinstance(Y, np.ndarray) else k
        return k * np.power(Y, float(self.exponent))


def majorant(problem: LinearFormProblem, expr: ParamExpr) -> Majorant:
    y = problem.scale_symbol
    if y is None or y not in expr.free_symbols():
        v = const_value(expr)
        return Majorant(Const.of(CertScalar(v.hi)), CertScalar(v.hi), Fraction(0))
    info = tail_info(expr, y, problem.Y_min)
    if info.log_coef is not None or info.exponent < 0:
        if info.exponent < 0 or (info.exponent == 0 and info.log_coef is None):
            pass
        else:
            raise HypothesisFailed(f"a_i grows like Y^{info.exponent} log Y; only monomial growth is supported")
    if info.exponent <= 0:
        top = sup_y(problem, expr)
        return Majorant(Const.of(CertScalar(top.hi)), CertScalar(top.hi), Fraction(0))
    kappa = sup_y(problem, over_power(expr, y, info.exponent))
    kappa = CertScalar(kappa.hi)
    return Majorant(Const.of(kappa) * (Sym(y) ** info.exponent if info.exponent != 1 else Sym(y)), kappa, info.exponent)


_MAJ_CACHE: dict = {}


def a_majorants(problem: LinearFormProblem, rho) -> tuple[Majorant, Majorant, Majorant]:
    key = (problem, as_fraction(rho), iv.get_precision())
    hit = _MAJ_CACHE.get(key)
    if hit is None:
        hit = tuple(majorant(problem, e) for e in a_expressions(problem, rho))
        if len(_MAJ_CACHE) > 4096:
            _MAJ_CACHE.clear()
        _MAJ_CACHE[key] = hit
    return hit  # type: ignore[return-value]


# -- shared recipe ---------------------------------------------------------------------


class _SymOps:
    def c(self, x):
        return Const.of(x)

    floor = staticmethod(floor)
    log = staticmethod(log)
    sqrt = staticmethod(sqrt)

    def max(self, *xs):
        return emax(*xs)

    def cpow(self, x, q: Fraction):
        return x ** Fraction(q)

    def fix(self, e: ParamExpr) -> ParamExpr:
        return e if e.free_symbols() else Const.of(const_value(e))


class _NumOps:
    def c(self, x):
        return float(x)

    floor = staticmethod(np.floor)
    log = staticmethod(np.log)
    sqrt = staticmethod(np.sqrt)

    def max(self, *xs):
        out = xs[0]
        for x in xs[1:]:
            out = np.maximum(out, x)
        return out

    def cpow(self, x, q: Fraction):
        return np.power(x, float(q))

    def fix(self, e):
        return e


SYM = _SymOps()
NUM = _NumOps()


def _recipe(ops, a, amin, chi, L, m, rho, independent: bool, K_given=None) -> dict:
    a1, a2, a3 = a
    Omega = a1 * a2 * a3
    K = ops.floor(m * L * Omega) if K_given is None else K_given
    c1 = ops.fix(
        ops.max(
            ops.cpow(ops.c(2), Fraction(1, 3)),
            ops.cpow(chi * m * L, Fraction(2, 3)),
            ops.sqrt(ops.c(2) * m * L / amin),
        )
    )
    c2 = ops.cpow(m * L, Fraction(2, 3))
    if not independent:
        c2 = ops.max(c2, ops.sqrt(m / amin) * L)
    c2 = ops.fix(c2)
    c3 = ops.fix(ops.cpow(ops.c(3) * m * m, Fraction(1, 3)) * L)
    cs = (c1, c2, c3)
    Rk = tuple(ops.floor(c * a2 * a3) for c in cs)
    Sk = tuple(ops.floor(c * a1 * a3) for c in cs)
    Tk = tuple(ops.floor(c * a1 * a2) for c in cs)
    one = ops.c(1)
    R = Rk[0] + Rk[1] + Rk[2] + one
    S = Sk[0] + Sk[1] + Sk[2] + one
    T = Tk[0] + Tk[1] + Tk[2] + one
    N = K * (K + one) * L / ops.c(2)
    g = ops.c(Fraction(1, 4)) - N / (ops.c(12) * R * S * T)
    return dict(a=a, Omega=Omega, K=K, c=cs, Rk=Rk, Sk=Sk, Tk=Tk, R=R, S=S, T=T, N=N, g=g)


def _coef_products(ops, q: dict, b, d1, d2):
    """Upper bounds for b3' eta0 and b3'' zeta0."""
    b1, b2, b3 = b
    one = ops.c(1)
    e1 = ((q["R"] - one) * b3 + (q["T"] - one) * b1) / ops.c(2 * d1)
    e2 = ((q["S"] - one) * b3 + (q["T"] - one) * b2) / ops.c(2 * d2)
    return e1, e2


def _log_b(ops, q: dict, b, d1, d2):
    e1, e2 = _coef_products(ops, q, b, d1, d2)
    return ops.log(e1) + ops.log(e2) - ops.c(2) * ops.log(q["K"]) + ops.c(Fraction(11, 3))


def _main_sides(ops, q: dict, logb, L, rho, cD: int):
    K, a = q["K"], q["a"]
    lhs = (K * L / ops.c(2) + L / ops.c(2) - ops.c(Fraction(37, 100)) * K - ops.c(2)) * ops.log(rho)
    rhs = (
        ops.c(cD + 1) * ops.log(q["N"])
        + q["g"] * L * (a[0] * q["R"] + a[1] * q["S"] + a[2] * q["T"])
        + ops.c(Fraction(2 * cD, 3)) * (K - ops.c(1)) * logb
    )
    return lhs, rhs


def _zero_terms(ops, q: dict, chi, L, mult, profile: str, K1=None, K2=None) -> list[tuple[str, list[list[tuple]]]]:
    """Conditions as (name, alternatives); an alternative is a list of
    (lhs, rhs) pairs that must all satisfy lhs > rhs."""
    one = ops.c(1)
    X1 = (q["Rk"][0], q["Sk"][0], q["Tk"][0])
    X2 = (q["Rk"][1], q["Sk"][1], q["Tk"][1])
    X3 = (q["Rk"][2], q["Sk"][2], q["Tk"][2])
    p1 = (X1[0] + one) * (X1[1] + one) * (X1[2] + one)
    p2 = (X2[0] + one) * (X2[1] + one) * (X2[2] + one)
    p3 = (X3[0] + one) * (X3[1] + one) * (X3[2] + one)
    K = q["K"]
    if profile == "total_degree":
        Kd = K
        need_1, need_2 = L, ops.c(2) * K * L
        cond_p2 = (p2, K * K)
        cond_p3 = (p3, ops.c(3) * K * K * L)
        names = ("box1 product > K*M", "box1 size > L", "box2 size > 2KL", "box2 product > K^2", "box3 product > 3K^2L")
    else:
        Kd = ops.max(K1, K2)
        need_1, need_2 = L, ops.c(2) * Kd * L
        cond_p2 = (p2, ops.c(2) * K1 * K2)
        cond_p3 = (p3, ops.c(6) * K1 * K2 * L)
        names = ("box1 product > max(K1,K2)*M", "box1 size > L", "box2 size > 2max(K1,K2)L", "box2 product > 2K1K2", "box3 product > 6K1K2L")

    def card_alts(X, prod, need):
        if mult.kind == "all_independent":
            return [[(prod, need)]]
        i = mult.index - 1
        others = one
        for j in range(3):
            if j != i:
                others = others * (X[j] + one)
        alts = [[(ops.c(2) * others, need)]]  # 2*prod/(W+1) with W = X_i
        nu = ops.c(mult.nu)
        alts.append([(nu * others, need), (X[i], nu - ops.c(2))])  # needs X_i >= nu - 1
        return alts

    # p1 > Kd * max(A, B, C, chi sqrt(p1)) split into monotone pieces; the last
    # one, p1 > (Kd chi)^2, avoids comparing p1 with its own square root
    cond_42 = [
        (p1, Kd * (X1[0] + X1[1] + one)),
        (p1, Kd * (X1[1] + X1[2] + one)),
        (p1, Kd * (X1[0] + X1[2] + one)),
        (p1, (Kd * chi) * (Kd * chi)),
    ]
    return [
        (names[0], [cond_42]),
        (names[1], card_alts(X1, p1, need_1)),
        (names[2], card_alts(X2, p2, need_2)),
        (names[3], [[cond_p2]]),
        (names[4], [[cond_p3]]),
    ]


# -- certified parameters ----------------------------------------------------------------


@dataclass(frozen=True)
class KitParams:
    """One certified instantiation of the recipe (all derived data as expressions in Y)."""

    chi: Fraction
    L: int
    m: Fraction
    rho: Fraction
    P_max: CertScalar
    a: tuple[ParamExpr, ParamExpr, ParamExpr]
    a_raw: tuple[ParamExpr, ParamExpr, ParamExpr]
    a_small: CertScalar
    a_second: CertScalar
    Omega: ParamExpr
    c: tuple[CertScalar, CertScalar, CertScalar]
    K: ParamExpr
    Rk: tuple[ParamExpr, ParamExpr, ParamExpr]
    Sk: tuple[ParamExpr, ParamExpr, ParamExpr]
    Tk: tuple[ParamExpr, ParamExpr, ParamExpr]
    R: ParamExpr
    S: ParamExpr
    T: ParamExpr
    N: ParamExpr
    g: ParamExpr
    b3_eta0: ParamExpr
    b3_zeta0: ParamExpr
    log_b: ParamExpr
    cV: ParamExpr
    cM: ParamExpr
    W1: ParamExpr
    W2: ParamExpr
    nu: int | None
    k_override: ParamExpr | None = None
    exponents: tuple[Fraction, Fraction, Fraction] = field(default=(Fraction(0),) * 3)

    @property
    def slots(self) -> tuple[tuple[ParamExpr, ...], tuple[ParamExpr, ...], tuple[ParamExpr, ...]]:
        """(R_k, S_k, T_k) grouped by coefficient index 1, 2, 3."""
        return (self.Rk, self.Sk, self.Tk)

    def recipe_values(self) -> dict:
        return dict(a=self.a, K=self.K, Rk=self.Rk, Sk=self.Sk, Tk=self.Tk, R=self.R, S=self.S, T=self.T, N=self.N, g=self.g)


def coefficient_uppers(problem: LinearFormProblem, P_max) -> tuple[ParamExpr, ParamExpr, ParamExpr]:
    """Upper bounds for |b_1|, |b_2|, |b_3| with the target capped at P_max."""
    pm = Const.of(iv.as_cert(P_max))
    return tuple(substitute(c.bound, {TARGET_SYMBOL: pm}) for c in problem.coeffs)  # type: ignore[return-value]


def _check_param_ranges(L, m, rho, chi):
    if L < 5:
        raise HypothesisFailed(f"L = {L} < 5")
    if m < 1:
        raise HypothesisFailed(f"m = {m} < 1")
    if rho < 2:
        raise HypothesisFailed(f"rho = {rho} < 2")
    if chi <= 0:
        raise HypothesisFailed(f"chi = {chi} must be positive")


def derive_params(
    problem: LinearFormProblem,
    P_max,
    chi,
    L: int,
    m,
    rho,
    k_override: ParamExpr | str | None = None,
) -> KitParams:
    """Instantiate the recipe for (chi, L, m, rho)."""
    chi, m, rho = as_fraction(chi), as_fraction(m), as_fraction(rho)
    if int(L) != L:
        raise HypothesisFailed("L must be an integer")
    L = int(L)
    _check_param_ranges(L, m, rho, chi)
    P_max = iv.as_cert(P_max)
    if not P_max.is_finite():
        raise HypothesisFailed("P_max must be finite")
    maj = a_majorants(problem, rho)
    a = tuple(mj.expr for mj in maj)
    lows = sorted((inf_y(problem, e) for e in a), key=lambda v: v.lo_float)
    a_small, a_second = CertScalar(lows[0].lo), CertScalar(lows[1].lo)
    Om = a[0] * a[1] * a[2]
    if not inf_y(problem, Om).certainly_ge(2):
        raise HypothesisFailed("Omega = a1 a2 a3 must be >= 2")
    K_given = None
    if k_override is not None:
        if isinstance(k_override, str):
            from .rigor import parse_expr

            syms = [problem.scale_symbol] if problem.scale_symbol else []
            k_override = parse_expr(k_override, syms)
        recipe_K = floor(Const.of(m) * L * Om)
        if not nonnegative_y(problem, recipe_K - k_override):
            raise HypothesisFailed("k_override exceeds floor(m L a1 a2 a3) somewhere on the domain")
        K_given = k_override
    q = _recipe(SYM, a, Const.of(a_small), Const.of(chi), Const.of(L), Const.of(m), Const.of(rho), problem.all_independent, K_given)
    if not inf_y(problem, q["K"]).certainly_ge(3):
        raise HypothesisFailed("K must be >= 3")
    b = coefficient_uppers(problem, P_max)
    e1, e2 = _coef_products(SYM, q, b, problem.d1, problem.d2)
    logb = _log_b(SYM, q, b, problem.d1, problem.d2)
    one = Const.of(1)
    X1 = (q["Rk"][0], q["Sk"][0], q["Tk"][0])
    X2 = (q["Rk"][1], q["Sk"][1], q["Tk"][1])
    p1 = (X1[0] + one) * (X1[1] + one) * (X1[2] + one)
    V = sqrt(p1)
    M = emax(X1[0] + X1[1] + one, X1[1] + X1[2] + one, X1[0] + X1[2] + one, Const.of(chi) * V)
    if problem.all_independent:
        W1 = W2 = one
        nu = None
    else:
        W1, W2 = X1[problem.mult.index - 1], X2[problem.mult.index - 1]
        nu = problem.mult.nu
    return KitParams(
        chi=chi,
        L=L,
        m=m,
        rho=rho,
        P_max=P_max,
        a=a,  # type: ignore[arg-type]
        a_raw=a_expressions(problem, rho),
        a_small=a_small,
        a_second=a_second,
        Omega=Om,
        c=tuple(const_value(c) for c in q["c"]),  # type: ignore[arg-type]
        K=q["K"],
        Rk=q["Rk"],
        Sk=q["Sk"],
        Tk=q["Tk"],
        R=q["R"],
        S=q["S"],
        T=q["T"],
        N=q["N"],
        g=q["g"],
        b3_eta0=e1,
        b3_zeta0=e2,
        log_b=logb,
        cV=V,
        cM=M,
        W1=W1,
        W2=W2,
        nu=nu,
        k_override=K_given,
        exponents=tuple(mj.exponent for mj in maj),  # type: ignore[arg-type]
    )


def log_b_upper(params: KitParams, problem: LinearFormProblem, P_max=None) -> ParamExpr:
    """Certified upper bound for log b (as an expression in Y)."""
    if P_max is None or iv.as_cert(P_max) == params.P_max:
        return params.log_b
    b = coefficient_uppers(problem, P_max)
    return _log_b(SYM, params.recipe_values(), b, problem.d1, problem.d2)


# -- certification --------------------------------------------------------------------------


@dataclass(frozen=True)
class MainCheck:
    holds: bool
    margin: CertScalar  # inf of (LHS - RHS) / LHS over the domain
    rst_ok: bool


def main_inequality_sides(params: KitParams, problem: LinearFormProblem, P_max=None) -> tuple[ParamExpr, ParamExpr]:
    logb = log_b_upper(params, problem, P_max)
    return _main_sides(SYM, params.recipe_values(), logb, Const.of(params.L), Const.of(params.rho), problem.cD)


def check_main_inequality(params: KitParams, problem: LinearFormProblem, P_max=None, with_margin: bool = True) -> MainCheck:
    """Certify the main inequality (and RST >= N) over the whole Y-domain."""
    lhs, rhs = main_inequality_sides(params, problem, P_max)
    rst_ok = nonnegative_y(problem, params.R * params.S * params.T - params.N)
    holds = rst_ok and nonnegative_y(problem, lhs - rhs, max_evals=600)
    margin = CertScalar(0)
    if with_margin:
        try:
            margin = inf_y(problem, (lhs - rhs) / lhs)
        except Exception:  # margin is diagnostic only
            margin = CertScalar("-inf", "inf")
    return MainCheck(holds, margin, rst_ok)


@dataclass(frozen=True)
class ConditionVerdict:
    name: str
    holds: bool


@dataclass(frozen=True)
class ZeroCheck:
    profile: str
    conditions: tuple[ConditionVerdict, ...]

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.conditions)

    def __bool__(self) -> bool:
        return self.holds


def _partial_degrees(params_K: ParamExpr, problem: LinearFormProblem, K1, K2):
    """Partial degrees (default K - 1); supplied ones must lie in [0, K - 1]."""
    out = []
    for Kj in (K1, K2):
        if Kj is None:
            out.append(params_K - 1)
            continue
        Kj = Kj if isinstance(Kj, ParamExpr) else Const.of(Kj)
        if not nonnegative_y(problem, Kj) or not nonnegative_y(problem, params_K - 1 - Kj):
            raise ProfileUnsupported("partial degrees must satisfy 0 <= K_j <= K - 1")
        out.append(Kj)
    K1, K2 = out
    return K1, K2


def check_zero_conditions(
    params: KitParams, problem: LinearFormProblem, profile: str = "total_degree", K1=None, K2=None
) -> ZeroCheck:
    """Certify the zero-estimate conditions of the chosen profile over the domain."""
    if profile not in PROFILES:
        raise ProfileUnsupported(f"unknown profile {profile!r}")
    if profile == "partial_degree":
        K1, K2 = _partial_degrees(params.K, problem, K1, K2)
    terms = _zero_terms(SYM, params.recipe_values(), Const.of(params.chi), Const.of(params.L), problem.mult, profile, K1, K2)
    verdicts = []
    for name, alts in terms:
        ok = any(all(positive_y(problem, lhs - rhs) for lhs, rhs in alt) for alt in alts)
        verdicts.append(ConditionVerdict(name, ok))
    return ZeroCheck(profile, tuple(verdicts))


@dataclass(frozen=True)
class ZeroData:
    """Explicit integer data for the zero-estimate conditions (no Y-dependence)."""

    Rk: tuple[int, int, int]
    Sk: tuple[int, int, int]
    Tk: tuple[int, int, int]
    K: int
    L: int
    chi: Fraction


def zero_conditions_exact(data: ZeroData, mult, profile: str = "total_degree", K1: int | None = None, K2: int | None = None) -> ZeroCheck:
    """The same conditions evaluated on explicit integers (exact arithmetic)."""
    if profile not in PROFILES:
        raise ProfileUnsupported(f"unknown profile {profile!r}")
    if profile == "partial_degree":
        K1 = data.K - 1 if K1 is None else K1
        K2 = data.K - 1 if K2 is None else K2
        if not (0 <= K1 <= data.K - 1 and 0 <= K2 <= data.K - 1):
            raise ProfileUnsupported("partial degrees must satisfy 0 <= K_j <= K - 1")
    q = dict(Rk=data.Rk, Sk=data.Sk, Tk=data.Tk, K=data.K)
    q = {k: (tuple(Const.of(x) for x in v) if isinstance(v, tuple) else Const.of(v)) for k, v in q.items()}
    k1 = None if K1 is None else Const.of(K1)
    k2 = None if K2 is None else Const.of(K2)
    terms = _zero_terms(SYM, q, Const.of(as_fraction(data.chi)), Const.of(data.L), mult, profile, k1, k2)
    verdicts = []
    for name, alts in terms:
        ok = any(all(const_value(lhs - rhs).certainly_positive() for lhs, rhs in alt) for alt in alts)
        verdicts.append(ConditionVerdict(name, ok))
    return ZeroCheck(profile, tuple(verdicts))


# -- the non-degenerate bound ----------------------------------------------------------------


@dataclass(frozen=True)
class NondegenerateBound:
    B2: CertScalar
    eps: CertScalar
    log_lambda_lower: ParamExpr
    coarse_shift: CertScalar  # sup of log(K L) / G, the coarser conversion without the eps term


def nondegenerate_bound(params: KitParams, problem: LinearFormProblem) -> NondegenerateBound:
    """B2 from  log|Lambda| >= -KL log(rho) - max(0, log(LT/(2 b3_min))) - eps."""
    G, H = problem.decreasing_part()
    L = Const.of(params.L)
    b3_min = Const.of(coefficient_lower(problem, 2))
    P_floor = Const.of(problem.P_floor)
    eps_expr = L * params.T * exp(H - G * P_floor) / (2 * b3_min)
    eps = sup_y(problem, eps_expr)
    if not eps.certainly_le(EPS_MAX):
        raise ConversionSlackTooLarge(f"L T |Lambda| / (2 b3) <= {eps.hi_float:.3g} is not below {float(EPS_MAX)}")
    eps_c = Const.of(CertScalar(eps.hi))
    shift = emax(log(L * params.T / (2 * b3_min)), 0)
    lower = -(params.K * L * log(Const.of(params.rho))) - shift - eps_c
    # -G P + H >= log|Lambda| >= lower  =>  P <= (H - lower) / G
    B2 = sup_y(problem, (H - lower) / G)
    if not B2.is_finite():
        raise HypothesisFailed("the non-degenerate bound is not uniform in the scale variable")
    coarse = sup_y(problem, log(params.K * L) / G)
    return NondegenerateBound(CertScalar(B2.hi), eps, lower, coarse)


# -- float screening -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Screen:
    """Float screening of a (L, m, rho) grid for one chi."""

    L: np.ndarray
    m: np.ndarray
    rho: np.ndarray
    feasible: np.ndarray
    objective: np.ndarray  # K L log(rho) at Y_min (inf where infeasible)

    def candidates(self, limit: int | None = None) -> list[tuple[float, int, Fraction, Fraction]]:
        """Feasible (objective, L, m, rho) sorted by objective then lexicographically."""
        idx = np.argwhere(self.feasible)
        out = [(float(self.objective[tuple(i)]), int(self.L[i[0]]), self.m[i[1]], self.rho[i[2]]) for i in idx]
        out.sort(key=lambda t: (t[0], t[1], t[2], t[3]))
        return out if limit is None else out[:limit]


def sample_points(problem: LinearFormProblem) -> list[float]:
    """Scale-variable values used by the float screen."""
    if problem.scale_symbol is None:
        return [1.0]
    lo = problem.Y_min.lo_float
    hi = problem.Y_max.hi_float if problem.Y_max is not None else float("inf")
    pts = [lo]
    for k in (3, 8):
        y = lo * 10.0**k
        if y < hi:
            pts.append(y)
    if hi < float("inf"):
        pts.append(hi)
    return pts


def screen_grid(
    problem: LinearFormProblem,
    P_max,
    chi,
    Ls: Sequence[int],
    ms: Sequence,
    rhos: Sequence,
    profile: str = "total_degree",
    zero_conditions: bool = True,
) -> Screen:
    """Vectorized float evaluation of the recipe, the main inequality and the
    zero-estimate conditions at a few sample values of Y."""
    chi = as_fraction(chi)
    Lv = np.asarray([int(x) for x in Ls], dtype=float)[:, None, None]
    mf = [as_fraction(x) for x in ms]
    rf = [as_fraction(x) for x in rhos]
    mv = np.asarray([float(x) for x in mf])[None, :, None]
    rv = np.asarray([float(x) for x in rf])[None, None, :]
    maj = [a_majorants(problem, r) for r in rf]
    y = problem.scale_symbol
    ys = sample_points(problem)
    Pm = iv.as_cert(P_max).hi_float
    shape = (Lv.shape[0], mv.shape[1], rv.shape[2])
    feasible = np.ones(shape, dtype=bool)
    objective = None
    amin = np.asarray([min(mj.at(ys[0]) for mj in mm) for mm in maj])[None, None, :]
    with np.errstate(all="ignore"):
        for k, Y in enumerate(ys):
            a = tuple(np.asarray([mm[i].at(Y) for mm in maj])[None, None, :] for i in range(3))
            q = _recipe(NUM, a, amin, float(chi), Lv, mv, rv, problem.all_independent)
            env = {TARGET_SYMBOL: Pm}
            if y is not None:
                env[y] = Y
            b = tuple(float(eval_float(c.bound, env)) for c in problem.coeffs)
            logb = _log_b(NUM, q, b, problem.d1, problem.d2)
            lhs, rhs = _main_sides(NUM, q, logb, Lv, rv, problem.cD)
            ok = (lhs >= rhs) & (q["R"] * q["S"] * q["T"] >= q["N"]) & (q["K"] >= 3)
            if zero_conditions:
                K1 = K2 = q["K"] - 1
                for _, alts in _zero_terms(NUM, q, float(chi), Lv, problem.mult, profile, K1, K2):
                    any_ok = np.zeros(shape, dtype=bool)
                    for alt in alts:
                        all_ok = np.ones(shape, dtype=bool)
                        for lhs_c, rhs_c in alt:
                            all_ok &= np.broadcast_to(lhs_c > rhs_c, shape)
                        any_ok |= all_ok
                    ok &= any_ok
            feasible &= np.broadcast_to(ok, shape)
            if k == 0:
                objective = np.broadcast_to(q["K"] * Lv * np.log(rv), shape).copy()
    # Omega >= 2 at Y_min
    a0 = tuple(np.asarray([mm[i].at(ys[0]) for mm in maj]) for i in range(3))
    feasible &= np.broadcast_to((a0[0] * a0[1] * a0[2] >= 2)[None, None, :], shape)
    feasible &= np.broadcast_to(mv >= 1, shape)
    assert objective is not None
    objective = np.where(feasible & np.isfinite(objective), objective, np.inf)
    return Screen(np.asarray([int(x) for x in Ls]), np.asarray(mf, dtype=object), np.asarray(rf, dtype=object), feasible & np.isfinite(objective), objective)


def objective_value(params: KitParams, problem: LinearFormProblem) -> CertScalar:
    """K L log(rho) at Y = Y_min (the search objective)."""
    from .rigor import eval_at

    env = {} if problem.scale_symbol is None else {problem.scale_symbol: problem.Y_min}
    return eval_at(params.K * params.L * log(Const.of(params.rho)), env)


@dataclass(frozen=True)
class CertifiedKit:
    params: KitParams
    main: MainCheck
    zero: ZeroCheck
    bound: NondegenerateBound


def certify(
    problem: LinearFormProblem,
    P_max,
    chi,
    L,
    m,
    rho,
    profile: str = "total_degree",
    k_override=None,
    zero_conditions: bool = True,
) -> CertifiedKit | None:
    """Derive and certify one tuple; None if any check fails.

    ``zero_conditions=False`` skips the zero-estimate conditions (diagnostic
    bound that ignores the degenerate case).
    """
    try:
        params = derive_params(problem, P_max, chi, L, m, rho, k_override)
    except HypothesisFailed:
        return None
    zero = check_zero_conditions(params, problem, profile) if zero_conditions else ZeroCheck(profile, ())
    if not zero.holds:
        return None
    main = check_main_inequality(params, problem)
    if not main.holds:
        return None
    return CertifiedKit(params, main, zero, nondegenerate_bound(params, problem))


__all__ = [
    "KitParams",
    "Majorant",
    "MainCheck",
    "ZeroCheck",
    "ZeroData",
    "ConditionVerdict",
    "NondegenerateBound",
    "Screen",
    "CertifiedKit",
    "a_expressions",
    "a_majorants",
    "majorant",
    "derive_params",
    "log_b_upper",
    "check_main_inequality",
    "main_inequality_sides",
    "check_zero_conditions",
    "zero_conditions_exact",
    "nondegenerate_bound",
    "screen_grid",
    "sample_points",
    "objective_value",
    "certify",
    "coefficient_uppers",
    "as_fraction",
    "PROFILES",
]
