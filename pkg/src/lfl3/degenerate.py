"""Degenerate step: the bound B3 used when the zero estimate does not apply.

Two things can happen then.  Either all coefficients are small (each is
capped by the matching pair of box sides), or there is an integer relation
u1 b1 + u2 b2 + u3 b3 = 0 with explicitly bounded |u_i|.  In the second case
one coefficient is eliminated: with u_e != 0,

    u_e Lambda = sum_{j != e} b_j log(alpha_j^{u_e} alpha_e^{-u_j}),

a linear form in two logarithms whose numbers have heights at most
U_e h_j + U_j h_e.  A two-logarithm lower bound (behind a provider interface)
then caps the target coefficient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Protocol, Sequence

import numpy as np

from .errors import (
    DenominatorNonpositive,
    HypothesisFailed,
    NoConstantUBound,
    ProviderHypothesisFailed,
)
from .kit import KitParams, as_fraction, majorant, sample_points
from .matveev import solve_pw
from .problem import TARGET_SYMBOL, LinearFormProblem, inf_y, sup_y
from .rigor import (
    PI,
    CertScalar,
    Const,
    ParamExpr,
    Sym,
    affine_in,
    emax,
    emin,
    eval_float,
    floor,
    log,
    sqrt,
)
from .rigor import interval as iv

UNBOUNDED = "DEGENERATE-UNBOUNDED"
EXCLUDED = "excluded below floor"


# -- (C1): small coefficients ---------------------------------------------------------------


@dataclass(frozen=True)
class Inapplicable:
    """The small-coefficient case cannot occur: its cap is below the target floor."""

    cap: CertScalar
    reason: str


def c1_case_bound(params: KitParams, problem: LinearFormProblem) -> CertScalar | Inapplicable:
    """Cap on the target coefficient in the small-coefficient case."""
    slot = params.slots[problem.target_index]
    cap = sup_y(problem, emax(slot[0], slot[1]))
    cap = CertScalar(cap.hi)
    if cap.certainly_lt(problem.P_floor):
        return Inapplicable(cap, f"cap {cap.hi_float:.6g} is below the target floor {problem.P_floor.lo_float:.6g}")
    return cap


# -- (C2): the relation bounds -------------------------------------------------------------------


@dataclass(frozen=True)
class URelationBounds:
    """Majorants U_i >= |u_i| (floored constants or kappa * Y^e) and the threshold cM."""

    U1: ParamExpr
    U2: ParamExpr
    U3: ParamExpr
    cM: ParamExpr
    raw: tuple[ParamExpr, ParamExpr, ParamExpr]
    constant: tuple[bool, bool, bool]
    exponents: tuple[Fraction, Fraction, Fraction]

    @property
    def U(self) -> tuple[ParamExpr, ParamExpr, ParamExpr]:
        return (self.U1, self.U2, self.U3)

    def with_zero(self, index: int) -> "URelationBounds":
        """The same bounds with u_index forced to vanish (0-based index)."""
        U = list(self.U)
        U[index] = Const.of(0)
        const = list(self.constant)
        const[index] = True
        return URelationBounds(U[0], U[1], U[2], self.cM, self.raw, tuple(const), self.exponents)  # type: ignore[arg-type]


def _u_ratios(X: Sequence, cM, mx=max):
    """Numerators and denominators of the three relation bounds."""
    R1, S1, T1 = X
    nums = ((S1 + 1) * (T1 + 1), (R1 + 1) * (T1 + 1), (R1 + 1) * (S1 + 1))
    dens = (cM - mx(S1, T1), cM - mx(R1, T1), cM - mx(R1, S1))
    return nums, dens


def u_bounds_from_ints(R1: int, S1: int, T1: int, cM) -> tuple[Fraction, Fraction, Fraction]:
    """Exact relation bounds for explicit box sides and threshold."""
    cM = as_fraction(cM)
    nums, dens = _u_ratios((R1, S1, T1), cM)
    if any(d <= 0 for d in dens):
        raise DenominatorNonpositive("the threshold does not exceed the pairwise maxima")
    return tuple(Fraction(n) / d for n, d in zip(nums, dens))  # type: ignore[return-value]


def u_bounds(params: KitParams, problem: LinearFormProblem) -> URelationBounds:
    """Certified majorants of the relation bounds over the whole Y-domain."""
    X1 = (params.Rk[0], params.Sk[0], params.Tk[0])
    nums, dens = _u_ratios(X1, params.cM, emax)
    U, const, exps, raw = [], [], [], []
    for i, (n, d) in enumerate(zip(nums, dens), start=1):
        if not inf_y(problem, d).certainly_positive():
            raise DenominatorNonpositive(f"denominator of U_{i} is not certified positive")
        ratio = n / d
        raw.append(ratio)
        mj = majorant(problem, ratio)
        if mj.exponent == 0:
            U.append(Const.of(iv.floor(mj.kappa)))
            const.append(True)
        else:
            U.append(mj.expr)
            const.append(False)
        exps.append(mj.exponent)
    return URelationBounds(U[0], U[1], U[2], params.cM, tuple(raw), tuple(const), tuple(exps))  # type: ignore[arg-type]


# -- elimination -----------------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoLogForm:
    """u_e Lambda = b_j log(alpha'_j) + b_k log(alpha'_k) after eliminating b_e.

    ``coeffs`` bound the kept coefficients (expressions in P and Y); ``abs_logs``
    and ``heights`` bound |log alpha'| and h(alpha') (expressions in Y).
    Indices are 1-based.
    """

    eliminated_index: int
    kept: tuple[int, int]
    coeffs: tuple[ParamExpr, ParamExpr]
    abs_logs: tuple[ParamExpr, ParamExpr]
    heights: tuple[ParamExpr, ParamExpr]
    U_elim: ParamExpr
    vanishing_index: int | None
    problem: LinearFormProblem = field(compare=False, repr=False)

    @property
    def b1_prime(self) -> ParamExpr:
        return self.coeffs[0]

    @property
    def b2_prime(self) -> ParamExpr:
        return self.coeffs[1]

    def sizes(self, varrho) -> tuple[ParamExpr, ParamExpr]:
        """a_i >= max(1, varrho|log a| - log|a| + 2D h(a)) for the two new numbers."""
        r = Const.of(as_fraction(varrho))
        D = self.problem.cD
        out = []
        for ell, h in zip(self.abs_logs, self.heights):
            if self.problem.case == "real":
                # alpha' may be inverted so that it exceeds 1; log|alpha'| = |log alpha'|
                size = (r - 1) * ell + (2 * D) * h
            else:
                # principal determination: |log alpha'| <= pi on the unit circle
                size = r * emin(ell, PI) + (2 * D) * h
            out.append(emax(1, size))
        return out[0], out[1]

    @property
    def a1_two(self) -> ParamExpr:
        return self.sizes(self._default_varrho)[0]

    @property
    def a2_two(self) -> ParamExpr:
        return self.sizes(self._default_varrho)[1]

    _default_varrho = Fraction(10)

    def h_expr(self, shift) -> ParamExpr:
        """The height parameter D (log P - shift) used by the two-log bound."""
        return self.problem.cD * (log(Sym(TARGET_SYMBOL)) - Const.of(iv.as_cert(shift)))


def _admissible(ub: URelationBounds) -> list[int]:
    return [i for i in range(3) if ub.constant[i]]


def eliminate_and_reduce(
    problem: LinearFormProblem,
    ub: URelationBounds,
    eliminate_index: int,
    zero_u_case: bool = False,
    fallback_index: int | None = None,
) -> TwoLogForm:
    """Eliminate b_{eliminate_index} (1-based) using the relation.

    With ``zero_u_case`` the relation has u_{eliminate_index} = 0, so that
    coefficient cannot be eliminated; the next admissible index (or
    ``fallback_index``) is eliminated instead, with U_{eliminate_index} = 0.
    """
    e = eliminate_index - 1
    if not 0 <= e < 3:
        raise ValueError("eliminate_index must be 1, 2 or 3")
    vanishing = None
    if zero_u_case:
        vanishing = e
        ub = ub.with_zero(e)
        if fallback_index is not None:
            e = fallback_index - 1
            if e == vanishing or not ub.constant[e]:
                raise NoConstantUBound(f"b_{fallback_index} cannot be eliminated in this case")
        else:
            choices = [(vanishing + k) % 3 for k in (1, 2) if ub.constant[(vanishing + k) % 3]]
            if not choices:
                raise NoConstantUBound(f"no coefficient with a constant relation bound besides b_{eliminate_index}")
            e = choices[0]
    elif not ub.constant[e]:
        raise NoConstantUBound(f"U_{e + 1} grows with the scale variable; b_{e + 1} cannot be eliminated")
    U = ub.U
    j, k = [i for i in range(3) if i != e]
    al = problem.alphas
    logs, heights = [], []
    for i in (j, k):
        logs.append(U[e] * al[i].abs_log + U[i] * al[e].abs_log)
        heights.append(U[e] * al[i].height + U[i] * al[e].height)
    return TwoLogForm(
        eliminated_index=e + 1,
        kept=(j + 1, k + 1),
        coeffs=(problem.coeffs[j].bound, problem.coeffs[k].bound),
        abs_logs=(logs[0], logs[1]),
        heights=(heights[0], heights[1]),
        U_elim=U[e],
        vanishing_index=None if vanishing is None else vanishing + 1,
        problem=problem,
    )


def reconstruct_relation(b: Sequence[int], u: Sequence[int], e: int) -> tuple[tuple[int, int], tuple[tuple[int, int], tuple[int, int]]]:
    """Exact exponent bookkeeping of the elimination on integer data.

    Returns the kept coefficients and, for each new number, its exponents of
    (alpha_kept, alpha_e).  ``u_e * sum b_i x_i`` equals
    ``sum_kept b_j (u_e x_j - u_j x_e)`` whenever ``u . b = 0``.
    """
    j, k = [i for i in range(3) if i != e]
    return (b[j], b[k]), ((u[e], -u[j]), (u[e], -u[k]))


# -- two-logarithm providers -------------------------------------------------------------------


@dataclass(frozen=True)
class LogSquareBound:
    """-log|Lambda'| <= alpha (log P - shift)^2 + beta  for P >= P_floor.

    ``alpha`` and ``beta`` are expressions in the scale variable.
    """

    alpha: ParamExpr | None
    beta: ParamExpr | None
    shift: CertScalar
    ok: bool
    detail: str = ""
    constants: dict = field(default_factory=dict, compare=False)

    @property
    def unbounded(self) -> bool:
        return self.alpha is None

    def lower(self) -> ParamExpr:
        """The lower bound for log|Lambda'| as an expression in P and Y."""
        if self.alpha is None or self.beta is None:
            return Const.of(CertScalar("-inf"))
        u = log(Sym(TARGET_SYMBOL)) - Const.of(self.shift)
        return -(self.alpha * u * u + self.beta)


class TwoLogProvider(Protocol):
    name: str

    def __call__(self, form: TwoLogForm, varrho, mu, cD: int) -> LogSquareBound: ...


def _cross_coefficient(form: TwoLogForm, a: tuple[ParamExpr, ParamExpr]) -> CertScalar:
    """sup over Y of (b_j/a_k + b_k/a_j) / P, using P >= P_floor for the offsets."""
    problem = form.problem
    Pf = Const.of(problem.P_floor)
    per_p = []
    for c in form.coeffs:
        slope, offset = affine_in(c, TARGET_SYMBOL)
        per_p.append(slope + emax(offset, 0) / Pf)
    expr = per_p[0] / a[1] + per_p[1] / a[0]
    return CertScalar(sup_y(problem, expr).hi)


def _laurent_C(mu, lam, sig, H, a1, a2):
    """C and the auxiliary omega, theta; a1, a2 may be expressions or scalars."""
    one = CertScalar(1)
    q = iv.sqrt(one + one / (4 * H * H))
    om = 2 * (one + q)
    th = q + one / (2 * H)
    inner_c = om * om / 9
    k_mid = 8 * lam * iv.power(om, Fraction(5, 4)) * iv.power(th, Fraction(1, 4)) / (3 * iv.sqrt(H))
    k_last = Fraction(4, 3) * lam * om / H
    pref = mu / (lam * lam * lam * sig)
    if isinstance(a1, ParamExpr) or isinstance(a2, ParamExpr):
        a1, a2 = as_param(a1), as_param(a2)
        rad = Const.of(inner_c) + Const.of(k_mid) / sqrt(a1 * a2) + Const.of(k_last) * (1 / a1 + 1 / a2)
        root = Const.of(om / 6) + sqrt(rad) / 2
        return Const.of(pref) * root * root, om, th
    rad = inner_c + k_mid / iv.sqrt(a1 * a2) + k_last * (1 / a1 + 1 / a2)
    root = om / 6 + iv.sqrt(rad) / 2
    return pref * root * root, om, th


def as_param(x) -> ParamExpr:
    return x if isinstance(x, ParamExpr) else Const.of(iv.as_cert(x))


@dataclass(frozen=True)
class LaurentProvider:
    """Two-logarithm lower bound of Laurent type with parameters (varrho, mu).

    With sigma = (1 + 2mu - mu^2)/2, lambda = sigma log varrho and
    h = D(log P - s) >= max(D(log(b1/a2 + b2/a1) + log lambda + 1.75) + 0.06,
    lambda, D log 2 / 2) it gives
    log|Lambda'| >= -C (h + lambda/sigma)^2 a1 a2 - sqrt(omega) theta (h + lambda/sigma)
    - log(C' (h + lambda/sigma)^2 a1 a2).
    """

    name: str = "laurent"

    def __call__(self, form: TwoLogForm, varrho, mu, cD: int) -> LogSquareBound:
        vr, mu_q = as_fraction(varrho), as_fraction(mu)
        if vr <= 1 or not Fraction(1, 3) <= mu_q <= 1:
            return LogSquareBound(None, None, CertScalar(0), False, "needs varrho > 1 and 1/3 <= mu <= 1")
        problem = form.problem
        D = CertScalar(cD)
        mu_c = CertScalar(mu_q)
        sig = (1 + 2 * mu_c - mu_c * mu_c) / 2
        log_vr = iv.log(CertScalar(vr))
        lam = sig * log_vr
        a1, a2 = form.sizes(vr)
        kappa = _cross_coefficient(form, (a1, a2))
        if not kappa.is_finite() or not kappa.certainly_positive():
            return LogSquareBound(None, None, CertScalar(0), False, "coefficient ratio is not bounded")
        s = -(iv.log(kappa) + iv.log(lam) + Fraction(7, 4) + Fraction(6, 100) / D)
        s = CertScalar(s.lo)  # a smaller shift only enlarges h
        log_pf = iv.log(problem.P_floor)
        floor_h = iv.maximum(lam, D * iv.log(CertScalar(2)) / 2)
        if not (D * (log_pf - s)).certainly_ge(floor_h):
            s = CertScalar((log_pf - floor_h / D).lo)
        u_min = CertScalar((log_pf - s).lo)
        if not u_min.certainly_positive():
            return LogSquareBound(None, None, s, False, "log P_floor does not exceed the shift")
        h_min = D * u_min
        H = h_min / lam + 1 / sig
        C, om, th = _laurent_C(mu_c, lam, sig, H, a1, a2)
        Cp = sqrt(C * Const.of(sig * om * th / (lam * lam * lam * mu_c)))
        psi = 1 + log_vr / (D * u_min)
        sqrt_e = iv.sqrt(CertScalar.e())
        if u_min.certainly_ge(sqrt_e):
            c_log = iv.minimum(1 / CertScalar.e(), 2 * iv.log(u_min) / (u_min * u_min))
        else:
            c_log = 1 / CertScalar.e()
        # (h + lambda/sigma)^2 = D^2 psi(P)^2 u^2 with psi(P) <= psi, u = log P - s >= u_min;
        # the linear and logarithmic terms are absorbed into u^2 using u >= u_min
        Dpsi2 = D * D * psi * psi
        alpha = C * a1 * a2 * Const.of(Dpsi2) + Const.of(iv.sqrt(om) * th * D * psi / u_min + c_log)
        beta = log(Cp * Const.of(Dpsi2) * a1 * a2)
        consts = dict(kappa=kappa, s=s, u_min=u_min, lam=lam, sigma=sig, H=H, omega=om, theta=th, psi=psi, c_log=c_log, C=C)
        return LogSquareBound(alpha, beta, s, True, "", consts)


@dataclass(frozen=True)
class UnboundedProvider:
    """Stub provider that never yields a bound (exercises the unbounded path)."""

    name: str = "unbounded"

    def __call__(self, form: TwoLogForm, varrho, mu, cD: int) -> LogSquareBound:
        return LogSquareBound(None, None, CertScalar(0), True, "no two-logarithm bound available")


LAURENT = LaurentProvider()


def two_log_lower_bound(form: TwoLogForm, varrho, mu, provider: TwoLogProvider = LAURENT) -> LogSquareBound:
    """Certified lower bound for log|Lambda'| (an expression in P and Y)."""
    res = provider(form, varrho, mu, form.problem.cD)
    if not res.ok:
        raise ProviderHypothesisFailed(f"{provider.name}: {res.detail}")
    return res


def case_bound(form: TwoLogForm, lsb: LogSquareBound) -> CertScalar:
    """Largest target value compatible with the two-log bound and the upper bound
    log|u_e Lambda| <= log U_e - G P + H."""
    if lsb.unbounded:
        return CertScalar("inf")
    problem = form.problem
    G, H = problem.decreasing_part()
    assert lsb.alpha is not None and lsb.beta is not None
    A = sup_y(problem, (H + log(form.U_elim) + lsb.beta) / G)
    B = sup_y(problem, lsb.alpha / G)
    if not A.is_finite() or not B.is_finite():
        return CertScalar("inf")
    es = iv.exp(lsb.shift)
    # P = e^s x with log x = log P - s:  x <= A/e^s + (B/e^s) (log x)^2
    x = solve_pw(iv.maximum(A / es, 0), B / es, 2)
    return CertScalar((es * x).hi)


# -- float prefilter over the (varrho, mu) grid --------------------------------------------------


def _float_solve_pw(a, b, h):
    with np.errstate(all="ignore"):
        c = h * np.power(b, 1.0 / h)
        lc = np.log(c)
        val = np.power(c * lc + lc / (lc - 1) * (np.power(np.maximum(a, 0), 1.0 / h) + c * np.log(lc)), h)
    return np.where((lc > 1) & (b > (1.0 / h) ** h), val, np.inf)


def _float_case_bounds(form: TwoLogForm, varrhos: np.ndarray, mus: np.ndarray) -> np.ndarray:
    """Float estimate of the case bound on the (varrho, mu) grid (rows: varrho)."""
    problem = form.problem
    y = problem.scale_symbol
    ys = sample_points(problem)
    D = float(problem.cD)
    G, Hc = problem.decreasing_part()
    Pf = problem.P_floor.mid
    vr = varrhos[:, None]
    mu = mus[None, :]
    sig = (1 + 2 * mu - mu * mu) / 2
    lam = sig * np.log(vr)
    per_p = []
    for c in form.coeffs:
        slope, offset = affine_in(c, TARGET_SYMBOL)
        per_p.append((slope, offset))
    rows = []
    for Y in ys:
        env = {} if y is None else {y: Y}
        ell = [float(eval_float(e, env)) for e in form.abs_logs]
        hh = [float(eval_float(e, env)) for e in form.heights]
        pp = [float(eval_float(sl, env)) + max(float(eval_float(of, env)), 0.0) / Pf for sl, of in per_p]
        if problem.case == "real":
            a = [np.maximum(1.0, (vr - 1) * ell[i] + 2 * D * hh[i]) for i in range(2)]
        else:
            a = [np.maximum(1.0, vr * min(ell[i], math.pi) + 2 * D * hh[i]) for i in range(2)]
        rows.append(dict(a=a, kappa=pp[0] / a[1] + pp[1] / a[0], Ue=float(eval_float(form.U_elim, env)),
                         G=float(eval_float(G, env)), H=float(eval_float(Hc, env))))
    with np.errstate(all="ignore"):
        kappa = np.max(np.stack([np.broadcast_to(r["kappa"], vr.shape) for r in rows]), axis=0)
        s = -(np.log(kappa) + np.log(lam) + 1.75 + 0.06 / D)
        floor_h = np.maximum(lam, D * math.log(2) / 2)
        s = np.where(D * (math.log(Pf) - s) >= floor_h, s, math.log(Pf) - floor_h / D)
        u_min = math.log(Pf) - s
        H = D * u_min / lam + 1 / sig
        q = np.sqrt(1 + 1 / (4 * H * H))
        om = 2 * (1 + q)
        th = q + 1 / (2 * H)
        psi = 1 + np.log(vr) / (D * u_min)
        c_log = np.where(u_min >= math.sqrt(math.e), np.minimum(1 / math.e, 2 * np.log(u_min) / u_min**2), 1 / math.e)
        A = np.full(np.broadcast(vr, mu).shape, -np.inf)
        B = np.full_like(A, -np.inf)
        for r in rows:
            a1, a2 = r["a"]
            rad = om * om / 9 + 8 * lam * om**1.25 * th**0.25 / (3 * np.sqrt(a1 * a2) * np.sqrt(H)) + 4 / 3 * (1 / a1 + 1 / a2) * lam * om / H
            C = mu / (lam**3 * sig) * (om / 6 + 0.5 * np.sqrt(rad)) ** 2
            Cp = np.sqrt(C * sig * om * th / (lam**3 * mu))
            alpha = C * a1 * a2 * D * D * psi * psi + np.sqrt(om) * th * D * psi / u_min + c_log
            beta = np.log(Cp * D * D * psi * psi * a1 * a2)
            A = np.maximum(A, (r["H"] + math.log(max(r["Ue"], 1e-300)) + beta) / r["G"])
            B = np.maximum(B, alpha / r["G"])
        es = np.exp(s)
        out = es * _float_solve_pw(A / es, B / es, 2.0)
    return np.where(np.isfinite(out), out, np.inf)


# -- combining the cases ---------------------------------------------------------------------------


def _frange(lo, hi, step) -> list[Fraction]:
    lo, hi, step = as_fraction(lo), as_fraction(hi), as_fraction(step)
    n = int((hi - lo) / step)
    return [lo + k * step for k in range(n + 1)]


@dataclass(frozen=True)
class DegenerateConfig:
    varrhos: tuple[Fraction, ...] = tuple(_frange(7, 11, Fraction(1, 5)))
    mus: tuple[Fraction, ...] = tuple(_frange(Fraction(1, 2), Fraction(7, 10), Fraction(1, 100)))
    try_all_eliminations: bool = True
    provider: TwoLogProvider = LAURENT
    certify_top: int = 3

    @classmethod
    def fixed(cls, varrho, mu, **kw) -> "DegenerateConfig":
        return cls(varrhos=(as_fraction(varrho),), mus=(as_fraction(mu),), **kw)


@dataclass(frozen=True)
class CaseResult:
    eliminated_index: int
    vanishing_index: int | None
    varrho: Fraction | None
    mu: Fraction | None
    bound: CertScalar
    form: TwoLogForm | None = field(default=None, compare=False, repr=False)
    constants: dict = field(default_factory=dict, compare=False, repr=False)


def best_case_bound(form: TwoLogForm, cfg: DegenerateConfig) -> CaseResult:
    """Minimize the case bound over the (varrho, mu) grid.

    A float estimate ranks the grid; the best few points are certified and the
    smallest certified value wins (ties broken by (varrho, mu)).
    """
    vr = np.asarray([float(v) for v in cfg.varrhos])
    mu = np.asarray([float(m) for m in cfg.mus])
    if isinstance(cfg.provider, LaurentProvider):
        est = _float_case_bounds(form, vr, mu)
        order = sorted(
            ((float(est[i, j]), cfg.varrhos[i], cfg.mus[j]) for i in range(len(vr)) for j in range(len(mu))),
            key=lambda t: (t[0], t[1], t[2]),
        )
        picks = [(v, m) for e, v, m in order if math.isfinite(e)][: max(1, cfg.certify_top)]
        if not picks:
            picks = [(cfg.varrhos[0], cfg.mus[0])]
    else:
        picks = [(cfg.varrhos[0], cfg.mus[0])]
    best: CaseResult | None = None
    for v, m in picks:
        lsb = cfg.provider(form, v, m, form.problem.cD)
        if not lsb.ok:
            continue
        try:
            b = case_bound(form, lsb)
        except HypothesisFailed:
            b = CertScalar("inf")
        cand = CaseResult(form.eliminated_index, form.vanishing_index, v, m, b, form, lsb.constants)
        if best is None or b.hi_float < best.bound.hi_float or (b.hi_float == best.bound.hi_float and (v, m) < (best.varrho, best.mu)):
            best = cand
    if best is None:
        return CaseResult(form.eliminated_index, form.vanishing_index, None, None, CertScalar("inf"), form)
    return best


@dataclass(frozen=True)
class EliminationResult:
    primary: CaseResult
    fallback: CaseResult | None

    @property
    def bound(self) -> CertScalar:
        fb = self.fallback.bound if self.fallback is not None else CertScalar("inf")
        return iv.maximum(self.primary.bound, fb)

    @property
    def binding(self) -> CaseResult:
        if self.fallback is not None and self.fallback.bound.hi_float > self.primary.bound.hi_float:
            return self.fallback
        return self.primary


@dataclass(frozen=True)
class DegenerateResult:
    B3: CertScalar
    c1: CertScalar | Inapplicable
    u: URelationBounds | None
    eliminations: tuple[EliminationResult, ...]
    chosen: EliminationResult | None
    flags: tuple[str, ...]

    @property
    def c2_bound(self) -> CertScalar:
        return self.chosen.bound if self.chosen is not None else CertScalar("inf")

    @property
    def binding(self) -> CaseResult | None:
        return None if self.chosen is None else self.chosen.binding


def heuristic_order(params: KitParams, problem: LinearFormProblem, ub: URelationBounds) -> list[int]:
    """Admissible indices (0-based), smallest a_i first."""
    y = problem.scale_symbol
    env = {} if y is None else {y: problem.Y_min.mid}
    sizes = [float(eval_float(a, env)) for a in params.a]
    return sorted(_admissible(ub), key=lambda i: (sizes[i], i))


def degenerate_bound(params: KitParams, problem: LinearFormProblem, cfg: DegenerateConfig | None = None) -> DegenerateResult:
    """B3: the larger of the small-coefficient cap and the relation-case bound.

    The relation case is split by elimination index e: u_e != 0 (eliminate
    b_e) and u_e = 0 (eliminate another admissible index with U_e = 0).  With
    ``try_all_eliminations`` the best e is used, otherwise the heuristic one.
    """
    cfg = cfg or DegenerateConfig()
    flags: list[str] = []
    c1 = c1_case_bound(params, problem)
    if isinstance(c1, Inapplicable):
        flags.append("C1 " + EXCLUDED)
    try:
        ub = u_bounds(params, problem)
    except DenominatorNonpositive:
        ub = None
        flags.append("no relation case")
    results: list[EliminationResult] = []
    chosen = None
    if ub is not None:
        order = heuristic_order(params, problem, ub)
        if not order:
            raise NoConstantUBound("no coefficient has a relation bound independent of the scale variable")
        if not cfg.try_all_eliminations:
            order = order[:1]
        cache: dict = {}

        def run(e: int, zero: int | None) -> CaseResult:
            key = (e, zero)
            if key not in cache:
                if zero is None:
                    form = eliminate_and_reduce(problem, ub, e + 1)
                else:
                    form = eliminate_and_reduce(problem, ub, zero + 1, zero_u_case=True, fallback_index=e + 1)
                cache[key] = best_case_bound(form, cfg)
            return cache[key]

        for e in order:
            if iv.as_cert(const_floor(ub.U[e])).certainly_lt(1):
                # |u_e| <= U_e < 1 forces u_e = 0: only the fallback remains
                prim = CaseResult(e + 1, None, None, None, CertScalar("-inf"))
            else:
                prim = run(e, None)
            fbs = [run(e2, e) for e2 in _admissible(ub) if e2 != e]
            fb = min(fbs, key=lambda r: (r.bound.hi_float, r.eliminated_index)) if fbs else None
            if fb is None:
                fb = CaseResult(0, e + 1, None, None, CertScalar("inf"))
            results.append(EliminationResult(prim, fb))
        chosen = min(results, key=lambda r: (r.bound.hi_float, order.index(r.primary.eliminated_index - 1)))
    c2 = chosen.bound if chosen is not None else CertScalar("-inf")
    B3 = c2
    if not isinstance(c1, Inapplicable):
        B3 = iv.maximum(B3, c1)
    B3 = CertScalar(B3.hi)
    if not B3.is_finite():
        flags.append(UNBOUNDED)
    elif B3.certainly_lt(problem.P_floor):
        flags.append(EXCLUDED)
    return DegenerateResult(B3, c1, ub, tuple(results), chosen, tuple(flags))


def const_floor(e: ParamExpr) -> CertScalar:
    from .rigor import const_value, is_constant

    return const_value(e) if is_constant(e) else CertScalar("inf")


__all__ = [
    "Inapplicable",
    "URelationBounds",
    "TwoLogForm",
    "LogSquareBound",
    "TwoLogProvider",
    "LaurentProvider",
    "UnboundedProvider",
    "LAURENT",
    "DegenerateConfig",
    "CaseResult",
    "EliminationResult",
    "DegenerateResult",
    "c1_case_bound",
    "u_bounds",
    "u_bounds_from_ints",
    "eliminate_and_reduce",
    "reconstruct_relation",
    "two_log_lower_bound",
    "case_bound",
    "best_case_bound",
    "heuristic_order",
    "degenerate_bound",
    "UNBOUNDED",
    "EXCLUDED",
]
