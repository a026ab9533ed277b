"""Pipeline driver: first bound, parameter search, degenerate step and the
iteration P_max <- min(P_max, max(B2, B3)).

Every number placed in a report comes from the certified path; the float
screen only decides which parameter tuples are worth certifying.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from typing import Any, Sequence

from .degenerate import DegenerateConfig, DegenerateResult, Inapplicable, degenerate_bound
from .errors import NoFeasibleParams, InvariantViolated, SchemaError
from .kit import PROFILES, CertifiedKit, as_fraction, certify, objective_value, screen_grid
from .matveev import FirstBound, first_bound
from .problem import LinearFormProblem
from .rigor import CertScalar
from .rigor import interval as iv

REPORT_SCHEMA_VERSION = 1


def grid_values(lo, hi, count: int) -> tuple[Fraction, ...]:
    """``count`` equal steps from lo to hi (count + 1 points, both ends included)."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    if count < 1 or hi < lo:
        raise ValueError("need count >= 1 and lo <= hi")
    if hi == lo:
        return (lo,)
    return tuple(lo + (hi - lo) * k / count for k in range(count + 1))


@dataclass(frozen=True)
class SearchConfig:
    """Grid definition for the parameter searches (ranges are inclusive)."""

    chi_range: tuple[Any, Any] = ("0.5", "1.5")
    chi_count: int = 20
    L_range: tuple[int, int] = (100, 200)
    m_range: tuple[Any, Any] = (4, 9)
    m_count: int = 20
    rho_range: tuple[Any, Any] = (7, 12)
    rho_count: int = 20
    varrho_range: tuple[Any, Any] = (7, 11)
    varrho_count: int = 20
    mu_range: tuple[Any, Any] = ("0.5", "0.7")
    mu_count: int = 20
    objective: str = "KL log rho"
    profile: str = "total_degree"
    try_all_eliminations: bool = True
    certify_limit: int = 40
    jobs: int = 1

    def __post_init__(self):
        for name in ("chi_count", "m_count", "rho_count", "varrho_count", "mu_count", "certify_limit", "jobs"):
            if getattr(self, name) < 1:
                raise SchemaError(f"{name} must be >= 1")
        for name in ("chi_range", "L_range", "m_range", "rho_range", "varrho_range", "mu_range"):
            lo, hi = getattr(self, name)
            if as_fraction(lo) > as_fraction(hi):
                raise SchemaError(f"{name} is empty")
        if self.objective != "KL log rho":
            raise SchemaError("the only supported objective is 'KL log rho'")
        if self.profile not in PROFILES:
            raise SchemaError(f"unknown profile {self.profile!r}")

    @property
    def chis(self) -> tuple[Fraction, ...]:
        return grid_values(*self.chi_range, self.chi_count)

    @property
    def Ls(self) -> tuple[int, ...]:
        return tuple(range(int(self.L_range[0]), int(self.L_range[1]) + 1))

    @property
    def ms(self) -> tuple[Fraction, ...]:
        return grid_values(*self.m_range, self.m_count)

    @property
    def rhos(self) -> tuple[Fraction, ...]:
        return grid_values(*self.rho_range, self.rho_count)

    def degenerate_config(self) -> DegenerateConfig:
        return DegenerateConfig(
            varrhos=grid_values(*self.varrho_range, self.varrho_count),
            mus=grid_values(*self.mu_range, self.mu_count),
            try_all_eliminations=self.try_all_eliminations,
        )

    def describe(self) -> dict:
        d = asdict(self)
        d.pop("jobs")
        return {k: (list(map(str, v)) if isinstance(v, tuple) else v) for k, v in d.items()}


PRESETS: dict[str, SearchConfig] = {
    "fibonacci": SearchConfig(),
    "x2plus7": SearchConfig(
        chi_range=("0.04", "0.24"),
        L_range=(30, 200),
        m_range=(10, 30),
        rho_range=(3, 13),
        varrho_range=(100, 300),
    ),
}


def default_config(problem: LinearFormProblem) -> SearchConfig:
    return PRESETS.get(problem.name, SearchConfig())


# -- parameter search ------------------------------------------------------------------------------------


@dataclass(frozen=True)
class ChiOutcome:
    """Best certified tuple for one chi (None if nothing certified)."""

    chi: Fraction
    kit: CertifiedKit | None
    objective: CertScalar | None
    screened: int


def _best_for_chi(problem: LinearFormProblem, P_max, chi, cfg: SearchConfig, zero_conditions: bool = True) -> ChiOutcome:
    scr = screen_grid(problem, P_max, chi, cfg.Ls, cfg.ms, cfg.rhos, cfg.profile, zero_conditions=zero_conditions)
    cands = scr.candidates()
    for _, L, m, rho in cands[: cfg.certify_limit]:
        kit = certify(problem, P_max, chi, L, m, rho, cfg.profile, zero_conditions=zero_conditions)
        if kit is not None:
            return ChiOutcome(as_fraction(chi), kit, objective_value(kit.params, problem), len(cands))
    return ChiOutcome(as_fraction(chi), None, None, len(cands))


def _pmap(fn, tasks: Sequence[tuple], jobs: int) -> list:
    """Ordered map; the result order never depends on the worker count."""
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as ex:
        futs = [ex.submit(fn, *t) for t in tasks]
        return [f.result() for f in futs]


@dataclass(frozen=True)
class ParamSearchResult:
    best: CertifiedKit
    objective: CertScalar
    per_chi: tuple[ChiOutcome, ...]


def grid_search_params(problem: LinearFormProblem, P_max, cfg: SearchConfig | None = None, zero_conditions: bool = True) -> ParamSearchResult:
    """Certified tuple minimizing K L log(rho) at Y_min over the grid."""
    cfg = cfg or default_config(problem)
    P_max = iv.as_cert(P_max)
    if not P_max.is_finite():
        raise NoFeasibleParams("P_max must be finite")
    outs = _pmap(_best_for_chi, [(problem, P_max, chi, cfg, zero_conditions) for chi in cfg.chis], cfg.jobs)
    ok = [o for o in outs if o.kit is not None]
    if not ok:
        raise NoFeasibleParams("no grid point passes the main inequality and the zero-estimate conditions")
    best = min(ok, key=lambda o: (o.objective.hi_float, o.chi, o.kit.params.L, o.kit.params.m, o.kit.params.rho))
    return ParamSearchResult(best.kit, best.objective, tuple(outs))


# -- report ----------------------------------------------------------------------------------------


def _up(x) -> float | None:
    """Upper end as a double rounded up (None for a missing value)."""
    if x is None:
        return None
    return iv.as_cert(x).hi_float


def _num(x) -> float | None:
    return None if x is None else float(x)


@dataclass
class CaseRecord:
    eliminated_index: int
    vanishing_index: int | None
    varrho: float | None
    mu: float | None
    bound: float


@dataclass
class IterationRow:
    iteration: int
    initial_bound: float
    L: int | None
    m: float | None
    rho: float | None
    chi: float | None
    varrho: float | None
    mu: float | None
    B2: float | None
    B3: float | None
    new_bound: float
    cases: list[CaseRecord] = field(default_factory=list)
    c1_cap: float | None = None
    c1_excluded: bool = False
    flags: list[str] = field(default_factory=list)
    certificates: dict = field(default_factory=dict)


@dataclass
class BoundReport:
    problem: str
    B1: float
    rows: list[IterationRow]
    final_bound: float
    target_floor: float
    precision: int
    config: dict
    mode: str = "search"
    B1_details: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    optimal_reference: float | None = None
    timing: dict | None = None
    schema_version: int = REPORT_SCHEMA_VERSION

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["timing"] is None:
            d.pop("timing")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self) -> str:
        return format_table(self)


def report_from_dict(d: dict) -> BoundReport:
    """Parse a structured report (inverse of BoundReport.to_dict)."""
    if d.get("schema_version") != REPORT_SCHEMA_VERSION:
        raise SchemaError(f"unsupported report schema_version {d.get('schema_version')!r}")
    known = {f for f in BoundReport.__dataclass_fields__}
    extra = set(d) - known
    if extra:
        raise SchemaError(f"unknown report keys: {sorted(extra)}")
    d = dict(d)
    rows = []
    for r in d.pop("rows"):
        r = dict(r)
        r["cases"] = [CaseRecord(**c) for c in r.get("cases", [])]
        rows.append(IterationRow(**r))
    return BoundReport(rows=rows, **d)


def report_from_json(text: str) -> BoundReport:
    return report_from_dict(json.loads(text))


def _fmt_bound(x: float | None) -> str:
    if x is None:
        return "-"
    if math.isinf(x):
        return "inf"
    return f"{x:.4g}"


def _fmt_par(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float) and x == int(x):
        return str(int(x))
    return f"{x:g}"


TABLE_COLUMNS = ("iteration", "initial upper bound", "L", "m", "ρ", "χ", "ϱ", "μ", "new upper bound")


def format_table(report: BoundReport) -> str:
    """Human-readable iteration table."""
    head = list(TABLE_COLUMNS)
    body = [
        [
            str(r.iteration),
            _fmt_bound(r.initial_bound),
            _fmt_par(r.L),
            _fmt_par(r.m),
            _fmt_par(r.rho),
            _fmt_par(r.chi),
            _fmt_par(r.varrho),
            _fmt_par(r.mu),
            _fmt_bound(r.new_bound),
        ]
        for r in report.rows
    ]
    widths = [max(len(h), *(len(row[i]) for row in body)) if body else len(h) for i, h in enumerate(head)]
    lines = [
        f"problem: {report.problem}   precision: {report.precision} bits   B1 = {_fmt_bound(report.B1)}",
        "  ".join(h.rjust(w) for h, w in zip(head, widths)),
    ]
    lines += ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in body]
    lines.append(f"final upper bound: {_fmt_bound(report.final_bound)}")
    if report.optimal_reference is not None:
        lines.append(f"reference bound ignoring the degenerate case: {_fmt_bound(report.optimal_reference)}")
    lines += [f"note: {n}" for n in report.notes]
    return "\n".join(lines)


# -- iteration ---------------------------------------------------------------------------------------


@dataclass(frozen=True)
class StepOutcome:
    """One chi's certified tuple with its nondegenerate and degenerate bounds."""

    chi: Fraction
    kit: CertifiedKit
    degenerate: DegenerateResult

    @property
    def B2(self) -> CertScalar:
        return self.kit.bound.B2

    @property
    def B3(self) -> CertScalar:
        return self.degenerate.B3

    @property
    def value(self) -> float:
        return max(self.B2.hi_float, self.B3.hi_float)


def _chi_step(problem: LinearFormProblem, P_max, chi, cfg: SearchConfig) -> StepOutcome | None:
    out = _best_for_chi(problem, P_max, chi, cfg)
    if out.kit is None:
        return None
    deg = degenerate_bound(out.kit.params, problem, cfg.degenerate_config())
    return StepOutcome(out.chi, out.kit, deg)


def _row(it: int, P: CertScalar, step: StepOutcome | None, new: CertScalar, problem: LinearFormProblem, flags=()) -> IterationRow:
    if step is None:
        return IterationRow(it, _up(P), None, None, None, None, None, None, None, None, _up(new), flags=list(flags))
    par = step.kit.params
    deg = step.degenerate
    cases = []
    for el in deg.eliminations:
        for c in (el.primary, el.fallback):
            if c is not None and c.eliminated_index:
                cases.append(CaseRecord(c.eliminated_index, c.vanishing_index, _num(c.varrho), _num(c.mu), _up(c.bound)))
    binding = deg.binding
    c1 = deg.c1
    certs = dict(
        main_margin=iv.as_cert(step.kit.main.margin).lo_float,
        zero_conditions={v.name: v.holds for v in step.kit.zero.conditions},
        conversion_eps=_up(step.kit.bound.eps),
    )
    return IterationRow(
        iteration=it,
        initial_bound=_up(P),
        L=par.L,
        m=float(par.m),
        rho=float(par.rho),
        chi=float(par.chi),
        varrho=None if binding is None else _num(binding.varrho),
        mu=None if binding is None else _num(binding.mu),
        B2=_up(step.B2),
        B3=_up(step.B3),
        new_bound=_up(new),
        cases=cases,
        c1_cap=_up(c1.cap if isinstance(c1, Inapplicable) else c1),
        c1_excluded=isinstance(c1, Inapplicable),
        flags=list(deg.flags) + list(flags),
        certificates=certs,
    )


def _floor_note(problem: LinearFormProblem, bound: CertScalar) -> list[str]:
    if bound.certainly_lt(problem.P_floor):
        return [f"excluded below floor: the bound {bound.hi_float:.6g} is below the target floor {problem.P_floor.lo_float:.6g}"]
    return []


def _new_report(problem: LinearFormProblem, s2: FirstBound, cfg: SearchConfig, mode: str) -> BoundReport:
    return BoundReport(
        problem=problem.name,
        B1=_up(s2.B1),
        rows=[],
        final_bound=_up(s2.B1),
        target_floor=problem.P_floor.lo_float,
        precision=iv.get_precision(),
        config=cfg.describe(),
        mode=mode,
        B1_details=dict(a=_up(s2.a), b=_up(s2.b), reference_index=s2.matveev.reference + 1),
    )


def iterate(
    problem: LinearFormProblem,
    cfg: SearchConfig | None = None,
    max_iters: int = 5,
    stop_rel_improvement: float = 0.02,
    timing: bool = False,
) -> BoundReport:
    """B1 from Matveev's theorem, then repeated parameter search and degenerate-case bounds.

    Per chi the best certified tuple gives B2 and, with the same tuple, B3; the
    chi minimizing max(B2, B3) is kept and P_max <- min(P_max, max(B2, B3)).
    """
    cfg = cfg or default_config(problem)
    t0 = time.perf_counter()
    s2 = first_bound(problem)
    report = _new_report(problem, s2, cfg, "search")
    P = CertScalar(s2.B1.hi)
    times = [time.perf_counter() - t0]
    for it in range(1, max_iters + 1):
        t1 = time.perf_counter()
        steps = _pmap(_chi_step, [(problem, P, chi, cfg) for chi in cfg.chis], cfg.jobs)
        steps = [s for s in steps if s is not None]
        if not steps:
            report.notes.append(f"iteration {it}: no certified parameters on the grid")
            break
        best = min(steps, key=lambda s: (s.value, s.chi))
        value = iv.maximum(best.B2, best.B3)
        new = CertScalar(iv.minimum(P, value).hi)
        if new.hi_float > P.hi_float:
            raise InvariantViolated("the iteration bound increased")
        report.rows.append(_row(it, P, best, new, problem))
        times.append(time.perf_counter() - t1)
        improvement = (P.hi_float - new.hi_float) / P.hi_float
        P = new
        if improvement < stop_rel_improvement:
            break
    report.final_bound = _up(P)
    report.notes += _floor_note(problem, P)
    if timing:
        report.timing = dict(first_bound=times[0], iterations=times[1:], total=sum(times))
    return report


# -- replay -----------------------------------------------------------------------------------------


@dataclass(frozen=True)
class ReplayStep:
    L: int
    m: Fraction
    rho: Fraction
    chi: Fraction
    varrho: Fraction
    mu: Fraction


def replay(
    problem: LinearFormProblem,
    steps: Sequence[ReplayStep],
    cfg: SearchConfig | None = None,
    timing: bool = False,
) -> BoundReport:
    """Run the iteration with prescribed parameters for every row."""
    cfg = cfg or default_config(problem)
    t0 = time.perf_counter()
    s2 = first_bound(problem)
    report = _new_report(problem, s2, cfg, "replay")
    P = CertScalar(s2.B1.hi)
    times = [time.perf_counter() - t0]
    for it, st in enumerate(steps, start=1):
        t1 = time.perf_counter()
        kit = certify(problem, P, st.chi, st.L, st.m, st.rho, cfg.profile)
        flags = []
        if kit is None:
            # report the bound anyway, marked as not certified
            from .kit import CertifiedKit, check_main_inequality, check_zero_conditions, derive_params, nondegenerate_bound

            params = derive_params(problem, P, st.chi, st.L, st.m, st.rho)
            kit = CertifiedKit(params, check_main_inequality(params, problem), check_zero_conditions(params, problem, cfg.profile), nondegenerate_bound(params, problem))
            flags.append("parameters NOT certified: " + ", ".join(
                [v.name for v in kit.zero.conditions if not v.holds] + ([] if kit.main.holds else ["main inequality"])))
        dcfg = DegenerateConfig.fixed(st.varrho, st.mu, try_all_eliminations=cfg.try_all_eliminations)
        deg = degenerate_bound(kit.params, problem, dcfg)
        step = StepOutcome(as_fraction(st.chi), kit, deg)
        new = CertScalar(iv.minimum(P, iv.maximum(step.B2, step.B3)).hi)
        row = _row(it, P, step, new, problem, flags)
        row.varrho, row.mu = float(st.varrho), float(st.mu)
        report.rows.append(row)
        times.append(time.perf_counter() - t1)
        P = new
    report.final_bound = _up(P)
    report.notes += _floor_note(problem, P)
    if timing:
        report.timing = dict(first_bound=times[0], iterations=times[1:], total=sum(times))
    return report


# -- reference bound without the degenerate case -------------------------------------------------------


REFERENCE_CONFIG = SearchConfig(
    chi_range=("1e-9", "1e-9"),
    chi_count=1,
    L_range=(30, 300),
    m_range=(2, 12),
    m_count=80,
    rho_range=(3, 16),
    rho_count=104,
)


@dataclass(frozen=True)
class ReferenceResult:
    bound: CertScalar
    history: tuple[float, ...]
    note: str = ""


def optimal_reference(
    problem: LinearFormProblem,
    cfg: SearchConfig | None = None,
    max_iters: int = 10,
    stop_rel_improvement: float = 0.002,
) -> ReferenceResult:
    """Iterate the non-degenerate bound alone (main inequality only)."""
    cfg = cfg or REFERENCE_CONFIG
    P = CertScalar(first_bound(problem).B1.hi)
    hist = []
    for _ in range(max_iters):
        try:
            res = grid_search_params(problem, P, cfg, zero_conditions=False)
        except NoFeasibleParams:
            if not hist:
                return ReferenceResult(CertScalar("inf"), (), "no feasible parameters on the reference grid")
            break
        new = CertScalar(iv.minimum(P, res.best.bound.B2).hi)
        hist.append(new.hi_float)
        improvement = (P.hi_float - new.hi_float) / P.hi_float
        P = new
        if improvement < stop_rel_improvement:
            break
    return ReferenceResult(P, tuple(hist))


def optimal_reference_bound(problem: LinearFormProblem, cfg: SearchConfig | None = None) -> CertScalar:
    """Bound obtained when the degenerate case is ignored (diagnostic; +inf if the grid is infeasible)."""
    return optimal_reference(problem, cfg).bound


def with_overrides(cfg: SearchConfig, **kw) -> SearchConfig:
    return replace(cfg, **kw)


__all__ = [
    "SearchConfig",
    "PRESETS",
    "default_config",
    "grid_values",
    "ChiOutcome",
    "ParamSearchResult",
    "grid_search_params",
    "BoundReport",
    "IterationRow",
    "CaseRecord",
    "report_from_dict",
    "report_from_json",
    "format_table",
    "TABLE_COLUMNS",
    "StepOutcome",
    "iterate",
    "ReplayStep",
    "replay",
    "REFERENCE_CONFIG",
    "ReferenceResult",
    "optimal_reference",
    "optimal_reference_bound",
    "with_overrides",
    "REPORT_SCHEMA_VERSION",
]
