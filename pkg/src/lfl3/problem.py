"""Declarative description of a three-logarithm linear form and its loader.

A problem file is TOML (``schema_version = 1``)::

    schema_version = 1
    name = "fibonacci"

    [form]
    case = "real"            # or "imaginary"
    D = 2                    # degree of the number field
    cD = 2                   # D / [R(alphas) : R]
    w = 2                    # optional: number of roots of unity in the field
    structure = "all_independent"   # or "one_root_of_unity"
    d1 = 1                   # optional lower bounds for gcd(b1, b3), gcd(b2, b3)
    d2 = 1

    [alpha.1]                # alpha.1 .. alpha.3, ordered so that
    height = "log((1+sqrt(5))/2)/2"   # b3|log a3| = b1|log a1| + b2|log a2| +- |Lambda|
    abs_log = "log((1+sqrt(5))/2)"
    # log_abs = ...          # real case: equals abs_log; imaginary: 0 (defaults)
    # nu = 2                 # order, if this alpha is a root of unity

    [coeff.1]
    role = "bounded"         # exactly one coefficient has role "target"
    bound = "P"

    [lambda]
    log_upper = "-2*P*Y + 1" # certified upper bound for log|Lambda|, affine in P

    [symbols.Y]
    min = "1e20"
    [symbols.P]              # P always names the target coefficient
    min = "1e7"

Expressions use the grammar of :mod:`lfl3.rigor.expr`.  Besides ``P`` at
most one further symbol (the scale variable, ``Y`` above) may be declared.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

try:  # Python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

import tomli_w

from .errors import DomainError, ParseError, PreconditionUnverifiable, SchemaError, UndeclaredSymbol
from .rigor import (
    CertScalar,
    Const,
    ParamExpr,
    affine_in,
    certify_nonpositive,
    certify_positive,
    const_value,
    inf_over_domain,
    parse_expr,
    sup_over_domain,
)
from .rigor import interval as iv

SCHEMA_VERSION = 1
TARGET_SYMBOL = "P"
CASES = ("real", "imaginary")
STRUCTURES = ("all_independent", "one_root_of_unity")


@dataclass(frozen=True)
class AlgebraicNumberSpec:
    """Bounds for one algebraic number: height, |log alpha| and log|alpha|."""

    height: ParamExpr
    abs_log: ParamExpr
    log_abs: ParamExpr
    nu: int | None = None


@dataclass(frozen=True)
class CoefficientSpec:
    role: str  # "target" or "bounded"
    bound: ParamExpr
    known_positive: bool = True


@dataclass(frozen=True)
class SymbolDomain:
    name: str
    min: ParamExpr
    max: ParamExpr | None = None

    @property
    def lower(self) -> CertScalar:
        return const_value(self.min)

    @property
    def upper(self) -> CertScalar | None:
        return None if self.max is None else const_value(self.max)


@dataclass(frozen=True)
class MultStructure:
    kind: str
    index: int | None = None  # 1-based index of the root of unity
    nu: int | None = None


@dataclass(frozen=True)
class LinearFormProblem:
    """A linear form b1 log a1 + b2 log a2 - b3 log a3 in normal form."""

    name: str
    case: str
    D: int
    cD: int
    w: int | None
    alphas: tuple[AlgebraicNumberSpec, AlgebraicNumberSpec, AlgebraicNumberSpec]
    coeffs: tuple[CoefficientSpec, CoefficientSpec, CoefficientSpec]
    lambda_log_upper: ParamExpr
    mult: MultStructure
    symbols: tuple[SymbolDomain, ...]
    d1: int = 1
    d2: int = 1
    lambda_decomposition: tuple[ParamExpr, ParamExpr] = field(default=None, compare=False, repr=False)  # type: ignore[assignment]

    # -- derived accessors ---------------------------------------------------------

    @property
    def target_index(self) -> int:
        """0-based index of the coefficient whose size is being bounded."""
        return next(i for i, c in enumerate(self.coeffs) if c.role == "target")

    @property
    def scale_symbol(self) -> str | None:
        for s in self.symbols:
            if s.name != TARGET_SYMBOL:
                return s.name
        return None

    def domain(self, name: str) -> SymbolDomain:
        for s in self.symbols:
            if s.name == name:
                return s
        raise UndeclaredSymbol(name)

    @property
    def P_floor(self) -> CertScalar:
        return self.domain(TARGET_SYMBOL).lower

    @property
    def Y_min(self) -> CertScalar | None:
        name = self.scale_symbol
        return None if name is None else self.domain(name).lower

    @property
    def Y_max(self) -> CertScalar | None:
        name = self.scale_symbol
        return None if name is None else self.domain(name).upper

    @property
    def all_independent(self) -> bool:
        return self.mult.kind == "all_independent"

    def decreasing_part(self) -> tuple[ParamExpr, ParamExpr]:
        """(G, H) with lambda_log_upper = -G*P + H."""
        return self.lambda_decomposition


# -- loading ------------------------------------------------------------------------------

_TOP_KEYS = {"schema_version", "name", "form", "alpha", "coeff", "lambda", "symbols"}
_FORM_KEYS = {"case", "D", "cD", "w", "structure", "d1", "d2"}
_ALPHA_KEYS = {"height", "abs_log", "log_abs", "nu"}
_COEFF_KEYS = {"role", "bound", "known_positive"}
_SYMBOL_KEYS = {"min", "max"}


def _require(table: dict, keys: set[str], required: set[str], where: str) -> None:
    extra = sorted(set(table) - keys)
    missing = sorted(required - set(table))
    if extra or missing:
        parts = []
        if missing:
            parts.append(f"missing {missing}")
        if extra:
            parts.append(f"unexpected {extra}")
        raise SchemaError(f"{where}: " + ", ".join(parts))


def _table(doc: dict, key: str, where: str) -> dict:
    val = doc.get(key)
    if not isinstance(val, dict):
        raise SchemaError(f"{where}: [{key}] must be a table")
    return val


def _indexed(doc: dict, key: str) -> list[dict]:
    tbl = _table(doc, key, "problem")
    if sorted(tbl) != ["1", "2", "3"]:
        raise SchemaError(f"[{key}] needs exactly the entries 1, 2, 3 (got {sorted(tbl)})")
    out = []
    for k in ("1", "2", "3"):
        if not isinstance(tbl[k], dict):
            raise SchemaError(f"[{key}.{k}] must be a table")
        out.append(tbl[k])
    return out


def _expr_text(value, where: str) -> str:
    if isinstance(value, bool):
        raise SchemaError(f"{where}: expected an expression")
    if isinstance(value, (int, float)):
        return repr(value) if isinstance(value, float) else str(value)
    if not isinstance(value, str):
        raise SchemaError(f"{where}: expected an expression string")
    return value


def _parse(value, symbols, where: str) -> ParamExpr:
    return parse_expr(_expr_text(value, where), symbols, path=where)


def _int_field(tbl: dict, key: str, where: str, minimum: int = 1) -> int:
    v = tbl[key]
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise SchemaError(f"{where}.{key} must be an integer >= {minimum}")
    return v


def problem_from_dict(doc: dict, source: str = "<problem>") -> LinearFormProblem:
    _require(doc, _TOP_KEYS, _TOP_KEYS - {"name"}, source)
    if doc["schema_version"] != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema_version {doc['schema_version']!r}")
    name = str(doc.get("name", Path(source).stem))

    # symbols first: every expression is checked against them
    sym_tbl = _table(doc, "symbols", source)
    if TARGET_SYMBOL not in sym_tbl:
        raise SchemaError(f"[symbols] must declare the target symbol {TARGET_SYMBOL}")
    if len(sym_tbl) > 2:
        raise SchemaError("at most one scale symbol besides P may be declared")
    symbols = []
    for sname, spec in sorted(sym_tbl.items()):
        where = f"symbols.{sname}"
        if not isinstance(spec, dict):
            raise SchemaError(f"[{where}] must be a table")
        _require(spec, _SYMBOL_KEYS, {"min"}, where)
        lo = _parse(spec["min"], (), f"{where}.min")
        hi = _parse(spec["max"], (), f"{where}.max") if "max" in spec else None
        dom = SymbolDomain(sname, lo, hi)
        low = dom.lower
        if not low.certainly_ge(1):
            raise DomainError(f"{where}: lower bound must be >= 1 (got {low!r})")
        if hi is not None and not dom.upper.certainly_ge(low):
            raise DomainError(f"{where}: empty domain")
        symbols.append(dom)
    names = [s.name for s in symbols]
    scale = [n for n in names if n != TARGET_SYMBOL]
    scale_syms = tuple(scale)

    form = _table(doc, "form", source)
    _require(form, _FORM_KEYS, {"case", "D", "cD", "structure"}, "form")
    case = form["case"]
    if case not in CASES:
        raise SchemaError(f"form.case must be one of {CASES}")
    D = _int_field(form, "D", "form")
    cD = _int_field(form, "cD", "form")
    w = _int_field(form, "w", "form") if "w" in form else None
    d1 = _int_field(form, "d1", "form") if "d1" in form else 1
    d2 = _int_field(form, "d2", "form") if "d2" in form else 1
    structure = form["structure"]
    if structure not in STRUCTURES:
        raise SchemaError(f"form.structure must be one of {STRUCTURES}")

    alphas = []
    for i, tbl in enumerate(_indexed(doc, "alpha"), start=1):
        where = f"alpha.{i}"
        _require(tbl, _ALPHA_KEYS, {"height", "abs_log"}, where)
        h = _parse(tbl["height"], scale_syms, f"{where}.height")
        al = _parse(tbl["abs_log"], scale_syms, f"{where}.abs_log")
        if "log_abs" in tbl:
            la = _parse(tbl["log_abs"], scale_syms, f"{where}.log_abs")
        else:
            la = al if case == "real" else Const(text="0")
        if case == "real" and la != al:
            raise SchemaError(f"{where}: in the real case log_abs must equal abs_log")
        if case == "imaginary" and not (not la.free_symbols() and const_value(la) == CertScalar(0)):
            raise SchemaError(f"{where}: in the imaginary case log_abs must be 0")
        nu = _int_field(tbl, "nu", where, minimum=2) if "nu" in tbl else None
        alphas.append(AlgebraicNumberSpec(h, al, la, nu))

    roots = [i for i, a in enumerate(alphas, start=1) if a.nu is not None]
    if structure == "all_independent":
        if roots:
            raise SchemaError("structure all_independent cannot declare a root of unity (nu)")
        mult = MultStructure("all_independent")
    else:
        if len(roots) != 1:
            raise SchemaError("structure one_root_of_unity needs exactly one alpha with nu")
        mult = MultStructure("one_root_of_unity", roots[0], alphas[roots[0] - 1].nu)

    coeffs = []
    all_syms = tuple(names)
    for i, tbl in enumerate(_indexed(doc, "coeff"), start=1):
        where = f"coeff.{i}"
        _require(tbl, _COEFF_KEYS, {"role"}, where)
        role = tbl["role"]
        if role not in ("target", "bounded"):
            raise SchemaError(f"{where}.role must be 'target' or 'bounded'")
        if role == "target":
            bound = _parse(tbl.get("bound", TARGET_SYMBOL), all_syms, f"{where}.bound")
        else:
            if "bound" not in tbl:
                raise SchemaError(f"{where}: bounded coefficients need a bound")
            bound = _parse(tbl["bound"], all_syms, f"{where}.bound")
        try:
            affine_in(bound, TARGET_SYMBOL)
        except ValueError as exc:
            raise SchemaError(f"{where}.bound must be affine in P: {exc}") from None
        kp = tbl.get("known_positive", True)
        if not isinstance(kp, bool):
            raise SchemaError(f"{where}.known_positive must be a boolean")
        coeffs.append(CoefficientSpec(role, bound, kp))
    if sum(c.role == "target" for c in coeffs) != 1:
        raise SchemaError("exactly one coefficient must have role 'target'")

    lam = _table(doc, "lambda", source)
    _require(lam, {"log_upper"}, {"log_upper"}, "lambda")
    upper = _parse(lam["log_upper"], all_syms, "lambda.log_upper")
    try:
        coef, rest = affine_in(upper, TARGET_SYMBOL)
    except ValueError as exc:
        raise SchemaError(f"lambda.log_upper must be affine in P: {exc}") from None

    return LinearFormProblem(
        name=name,
        case=case,
        D=D,
        cD=cD,
        w=w,
        alphas=tuple(alphas),  # type: ignore[arg-type]
        coeffs=tuple(coeffs),  # type: ignore[arg-type]
        lambda_log_upper=upper,
        mult=mult,
        symbols=tuple(symbols),
        d1=d1,
        d2=d2,
        lambda_decomposition=(-coef, rest),
    )


def load_problem(text: str, source: str = "<problem>") -> LinearFormProblem:
    """Parse and validate problem text (TOML)."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(str(exc), source) from None
    return problem_from_dict(doc, source)


def load_problem_file(path: str | Path) -> LinearFormProblem:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read problem file: {exc.strerror}", str(p)) from None
    return load_problem(text, str(p))


def problem_to_dict(problem: LinearFormProblem) -> dict:
    doc: dict = {"schema_version": SCHEMA_VERSION, "name": problem.name}
    form: dict = {"case": problem.case, "D": problem.D, "cD": problem.cD, "structure": problem.mult.kind}
    if problem.w is not None:
        form["w"] = problem.w
    form["d1"] = problem.d1
    form["d2"] = problem.d2
    doc["form"] = form
    doc["alpha"] = {}
    for i, a in enumerate(problem.alphas, start=1):
        entry = {"height": a.height.to_text(), "abs_log": a.abs_log.to_text(), "log_abs": a.log_abs.to_text()}
        if a.nu is not None:
            entry["nu"] = a.nu
        doc["alpha"][str(i)] = entry
    doc["coeff"] = {
        str(i): {"role": c.role, "bound": c.bound.to_text(), "known_positive": c.known_positive}
        for i, c in enumerate(problem.coeffs, start=1)
    }
    doc["lambda"] = {"log_upper": problem.lambda_log_upper.to_text()}
    doc["symbols"] = {}
    for s in problem.symbols:
        entry = {"min": s.min.to_text()}
        if s.max is not None:
            entry["max"] = s.max.to_text()
        doc["symbols"][s.name] = entry
    return doc


def serialize(problem: LinearFormProblem) -> str:
    """TOML text that loads back to an equal problem."""
    return tomli_w.dumps(problem_to_dict(problem))


# -- bundled fixtures ----------------------------------------------------------------------

FIXTURE_DIR = Path(__file__).with_name("fixtures")
BUNDLED = {"ex1": "fibonacci.toml", "ex2": "x2plus7.toml"}


def bundled_problem(key: str) -> LinearFormProblem:
    """Load a bundled example by short name (``ex1``/``ex2``) or file stem."""
    fname = BUNDLED.get(key, key if key.endswith(".toml") else f"{key}.toml")
    return load_problem_file(FIXTURE_DIR / fname)


# -- preconditions --------------------------------------------------------------------------


@dataclass(frozen=True)
class Fact:
    name: str
    holds: bool
    detail: str


def sup_y(problem: LinearFormProblem, expr: ParamExpr, **kw) -> CertScalar:
    """Certified supremum over the scale-symbol domain (constant if Y-free)."""
    y = problem.scale_symbol
    if y is None or y not in expr.free_symbols():
        return const_value(expr)
    return sup_over_domain(expr, y, problem.Y_min, problem.Y_max, **kw)


def inf_y(problem: LinearFormProblem, expr: ParamExpr, **kw) -> CertScalar:
    y = problem.scale_symbol
    if y is None or y not in expr.free_symbols():
        return const_value(expr)
    return inf_over_domain(expr, y, problem.Y_min, problem.Y_max, **kw)


def positive_y(problem: LinearFormProblem, expr: ParamExpr, max_evals: int = 400) -> bool:
    """True only if expr > 0 is proved on the whole scale-symbol domain."""
    y = problem.scale_symbol
    if y is None or y not in expr.free_symbols():
        return const_value(expr).certainly_positive()
    return certify_positive(expr, y, problem.Y_min, problem.Y_max, max_evals=max_evals).holds


def nonnegative_y(problem: LinearFormProblem, expr: ParamExpr, max_evals: int = 400) -> bool:
    y = problem.scale_symbol
    if y is None or y not in expr.free_symbols():
        return const_value(expr).certainly_ge(0)
    return certify_nonpositive(-expr, y, problem.Y_min, problem.Y_max, max_evals=max_evals).holds


_sup_y = sup_y
_inf_y = inf_y


def root_of_unity_count_bound(problem: LinearFormProblem) -> CertScalar:
    """Declared w, or the fallback bound w < 2 D^1.6."""
    if problem.w is not None:
        return CertScalar(problem.w)
    return 2 * iv.power(CertScalar(problem.D), Fraction(8, 5))


def validate_preconditions(problem: LinearFormProblem, strict: bool = True) -> list[Fact]:
    """Certify the hypotheses the kit relies on.

    Returns the list of facts; with ``strict`` (default) the first failing
    fact raises :class:`PreconditionUnverifiable`.
    """
    facts: list[Fact] = []
    G, H = problem.decreasing_part()
    y = problem.scale_symbol

    def add(name: str, ok: bool, detail: str):
        facts.append(Fact(name, ok, detail))
        if strict and not ok:
            raise PreconditionUnverifiable(f"{name}: {detail}")

    g_inf = _inf_y(problem, G) if not G.free_symbols() - {y} else None
    if g_inf is None:
        add("lambda decreasing in P", False, "coefficient of P depends on symbols other than the scale symbol")
        return facts
    add(
        "lambda decreasing in P",
        g_inf.certainly_positive(),
        f"log|Lambda| <= -G*P + H with inf G = {g_inf.lo_float:.6g} over the domain",
    )
    # the worst case over P >= P_floor is P = P_floor because G > 0
    at_floor = H - G * Const.of(problem.P_floor)
    top = _sup_y(problem, at_floor)
    w = root_of_unity_count_bound(problem)
    limit = iv.log(2 * CertScalar.pi() / w)
    wsrc = f"w = {problem.w}" if problem.w is not None else f"w < 2*D^1.6 = {w.hi_float:.4f}"
    corner = f"P = {problem.P_floor.lo_float:.6g}" + (f", {y} >= {problem.Y_min.lo_float:.6g}" if y else "")
    add(
        "|Lambda| < 2pi/w",
        top.certainly_lt(limit),
        f"sup log|Lambda| <= {top.hi_float:.6g} < log(2pi/w) = {limit.lo_float:.6g} ({wsrc}; worst corner {corner})",
    )
    for i, a in enumerate(problem.alphas, start=1):
        h_inf = _inf_y(problem, a.height)
        add(f"h(alpha_{i}) >= 0", h_inf.certainly_ge(0), f"inf height = {h_inf.lo_float:.6g}")
        l_inf = _inf_y(problem, a.abs_log)
        need_pos = problem.case == "real" or a.nu is None
        ok = l_inf.certainly_positive() if need_pos else l_inf.certainly_ge(0)
        add(f"|log alpha_{i}| bound positive", ok, f"inf |log alpha_{i}| bound = {l_inf.lo_float:.6g}")
    if problem.all_independent:
        mdesc = "alpha_1, alpha_2, alpha_3 multiplicatively independent (declared)"
    else:
        mdesc = (
            f"alpha_{problem.mult.index} is a root of unity of order {problem.mult.nu}, "
            "the other two multiplicatively independent (declared)"
        )
    add("multiplicative structure", True, mdesc)
    roles = ", ".join(f"b{i}: {c.role} <= {c.bound.to_text()}" for i, c in enumerate(problem.coeffs, start=1))
    add("coefficient roles", True, f"normal form b3|log a3| = b1|log a1| + b2|log a2| +- |Lambda|; {roles}")
    return facts


def coefficient_lower(problem: LinearFormProblem, index: int) -> CertScalar:
    """A lower bound for |b_index| (1 for bounded coefficients, P_floor for the target)."""
    if problem.coeffs[index].role == "target":
        return problem.P_floor
    return CertScalar(1)


__all__ = [
    "AlgebraicNumberSpec",
    "CoefficientSpec",
    "SymbolDomain",
    "MultStructure",
    "LinearFormProblem",
    "Fact",
    "load_problem",
    "load_problem_file",
    "problem_from_dict",
    "problem_to_dict",
    "serialize",
    "bundled_problem",
    "validate_preconditions",
    "root_of_unity_count_bound",
    "coefficient_lower",
    "sup_y",
    "inf_y",
    "positive_y",
    "nonnegative_y",
    "TARGET_SYMBOL",
]
