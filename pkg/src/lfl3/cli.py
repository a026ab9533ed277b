"""Command line front end (``lfl3``)."""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .errors import InputError, InternalError, Lfl3Error, SchemaError
from .rigor import interval as iv

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_INTERNAL, EXIT_MISMATCH = 0, 1, 2, 3, 4
REPLAY_KEYS = ("ex1", "ex2")


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the grid searches")
    p.add_argument("--precision", type=int, default=None, help="working precision in bits (default 128 or $LFL3_PRECISION)")
    p.add_argument("--max-iters", type=int, default=5)
    p.add_argument("--stop-rel", type=float, default=0.02, help="stop when the relative improvement drops below this")
    p.add_argument("--profile", choices=("total_degree", "partial_degree"), default="total_degree")
    p.add_argument("--try-all-eliminations", type=_bool, default=True, metavar="BOOL")
    p.add_argument("--out", type=Path, default=None, help="write the report here instead of stdout")
    p.add_argument("--format", choices=("human", "json"), default="human")
    p.add_argument("--timing", action="store_true", help="include wall-clock timings in the report")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override a search setting, e.g. search.chi_count=10 or search.L_range=100,150")
    p.add_argument("--deterministic", action="store_true", help="accepted for compatibility; runs are always deterministic")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lfl3", description="Certified bounds for linear forms in three logarithms.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("validate", help="check the preconditions of a problem file")
    p.add_argument("problem")
    _add_common(p)
    p = sub.add_parser("bound", help="run the full iteration and report the bound")
    p.add_argument("problem")
    p.add_argument("--reference", action="store_true", help="also compute the bound that ignores the degenerate case")
    _add_common(p)
    p = sub.add_parser("search", help="run only the parameter search for a given P_max")
    p.add_argument("problem")
    p.add_argument("--p-max", required=True, help="current bound for the target coefficient")
    _add_common(p)
    p = sub.add_parser("replay", help="replay a bundled example with its stored parameter table")
    p.add_argument("example", choices=REPLAY_KEYS)
    _add_common(p)
    p = sub.add_parser("oracle-check", help="run the brute-force lemma sweeps")
    p.add_argument("--quick", action="store_true", help="smaller sweeps")
    _add_common(p)
    return ap


# -- helpers ------------------------------------------------------------------------------------


def load(path_or_key: str):
    from .problem import BUNDLED, bundled_problem, load_problem_file

    if path_or_key in BUNDLED and not Path(path_or_key).exists():
        return bundled_problem(path_or_key)
    return load_problem_file(path_or_key)


def _parse_value(text: str, current):
    if isinstance(current, bool):
        return _bool(text)
    if isinstance(current, int):
        return int(text)
    if isinstance(current, tuple):
        parts = [t.strip() for t in text.split(",")]
        if len(parts) != 2:
            raise SchemaError(f"expected two comma-separated values, got {text!r}")
        if all(isinstance(x, int) for x in current):
            return (int(parts[0]), int(parts[1]))
        return (parts[0], parts[1])
    return text


def apply_overrides(cfg, overrides: list[str]):
    """Apply ``search.key=value`` overrides to a SearchConfig."""
    names = {f.name for f in dataclasses.fields(cfg)}
    changes = {}
    for item in overrides:
        if "=" not in item:
            raise SchemaError(f"override {item!r} is not KEY=VALUE")
        key, value = item.split("=", 1)
        key = key.strip()
        if key.startswith("search."):
            key = key[len("search."):]
        if key not in names or key == "jobs":
            raise SchemaError(f"unknown setting {item.split('=', 1)[0]!r}")
        changes[key] = _parse_value(value.strip(), getattr(cfg, key))
    return dataclasses.replace(cfg, **changes)


def _config(problem, args):
    from .driver import default_config

    cfg = default_config(problem)
    cfg = dataclasses.replace(cfg, profile=args.profile, try_all_eliminations=args.try_all_eliminations, jobs=max(1, args.jobs))
    return apply_overrides(cfg, args.overrides)


def _emit(args, text: str) -> None:
    if args.out is not None:
        args.out.write_text(text + ("" if text.endswith("\n") else "\n"))
    else:
        print(text)


def _header(cfg=None) -> str:
    line = f"# certified arithmetic: {iv.get_precision()} bits, outward rounding"
    if cfg is not None:
        line += "\n# grid: " + json.dumps(cfg.describe(), sort_keys=True)
    return line


# -- commands -------------------------------------------------------------------------------------


def cmd_validate(args) -> int:
    from .problem import validate_preconditions

    problem = load(args.problem)
    _config(problem, args)  # reject bad --set items here too
    facts = validate_preconditions(problem, strict=False)
    if args.format == "json":
        _emit(args, json.dumps([dataclasses.asdict(f) for f in facts], indent=2))
    else:
        lines = [_header()] + [f"{'OK  ' if f.holds else 'FAIL'} {f.name}: {f.detail}" for f in facts]
        _emit(args, "\n".join(lines))
    return EXIT_OK if all(f.holds for f in facts) else EXIT_INFEASIBLE


def cmd_bound(args) -> int:
    from .driver import iterate, optimal_reference

    problem = load(args.problem)
    cfg = _config(problem, args)
    report = iterate(problem, cfg, max_iters=args.max_iters, stop_rel_improvement=args.stop_rel, timing=args.timing)
    if args.reference:
        ref = optimal_reference(problem)
        report.optimal_reference = ref.bound.hi_float
        if ref.note:
            report.notes.append(ref.note)
        if ref.bound.is_finite() and ref.bound.hi_float > 0:
            report.notes.append(f"final / reference = {report.final_bound / ref.bound.hi_float:.4f}")
    _emit(args, report.to_json() if args.format == "json" else _header(cfg) + "\n" + report.table())
    return EXIT_OK


def cmd_search(args) -> int:
    from .driver import grid_search_params
    from .rigor import const_value, parse_expr

    problem = load(args.problem)
    cfg = _config(problem, args)
    try:
        P_max = const_value(parse_expr(args.p_max, []))
    except Exception as exc:
        raise SchemaError(f"--p-max: {exc}") from None
    res = grid_search_params(problem, P_max, cfg)
    par = res.best.params
    out = dict(
        problem=problem.name,
        P_max=P_max.hi_float,
        chi=float(par.chi),
        L=par.L,
        m=float(par.m),
        rho=float(par.rho),
        objective=res.objective.hi_float,
        B2=res.best.bound.B2.hi_float,
        main_margin=res.best.main.margin.lo_float,
        zero_conditions={v.name: v.holds for v in res.best.zero.conditions},
        precision=iv.get_precision(),
        config=cfg.describe(),
    )
    if args.format == "json":
        _emit(args, json.dumps(out, indent=2, sort_keys=True))
    else:
        lines = [_header(cfg)] + [f"{k}: {v}" for k, v in out.items() if k != "config"]
        _emit(args, "\n".join(lines))
    return EXIT_OK


@dataclass(frozen=True)
class ReplayExpectation:
    problem: str
    tolerance: float
    B1_max: float
    final_max: float
    rows: tuple[dict, ...]

    def steps(self):
        from .driver import ReplayStep

        return [
            ReplayStep(int(r["L"]), Fraction(r["m"]), Fraction(r["rho"]), Fraction(r["chi"]), Fraction(r["varrho"]), Fraction(r["mu"]))
            for r in self.rows
        ]


def replay_expectation(key: str) -> ReplayExpectation:
    from .problem import FIXTURE_DIR, tomllib

    doc = tomllib.loads((FIXTURE_DIR / f"replay_{key}.toml").read_text())
    return ReplayExpectation(doc["problem"], float(doc["tolerance"]), float(doc["B1_max"]), float(doc["final_max"]), tuple(doc["row"]))


def replay_diff(report, exp: ReplayExpectation) -> list[str]:
    """Cells outside the tolerance (empty list: the replay matches)."""
    bad = []
    if report.B1 > exp.B1_max:
        bad.append(f"B1 = {report.B1:.6g} exceeds {exp.B1_max:.6g}")
    for row, want in zip(report.rows, exp.rows):
        got = row.new_bound
        if abs(got - want["new"]) > exp.tolerance * want["new"]:
            bad.append(f"iteration {row.iteration}: new bound {got:.6g} vs {want['new']:.6g} (outside {exp.tolerance:.0%})")
    if len(report.rows) != len(exp.rows):
        bad.append(f"{len(report.rows)} rows vs {len(exp.rows)} expected")
    if report.final_bound > exp.final_max:
        bad.append(f"final bound {report.final_bound:.6g} exceeds {exp.final_max:.6g}")
    return bad


def cmd_replay(args) -> int:
    from .driver import replay
    from .problem import bundled_problem

    exp = replay_expectation(args.example)
    problem = bundled_problem(exp.problem)
    cfg = _config(problem, args)
    report = replay(problem, exp.steps(), cfg, timing=args.timing)
    bad = replay_diff(report, exp)
    report.notes += [f"replay mismatch: {b}" for b in bad] or ["replay matches the stored table"]
    _emit(args, report.to_json() if args.format == "json" else _header(cfg) + "\n" + report.table())
    return EXIT_OK if not bad else EXIT_MISMATCH


def cmd_oracle_check(args) -> int:
    from .driver import SearchConfig
    from .oracle import run_sweeps

    apply_overrides(SearchConfig(), args.overrides)
    results = run_sweeps(quick=args.quick)
    lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in results]
    if args.format == "json":
        _emit(args, json.dumps([dict(name=n, ok=o, detail=d) for n, o, d in results], indent=2))
    else:
        _emit(args, "\n".join(lines))
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_INTERNAL


COMMANDS = {
    "validate": cmd_validate,
    "bound": cmd_bound,
    "search": cmd_search,
    "replay": cmd_replay,
    "oracle-check": cmd_oracle_check,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.precision is not None:
            if args.precision < 53:
                raise SchemaError("--precision must be at least 53 bits")
            iv.set_precision(args.precision)
        return COMMANDS[args.command](args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Lfl3Error as exc:
        print(f"no bound: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # never silent
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
