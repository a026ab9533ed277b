from __future__ import annotations

import math

import pytest

from lfl3.errors import ParseError, PreconditionUnverifiable, SchemaError, UndeclaredSymbol
from lfl3.problem import (
    FIXTURE_DIR,
    load_problem,
    load_problem_file,
    root_of_unity_count_bound,
    serialize,
    validate_preconditions,
)

MINIMAL = """
schema_version = 1
name = "toy"

[form]
case = "real"
D = 2
cD = 2
{w_line}
structure = "all_independent"

[alpha.1]
height = "1"
abs_log = "1"

[alpha.2]
height = "2"
abs_log = "1"

[alpha.3]
height = "Y"
abs_log = "1"
{extra_alpha}
[coeff.1]
role = "bounded"
bound = "P"

[coeff.2]
role = "bounded"
bound = "1"

[coeff.3]
role = "target"
bound = "P"

[lambda]
log_upper = "{log_upper}"

[symbols.Y]
min = "100"

[symbols.P]
min = "{p_min}"
"""


def toy(w_line="w = 2", extra_alpha="", log_upper="-P*Y + 1", p_min="1000"):
    return load_problem(MINIMAL.format(w_line=w_line, extra_alpha=extra_alpha, log_upper=log_upper, p_min=p_min))


def test_fibonacci_fixture_loads_as_real_case(ex1):
    assert (ex1.D, ex1.cD, ex1.case) == (2, 2, "real")
    assert ex1.Y_min.contains(10**20)
    assert ex1.P_floor.contains(10**7)
    assert ex1.target_index == 2


def test_x2plus7_fixture_loads_as_imaginary_case(ex2):
    assert (ex2.D, ex2.cD, ex2.case) == (2, 1, "imaginary")
    assert abs(ex2.Y_min.mid - math.log(19.9e6)) < 1e-12
    assert ex2.target_index == 0
    assert ex2.mult.kind == "one_root_of_unity" and ex2.mult.index == 3 and ex2.mult.nu == 2


def test_fourth_alpha_block_is_a_schema_error():
    with pytest.raises(SchemaError):
        toy(extra_alpha='\n[alpha.4]\nheight = "1"\nabs_log = "1"\n')


def test_unknown_symbol_in_an_expression_is_rejected():
    with pytest.raises(UndeclaredSymbol):
        toy(log_upper="-P*Z + 1")


def test_missing_file_is_a_parse_error_with_path(tmp_path):
    with pytest.raises(ParseError) as info:
        load_problem_file(tmp_path / "missing.toml")
    assert "missing.toml" in str(info.value)


def test_malformed_toml_is_a_parse_error():
    with pytest.raises(ParseError):
        load_problem("schema_version = = 1")


def test_fixture_preconditions_are_all_certified(ex1, ex2):
    for p in (ex1, ex2):
        facts = validate_preconditions(p)
        assert facts and all(f.holds for f in facts)


def test_absent_root_of_unity_count_uses_the_degree_fallback():
    p = toy(w_line="")
    w = root_of_unity_count_bound(p)
    assert abs(w.mid - 2 * 2**1.6) < 1e-12
    facts = validate_preconditions(p)
    lam = next(f for f in facts if f.name.startswith("|Lambda|"))
    assert "6.06" in lam.detail


def test_too_weak_lambda_bound_is_unverifiable():
    with pytest.raises(PreconditionUnverifiable):
        validate_preconditions(toy(log_upper="1"))


def test_serialization_round_trips(ex1, ex2):
    for p in (ex1, ex2):
        again = load_problem(serialize(p))
        assert again == p


def test_bundled_fixture_files_exist():
    assert (FIXTURE_DIR / "fibonacci.toml").is_file()
    assert (FIXTURE_DIR / "x2plus7.toml").is_file()
