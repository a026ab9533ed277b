from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

import pytest

from conftest import b1
from lfl3.cli import replay_diff, replay_expectation
from lfl3.driver import (
    TABLE_COLUMNS,
    SearchConfig,
    default_config,
    grid_search_params,
    grid_values,
    iterate,
    replay,
    report_from_json,
)
from lfl3.errors import NoFeasibleParams, SchemaError
from lfl3.kit import certify, objective_value


def small_config(problem, jobs=1):
    return replace(
        default_config(problem),
        chi_range=("0.7", "0.8"),
        chi_count=2,
        L_range=(160, 170),
        m_range=(5, 7),
        m_count=4,
        rho_range=(9, 11),
        rho_count=4,
        jobs=jobs,
    )


@pytest.fixture(scope="module")
def ex1_replay(ex1):
    exp = replay_expectation("ex1")
    return exp, replay(ex1, exp.steps())


@pytest.fixture(scope="module")
def small_run(ex1):
    return iterate(ex1, small_config(ex1), max_iters=1)


# -- grid ------------------------------------------------------------------------------------------


def test_grid_has_count_plus_one_points():
    g = grid_values("0.5", "1.5", 20)
    assert len(g) == 21 and g[0] == Fraction(1, 2) and g[-1] == Fraction(3, 2)
    assert grid_values(3, 3, 5) == (Fraction(3),)


def test_bad_search_config_is_a_schema_error():
    with pytest.raises(SchemaError):
        SearchConfig(chi_count=0)
    with pytest.raises(SchemaError):
        SearchConfig(L_range=(200, 100))
    with pytest.raises(SchemaError):
        SearchConfig(profile="bogus")


# -- replay ----------------------------------------------------------------------------------------


def test_fibonacci_replay_matches_the_reference_table(ex1_replay):
    exp, report = ex1_replay
    assert replay_diff(report, exp) == []
    assert report.B1 <= 1.74e12
    assert report.final_bound <= 18e6


def test_replay_rows_never_increase(ex1_replay):
    _, report = ex1_replay
    for row in report.rows:
        assert row.new_bound <= row.initial_bound
    assert [r.new_bound for r in report.rows] == sorted((r.new_bound for r in report.rows), reverse=True)


def test_report_round_trips_through_json(ex1_replay):
    _, report = ex1_replay
    again = report_from_json(report.to_json())
    assert again == report
    assert again.to_json() == report.to_json()


def test_table_has_every_column(ex1_replay):
    _, report = ex1_replay
    text = report.table()
    for col in TABLE_COLUMNS:
        assert col in text


def test_unknown_report_version_is_rejected(ex1_replay):
    import json

    d = json.loads(ex1_replay[1].to_json())
    d["schema_version"] = 99
    with pytest.raises(SchemaError):
        report_from_json(json.dumps(d))


# -- search ----------------------------------------------------------------------------------------


def test_fibonacci_search_beats_the_reference_tuple(ex1):
    res = grid_search_params(ex1, b1("ex1"))
    ref = certify(ex1, b1("ex1"), "0.75", 167, 6, 10)
    assert res.objective.hi <= objective_value(ref.params, ex1).hi * Fraction(102, 100)
    assert res.best.main.holds and res.best.zero.holds


def test_empty_grid_raises_no_feasible_params(ex1):
    cfg = replace(small_config(ex1), L_range=(5, 5), m_range=(1, 1), m_count=1)
    with pytest.raises(NoFeasibleParams):
        grid_search_params(ex1, b1("ex1"), cfg)


def test_zero_iterations_leave_only_the_first_bound(ex1):
    report = iterate(ex1, small_config(ex1), max_iters=0)
    assert report.rows == []
    assert report.final_bound == report.B1


def test_one_search_iteration_improves_the_bound(small_run):
    assert len(small_run.rows) == 1
    row = small_run.rows[0]
    assert row.new_bound < row.initial_bound
    assert small_run.final_bound == row.new_bound


def test_search_is_identical_for_any_worker_count(ex1, small_run):
    parallel = iterate(ex1, small_config(ex1, jobs=8), max_iters=1)
    assert parallel.to_json() == small_run.to_json()
