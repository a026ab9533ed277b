from __future__ import annotations

from functools import lru_cache
from pathlib import Path

import pytest

from lfl3.kit import derive_params
from lfl3.matveev import first_bound
from lfl3.problem import bundled_problem, load_problem_file

DATA = Path(__file__).with_name("data")

# first-iteration parameters (chi, L, m, rho) of the worked examples
EX1_ITER1 = ("0.75", 167, 6, 10)
EX2_ITER1 = ("0.08", 106, 21, "5.5")


@lru_cache(maxsize=None)
def problem(key: str):
    if key == "ex2_h2zero":
        return load_problem_file(DATA / "x2plus7_h2zero.toml")
    return bundled_problem(key)


@lru_cache(maxsize=None)
def b1(key: str):
    return first_bound(problem(key)).B1


@lru_cache(maxsize=None)
def iter1_params(key: str):
    par = EX1_ITER1 if key == "ex1" else EX2_ITER1
    return derive_params(problem(key), b1(key), *par)


@pytest.fixture(scope="session")
def ex1():
    return problem("ex1")


@pytest.fixture(scope="session")
def ex2():
    return problem("ex2")


@pytest.fixture(scope="session")
def ex2_h2zero():
    return problem("ex2_h2zero")


@pytest.fixture(scope="session")
def ex1_params():
    return iter1_params("ex1")


@pytest.fixture(scope="session")
def ex2_params():
    return iter1_params("ex2")


@pytest.fixture(scope="session")
def ex2_h2zero_params():
    return iter1_params("ex2_h2zero")
