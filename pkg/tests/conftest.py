from importlib import resources

import pytest

from gkzkit.cli import parse_input

FIXTURES = ("hesse", "hesse_normalized", "ci_r2", "no_star", "boundary")


def fixture_path(name: str) -> str:
    return str(resources.files("gkzkit") / "fixtures" / f"{name}.txt")


def load(name: str):
    with open(fixture_path(name)) as fh:
        return parse_input(fh.read())


@pytest.fixture
def hesse():
    return load("hesse")


@pytest.fixture
def hesse_prime():
    return load("hesse_normalized")


@pytest.fixture
def ci_r2():
    return load("ci_r2")
