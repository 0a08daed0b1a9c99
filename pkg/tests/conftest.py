import numpy as np
import pytest

from cohdist.io import fixture_path, read_state_file

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def load_fixture(name):
    return read_state_file(fixture_path(name)).to_object()


@pytest.fixture
def counterexample_rho():
    return load_fixture("counterexample_rho.json")


@pytest.fixture
def counterexample_kraus():
    return load_fixture("counterexample_kraus.json")


@pytest.fixture
def psi_12():
    return load_fixture("psi_12.json")


def counterexample_matrix():
    r5 = np.sqrt(5)
    return np.array(
        [
            [1 / 4, 0, 1 / (2 * r5), 1 / (4 * r5)],
            [0, 1 / 4, -1 / (4 * r5), 1 / (2 * r5)],
            [1 / (2 * r5), -1 / (4 * r5), 1 / 4, 0],
            [1 / (4 * r5), 1 / (2 * r5), 0, 1 / 4],
        ]
    )
