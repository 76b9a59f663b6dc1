import pytest

from ibba.fixtures import generate_battery
from ibba.oracle import grid_minimize
from ibba.solver import SolverConfig, solve

GRID_N = 10**6

_criteria: list[tuple[str, bool, str]] = []


def record_criterion(label: str, ok: bool, detail: str = "") -> None:
    _criteria.append((label, ok, detail))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, ok, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {label}  {detail}")


@pytest.fixture(scope="session")
def battery():
    return generate_battery()


@pytest.fixture(scope="session")
def battery_runs(battery):
    return [solve(gp.spec, SolverConfig(emit_trace=True)) for gp in battery]


@pytest.fixture(scope="session")
def battery_grids(battery):
    return [grid_minimize(gp.spec, GRID_N) for gp in battery]
