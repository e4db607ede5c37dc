import json
import re
from pathlib import Path

import pytest

from ptolemy import solver, triangulation, variety

DATA = Path(__file__).resolve().parents[1] / "src" / "ptolemy" / "data"
FIXTURES = Path(__file__).resolve().parent / "fixtures"


def load(name):
    return triangulation.load_triangulation(DATA / f"{name}.tri")


def five2_labels():
    """Map from the worked-example variable letters to generated variable names."""
    return json.loads((FIXTURES / "five2_labels.json").read_text())


def five2_components():
    """Parametrized zero-dimensional components of the level-3 5_2 system, in letter names."""
    return json.loads((FIXTURES / "five2_components.json").read_text())


def criterion_number(name):
    m = re.search(r"criterion_(\d+)", name)
    return int(m.group(1)) if m else 99


@pytest.fixture(scope="session")
def fig8():
    return load("fig8")


@pytest.fixture(scope="session")
def five2():
    return load("five2")


@pytest.fixture(scope="session")
def s1s2():
    return load("s1s2")


def solved(tri, n, sigma, starts=2000, gauge=None):
    system = variety.generate_relations(tri, n, sigma)
    if gauge:
        variety.set_gauge(system, gauge)
    else:
        variety.choose_gauge(system)
    return system, solver.solve_newton_multistart(system, solver.SolverConfig(starts=starts))


@pytest.fixture(scope="session")
def fig8_psl(fig8):
    return solved(fig8, 2, triangulation.enumerate_h2(fig8)[1])


@pytest.fixture(scope="session")
def five2_sl3(five2):
    lab = five2_labels()
    return solved(five2, 3, None, gauge=[lab["a0"], lab["y3"]])


@pytest.fixture(scope="session")
def five2_psl2(five2):
    return solved(five2, 2, triangulation.enumerate_h2(five2)[1])


@pytest.fixture(scope="session")
def s1s2_sl2(s1s2):
    return solved(s1s2, 2, None, starts=500)


# acceptance summary: one line per criterion at the end of the run
_ACCEPTANCE = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" in report.nodeid and report.when == "call":
        name = report.nodeid.split("::")[-1]
        _ACCEPTANCE[name] = report.outcome
    elif "test_acceptance.py" in report.nodeid and report.when == "setup" and report.outcome != "passed":
        _ACCEPTANCE[report.nodeid.split("::")[-1]] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_ACCEPTANCE, key=criterion_number):
        verdict = "PASS" if _ACCEPTANCE[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}")
