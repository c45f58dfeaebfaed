"""Shared fixtures: catalogs, packaged configs, toy problems, JIT warm-up."""

import numpy as np
import pytest

from mgaplan.config import load_config
from mgaplan.ephem import packaged_catalog
from mgaplan.legs import Objective, evaluate_plan
from mgaplan.planner import LegSets, ProblemSpec

_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def planets():
    return packaged_catalog("planets")


@pytest.fixture(scope="session")
def moons():
    return packaged_catalog("jupiter_moons")


@pytest.fixture(scope="session")
def laplace_cfg():
    return load_config("laplace")


@pytest.fixture(scope="session")
def cassini_cfg():
    return load_config("cassini")


@pytest.fixture(scope="session")
def bepi_cfg():
    return load_config("bepicolombo_scan")


@pytest.fixture(scope="session")
def toy_problem(moons):
    """Two-leg moon-tour problem, 160 canonical solutions, fast to evaluate."""
    return ProblemSpec(
        catalog=moons, P0="ganymede", t0=9309.8, phi0=1.2471,
        legs=(LegSets(targets=("ganymede", "callisto"), m_dsm=(0.0,),
                      n_rev1=(), n_rev2=(0, 1), f_pa=(), f_12=(0, 1)),
              LegSets(targets=("callisto",), m_dsm=(-0.01, 0.0, 0.01),
                      n_rev1=(0,), n_rev2=(0, 1), f_pa=(0, 1),
                      f_12=(0, 1))),
        v0_bounds=(4.5, 5.5), tof_total_max_days=100.0,
        objective=Objective("vinf"))


@pytest.fixture(scope="session")
def infeasible_problem(moons):
    """One-leg problem with v0 too small to ever reach the target orbit."""
    return ProblemSpec(
        catalog=moons, P0="ganymede", t0=9309.8, phi0=1.2471,
        legs=(LegSets(targets=("callisto",), m_dsm=(0.0,), n_rev1=(),
                      n_rev2=(0,), f_pa=(), f_12=(0, 1)),),
        v0_bounds=(0.01, 0.05), tof_total_max_days=100.0,
        objective=Objective("vinf"))


@pytest.fixture(scope="session", autouse=True)
def warm_up(toy_problem):
    """Compile the numba kernels and prime matplotlib before any timing.

    Evaluates a known-feasible two-leg plan (launch, phasing, swing-by,
    conic intersection, arrival) so every kernel path is hit once.
    """
    from mgaplan.planner import decode
    evaluate_plan(decode((1, 2, 1, 23), toy_problem), toy_problem)

    from matplotlib.figure import Figure
    import io
    fig = Figure(figsize=(1, 1))
    fig.add_subplot(111).plot([0, 1], [0, 1])
    fig.savefig(io.BytesIO(), format="svg")


@pytest.fixture(scope="session")
def acceptance():
    """Recorder: one printed PASS/FAIL line per acceptance criterion."""
    def record(num, name, ok, detail=""):
        verdict = "PASS" if ok else "FAIL"
        line = f"criterion {num:2d} {name}: {verdict}"
        if detail:
            line += f"  [{detail}]"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
