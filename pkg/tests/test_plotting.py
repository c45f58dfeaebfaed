"""SVG rendering: structural checks via element gids, byte reproducibility."""

import xml.etree.ElementTree as ET

import pytest

from mgaplan.legs import evaluate_plan
from mgaplan.planner import decode
from mgaplan.plotting import render_branch, render_histogram, render_scan

GOLDEN_LAPLACE = (1, 1, 2, 21, 1, 18, 1, 18)


def _gids(path):
    tree = ET.parse(path)
    root = tree.getroot()
    assert root.tag.endswith("svg")
    return [el.get("id") for el in root.iter() if el.get("id")]


@pytest.fixture(scope="module")
def golden_branch(laplace_cfg):
    problem = laplace_cfg.problem
    plan = decode(GOLDEN_LAPLACE, problem)
    record = evaluate_plan(plan, problem).records[0]
    return problem, plan, record


def test_render_branch_structure(golden_branch, tmp_path):
    problem, plan, record = golden_branch
    path = tmp_path / "branch.svg"
    recon = render_branch(problem, plan, record.lambdas, path)
    gids = _gids(path)
    orbit_ids = {g for g in gids if g.startswith("orbit-")}
    assert orbit_ids == {"orbit-ganymede", "orbit-callisto"}
    assert "trajectory" in gids
    events = sorted(g for g in gids if g.startswith("event-"))
    assert "event-launch-1" in events
    assert "event-arrival-1" in events
    assert sum(g.startswith("event-swingby") for g in events) == \
        plan.n_legs - 1
    assert recon.arrival_state.t == pytest.approx(
        problem.t0 + record.total_T)


def test_render_branch_reproducible_bytes(golden_branch, tmp_path):
    problem, plan, record = golden_branch
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    render_branch(problem, plan, record.lambdas, a)
    render_branch(problem, plan, record.lambdas, b)
    assert a.read_bytes() == b.read_bytes()


def test_render_branch_one_leg(moons, tmp_path):
    from mgaplan.legs import Objective
    from mgaplan.planner import LegSets, ProblemSpec

    problem = ProblemSpec(
        catalog=moons, P0="ganymede", t0=9309.8, phi0=1.2471,
        legs=(LegSets(targets=("callisto",), m_dsm=(0.0,), n_rev1=(),
                      n_rev2=(0, 1), f_pa=(), f_12=(0, 1)),),
        v0_bounds=(4.5, 5.5), tof_total_max_days=100.0,
        objective=Objective("vinf"))
    plan = decode((1, 3), problem)
    record = evaluate_plan(plan, problem).records[0]
    path = tmp_path / "leg.svg"
    recon = render_branch(problem, plan, record.lambdas, path)
    gids = _gids(path)
    assert not any(g.startswith("event-swingby") for g in gids)
    assert len(recon.segments) == 2
    assert [ev.kind for ev in recon.events] == ["launch", "arrival"]


def test_render_scan(tmp_path):
    path = tmp_path / "scan.svg"
    render_scan([(0.0, 3.0), (2.5, None), (5.0, 2.0)], path)
    assert "scan-best" in _gids(path)


def test_render_histogram(tmp_path):
    path = tmp_path / "hist.svg"
    render_histogram([1.0, 1.5, 2.0, 2.5, 3.0, 2.2], path, threshold=2.0)
    gids = _gids(path)
    assert "run-hist" in gids
    assert "threshold" in gids


def test_render_histogram_empty(tmp_path):
    path = tmp_path / "empty.svg"
    render_histogram([], path)
    gids = _gids(path)
    assert "run-hist" not in gids
