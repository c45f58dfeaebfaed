"""Exhaustive enumeration and the uniform random-sampling baseline."""

import numpy as np
import pytest

from mgaplan.baselines import (canonical_space, enumerate_all,
                               enumeration_by_sequence, random_search, unrank)
from mgaplan.errors import InfeasiblePlan, SpaceTooLarge
from mgaplan.legs import evaluate_plan
from mgaplan.planner import (SearchConfig, decode, search, sequence_code,
                             type_tables)


@pytest.fixture(scope="module")
def toy_report(toy_problem):
    return enumerate_all(toy_problem)


def test_canonical_space_counts_toy(toy_problem):
    canon_rows, n_raw, n_canonical = canonical_space(toy_problem)
    assert n_raw == 192
    assert n_canonical == 160
    assert [len(rows) for rows in canon_rows] == [4, 20]


def test_canonical_space_counts_laplace(laplace_cfg):
    _, n_raw, n_canonical = canonical_space(laplace_cfg.problem)
    assert n_raw == 442368
    assert n_canonical == 256000


def test_canonical_space_counts_cassini(cassini_cfg):
    _, n_raw, n_canonical = canonical_space(cassini_cfg.problem)
    assert n_raw == 7112448
    assert n_canonical == 5694624


def test_unrank_enumerates_the_space_bijectively(toy_problem):
    tables = type_tables(toy_problem)
    canon_rows, _, n_canonical = canonical_space(toy_problem, tables)
    seen = {unrank(toy_problem, k, tables, canon_rows)
            for k in range(n_canonical)}
    assert len(seen) == n_canonical
    for s in seen:
        decode(s, toy_problem, tables)
    assert unrank(toy_problem, 0, tables, canon_rows) == (1, 1, 1, 1)
    assert unrank(toy_problem, 1, tables, canon_rows) == (1, 1, 1, 2)
    assert unrank(toy_problem, n_canonical - 1, tables, canon_rows) == \
        (2, 4, 1, 24)
    for bad in (n_canonical, -1, 10 * n_canonical):
        with pytest.raises(IndexError):
            unrank(toy_problem, bad, tables, canon_rows)


def test_enumeration_matches_direct_evaluation(toy_problem, toy_report):
    """The prefix-sharing scan equals evaluating every vector on its own."""
    report = toy_report
    assert report.n_raw == 192
    assert report.n_canonical == 160
    assert len(report.f_obj) == len(report.l_u) == 160
    for k in range(report.n_canonical):
        s = unrank(toy_problem, k)
        try:
            ev = evaluate_plan(decode(s, toy_problem), toy_problem)
            assert report.l_u[k] == 0
            assert report.f_obj[k] == pytest.approx(ev.f_obj, rel=1e-12)
        except InfeasiblePlan as err:
            assert report.l_u[k] == err.leg
            assert np.isnan(report.f_obj[k])


def test_enumeration_frozen_toy_optimum(toy_problem, toy_report):
    report = toy_report
    assert report.n_feasible == 83
    assert report.best.f_obj == pytest.approx(3.500760416185099, rel=1e-9)
    assert report.best.s == (1, 2, 1, 23)
    assert unrank(toy_problem, report.best_index) == report.best.s
    assert report.f_obj[report.best_index] == report.best.f_obj
    assert np.nanmin(report.f_obj) == report.best.f_obj
    assert set(np.unique(report.l_u)) <= {0, 1, 2}


def test_enumeration_progress_callback(toy_problem):
    ticks = []
    enumerate_all(toy_problem, progress=lambda k, n: ticks.append((k, n)))
    assert ticks[-1] == (160, 160)
    assert all(n == 160 for _, n in ticks)


def test_enumeration_refuses_large_spaces(toy_problem):
    with pytest.raises(SpaceTooLarge) as err:
        enumerate_all(toy_problem, cap=10)
    assert err.value.estimate == 160
    assert err.value.cap == 10


def test_enumeration_by_sequence_toy(toy_problem, toy_report):
    rows = enumeration_by_sequence(toy_problem, toy_report)
    codes = [code for code, _, _ in rows]
    assert sorted(codes) == ["GCC", "GGC"]
    costs = [f for _, f, _ in rows]
    assert costs == sorted(costs)
    assert min(costs) == toy_report.best.f_obj
    for code, f, k in rows:
        s = unrank(toy_problem, k)
        assert sequence_code(toy_problem, decode(s, toy_problem).targets) \
            == code
        assert toy_report.f_obj[k] == f
    # recompute the per-code minima by brute force over the verdict table
    best = {}
    for k in np.flatnonzero(toy_report.l_u == 0):
        s = unrank(toy_problem, int(k))
        code = sequence_code(toy_problem, decode(s, toy_problem).targets)
        best[code] = min(best.get(code, np.inf), float(toy_report.f_obj[k]))
    assert {code: f for code, f, _ in rows} == pytest.approx(best)


def test_random_search_full_budget_is_exhaustive(toy_problem, toy_report):
    res = random_search(toy_problem, budget=160, seed=9)
    assert res.stats.n_eval == 160
    assert res.stats.n_duplicates == 0
    assert res.entries[0].f_obj == toy_report.best.f_obj
    assert res.entries[0].s == toy_report.best.s
    assert len(res.entries) == toy_report.n_feasible


def test_random_search_subset_budget(toy_problem, toy_report):
    res = random_search(toy_problem, budget=40, seed=3)
    assert res.stats.n_constructed == 40
    assert res.stats.n_eval == 40
    assert res.stats.n_feasible == len(res.entries)
    assert res.entries[0].f_obj >= toy_report.best.f_obj - 1e-12
    costs = [e.f_obj for e in res.entries]
    assert costs == sorted(costs)


def test_random_search_deterministic(toy_problem):
    a = random_search(toy_problem, budget=50, seed=5)
    b = random_search(toy_problem, budget=50, seed=5)
    assert a.entries == b.entries


def test_random_search_validation(toy_problem, infeasible_problem):
    with pytest.raises(ValueError):
        random_search(toy_problem, budget=0)
    with pytest.raises(SpaceTooLarge):
        random_search(toy_problem, budget=10, cap=10)
    res = random_search(infeasible_problem, budget=1, seed=0)
    assert res.entries == []
    assert res.stats.n_feasible == 0


def test_colony_never_beats_the_exhaustive_oracle(toy_problem, toy_report):
    cfg = SearchConfig(n_ants=10, steps=((20, 0.0), (20, 20.0)),
                       f_obj_ref=3.0, n_eval_max=600, seed=11)
    res = search(toy_problem, cfg)
    assert res.entries
    assert res.entries[0].f_obj >= toy_report.best.f_obj - 1e-12
