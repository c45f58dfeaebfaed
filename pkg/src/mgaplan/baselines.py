"""Exhaustive and random baselines over the discrete plan space.

The exhaustive scan is the ground-truth oracle: it visits every
canonical solution vector exactly once (model-equivalent type rows of a
DSM-free leg are collapsed to their first representative) and records
either the objective value or the leg at which the plan dies.  Prefixes
are evaluated once and shared across all completions, which is exactly
equivalent to evaluating each vector independently because a leg's
arrival set depends only on the choices up to that leg.
"""

import time
from dataclasses import dataclass

import numpy as np

from .errors import SpaceTooLarge
from .legs import extend_arrivals, finalize_arrivals, initial_condition, Plan
from .planner import (FeasibleEntry, ProblemSpec, SearchLists, SearchResult,
                      SearchStats, decode, evaluate_vector, sequence_code,
                      sorted_entries, type_tables)

ENUMERATION_CAP = 10_000_000


def canonical_space(problem: ProblemSpec, tables=None):
    """Per-leg canonical row lists plus raw/canonical space sizes."""
    if tables is None:
        tables = type_tables(problem)
    canon_rows = []
    n_raw = 1
    n_canonical = 1
    for sets, table in zip(problem.legs, tables):
        rows = [j for j in range(len(table.rows)) if table.canonical[j] == j]
        canon_rows.append(rows)
        n_raw *= len(sets.targets) * len(table.rows)
        n_canonical *= len(sets.targets) * len(rows)
    return canon_rows, n_raw, n_canonical


def unrank(problem: ProblemSpec, index: int, tables=None, canon_rows=None):
    """index -> canonical solution vector, odometer order, last digit fastest."""
    if tables is None:
        tables = type_tables(problem)
    if canon_rows is None:
        canon_rows, _, _ = canonical_space(problem, tables)
    radices = []
    for sets, rows in zip(problem.legs, canon_rows):
        radices.extend((len(sets.targets), len(rows)))
    digits = []
    for radix in reversed(radices):
        index, d = divmod(index, radix)
        digits.append(d)
    if index:
        raise IndexError("index out of range for the canonical space")
    digits.reverse()
    s = []
    for i in range(problem.n_p):
        s.append(digits[2 * i] + 1)
        s.append(canon_rows[i][digits[2 * i + 1]] + 1)
    return tuple(s)


@dataclass
class EnumerationReport:
    """Outcome of a full scan: per-solution verdicts and the global best.

    f_obj[k] is the objective of the k-th canonical vector (NaN when
    infeasible) and l_u[k] the 1-based leg where it died (0 when
    feasible); vectors are recovered from k with unrank.
    """

    n_raw: int
    n_canonical: int
    f_obj: np.ndarray
    l_u: np.ndarray
    best: FeasibleEntry = None
    best_index: int = -1
    wall_time_s: float = 0.0

    @property
    def n_feasible(self) -> int:
        return int((self.l_u == 0).sum())


def enumerate_all(problem: ProblemSpec, cap: int = ENUMERATION_CAP,
                  progress=None) -> EnumerationReport:
    """Evaluate the whole canonical space (refused above the cap).

    Runs a depth-first scan over the legs so that a prefix shared by
    many vectors is propagated once; a prefix with no surviving arrival
    condition marks its entire completion block infeasible at that leg.
    """
    tables = type_tables(problem)
    canon_rows, n_raw, n_canonical = canonical_space(problem, tables)
    if n_canonical > cap:
        raise SpaceTooLarge(n_canonical, cap)

    blocks = [1] * (problem.n_p + 1)
    for i in range(problem.n_p - 1, -1, -1):
        blocks[i] = (blocks[i + 1] * len(problem.legs[i].targets)
                     * len(canon_rows[i]))

    t_start = time.perf_counter()
    f_arr = np.full(n_canonical, np.nan)
    lu_arr = np.zeros(n_canonical, dtype=np.int8)
    best = {"key": (np.inf, np.inf), "entry": None, "index": -1}
    n_p = problem.n_p

    def scan(i, arrivals, targets, params, prefix, base):
        sets = problem.legs[i]
        table = tables[i]
        pos = base
        for kp, name in enumerate(sets.targets, start=1):
            for row in canon_rows[i]:
                prm = table.params[row]
                nxt = extend_arrivals(arrivals, i, name, prm, problem)
                s_pair = prefix + (kp, row + 1)
                if not nxt:
                    lu_arr[pos:pos + blocks[i + 1]] = i + 1
                elif i + 1 == n_p:
                    ev = finalize_arrivals(
                        arrivals=nxt,
                        plan=Plan(targets + (name,), params + (prm,)),
                        problem=problem)
                    f_arr[pos] = ev.f_obj
                    rec = ev.records[0]
                    key = (ev.f_obj, rec.total_T)
                    if key < best["key"]:
                        best.update(key=key, index=pos,
                                    entry=FeasibleEntry(s_pair, ev.f_obj, rec))
                else:
                    scan(i + 1, nxt, targets + (name,), params + (prm,),
                         s_pair, pos)
                pos += blocks[i + 1]
                if progress is not None:
                    progress(pos, n_canonical)

    scan(0, [initial_condition(problem)], (), (), (), 0)
    return EnumerationReport(
        n_raw=n_raw, n_canonical=n_canonical, f_obj=f_arr, l_u=lu_arr,
        best=best["entry"], best_index=best["index"],
        wall_time_s=time.perf_counter() - t_start)


def enumeration_by_sequence(problem: ProblemSpec, report: EnumerationReport):
    """Best feasible objective per planetary sequence, ordered by cost.

    Returns a list of (sequence code, best f_obj, canonical index).
    """
    tables = type_tables(problem)
    canon_rows, _, _ = canonical_space(problem, tables)
    best = {}
    for k in np.flatnonzero(report.l_u == 0):
        k = int(k)
        s = unrank(problem, k, tables, canon_rows)
        code = sequence_code(problem, decode(s, problem, tables).targets)
        f = float(report.f_obj[k])
        if code not in best or f < best[code][0]:
            best[code] = (f, k)
    return sorted(((c, f, k) for c, (f, k) in best.items()),
                  key=lambda row: (row[1], row[0]))


def random_search(problem: ProblemSpec, budget: int, seed: int = 0,
                  cap: int = ENUMERATION_CAP) -> SearchResult:
    """Uniform sampling of canonical vectors without replacement.

    With a budget at least the space size this degenerates into a full
    (shuffled) scan and returns the exhaustive optimum.
    """
    if budget < 1:
        raise ValueError("budget must be at least 1")
    tables = type_tables(problem)
    canon_rows, _, n_canonical = canonical_space(problem, tables)
    if n_canonical > cap:
        raise SpaceTooLarge(n_canonical, cap)
    rng = np.random.default_rng(seed)
    if budget >= n_canonical:
        indices = range(n_canonical)
    else:
        chosen = set()
        while len(chosen) < budget:
            draw = rng.integers(0, n_canonical, size=budget - len(chosen))
            chosen.update(int(v) for v in draw)
        indices = sorted(chosen)

    t_start = time.perf_counter()
    lists = SearchLists(problem.n_p)
    stats = SearchStats()
    for k in indices:
        s = unrank(problem, k, tables, canon_rows)
        outcome, fresh = evaluate_vector(s, problem, lists, tables)
        stats.n_constructed += 1
        stats.n_eval += int(fresh)
        stats.n_duplicates += int(not fresh)
        lists.record_result(s, outcome)
    stats.n_feasible = len(lists.feasible)
    stats.wall_time_s = time.perf_counter() - t_start
    return SearchResult(sorted_entries(lists.feasible), stats)
