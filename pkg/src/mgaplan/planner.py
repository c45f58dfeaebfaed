"""Combinatorial planning over swing-by sequences and transfer types.

A plan is coded as a vector of 2*n_p positive integers: the odd entries
pick the target body of each leg from a per-leg candidate list, the even
entries pick a row of the per-leg type table (all combinations of the
DSM/revolution/flag value sets).  A colony of ants builds vectors
probabilistically, biased by pheromone recomputed at every decision from
the list of feasible solutions found so far, and pruned by per-leg taboo
lists of partial vectors already proven infeasible.
"""

import itertools
import time
from dataclasses import dataclass, replace

import numpy as np

from .ephem import BodyCatalog
from .errors import InfeasiblePlan, MalformedSolution
from .legs import LegParams, Objective, Plan, evaluate_plan


# ---------------------------------------------------------------------------
# problem definition


@dataclass(frozen=True)
class LegSets:
    """Candidate targets and parameter value sets for one leg.

    Values follow the leg model: m_dsm in km/s, revolution counts as
    non-negative integers, f_pa and f_12 as 0/1 flags.  ``n_rev1`` and
    ``f_pa`` only matter when a DSM is performed, so they may be left
    empty when every m_dsm value is zero; empty sets contribute a single
    "unused" column to the type table.
    """

    targets: tuple
    m_dsm: tuple = (0.0,)
    n_rev1: tuple = (0,)
    n_rev2: tuple = (0,)
    f_pa: tuple = (0, 1)
    f_12: tuple = (0, 1)

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        for name in ("m_dsm", "n_rev1", "n_rev2", "f_pa", "f_12"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not self.targets:
            raise ValueError("leg needs at least one candidate target")
        for name in ("m_dsm", "n_rev2", "f_12"):
            if not getattr(self, name):
                raise ValueError(f"{name} set must not be empty")
        dsm_free = all(m == 0.0 for m in self.m_dsm)
        for name in ("n_rev1", "f_pa"):
            if not getattr(self, name) and not dsm_free:
                raise ValueError(
                    f"{name} may be empty only when every m_dsm value is 0")


@dataclass(frozen=True)
class ProblemSpec:
    """Complete discrete problem: initial conditions plus per-leg sets.

    Instances satisfy the duck type expected by legs.evaluate_plan, so a
    decoded Plan is evaluated directly against the spec.
    """

    catalog: BodyCatalog
    P0: str
    t0: float
    phi0: float
    legs: tuple
    v0_bounds: tuple
    tof_total_max_days: float
    tof_leg_max_days: object = None
    objective: Objective = Objective("vinf")
    forced_dtheta: float = 0.3
    n_grid: int = 64

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(self.legs))
        if not self.legs:
            raise ValueError("problem needs at least one leg")
        if len(self.legs[-1].targets) != 1:
            raise ValueError("last leg must have a single destination")
        names = {self.P0}
        for sets in self.legs:
            names.update(sets.targets)
        for name in names:
            self.catalog[name]
        lo, hi = self.v0_bounds
        if not 0.0 <= lo < hi:
            raise ValueError("v0 bounds must satisfy 0 <= lo < hi")

    @property
    def n_p(self) -> int:
        return len(self.legs)


# ---------------------------------------------------------------------------
# solution coding


@dataclass(frozen=True)
class TypeTable:
    """All value-set index combinations for one leg, last index fastest.

    Rows are 1-based index 5-tuples into (m_dsm, n_rev1, n_rev2, f_pa,
    f_12); an empty set contributes a single sentinel index.  ``params``
    holds the decoded LegParams of each row, ``canonical`` the 0-based
    row holding each row's canonical equivalent (rows that differ only
    in the DSM placement parameters of a DSM-free leg collapse).
    """

    rows: tuple
    params: tuple
    canonical: tuple


def _row_params(sets: LegSets, row) -> LegParams:
    k1, k2, k3, k4, k5 = row
    return LegParams(
        m_dsm=sets.m_dsm[k1 - 1],
        n_rev1=sets.n_rev1[k2 - 1] if sets.n_rev1 else 0,
        n_rev2=sets.n_rev2[k3 - 1],
        f_pa=sets.f_pa[k4 - 1] if sets.f_pa else 0,
        f_12=sets.f_12[k5 - 1])


def canonical_params(p: LegParams) -> LegParams:
    """Collapse parameters that the model ignores for a DSM-free leg."""
    if p.m_dsm == 0.0 and (p.n_rev1 != 0 or p.f_pa != 0):
        return replace(p, n_rev1=0, f_pa=0)
    return p


def build_type_table(sets: LegSets) -> TypeTable:
    """Cartesian product of the five value sets, last index fastest."""
    axes = [range(1, max(len(getattr(sets, n)), 1) + 1)
            for n in ("m_dsm", "n_rev1", "n_rev2", "f_pa", "f_12")]
    rows = tuple(itertools.product(*axes))
    params = tuple(_row_params(sets, row) for row in rows)
    first_by_canon = {}
    canonical = []
    for j, p in enumerate(params):
        canonical.append(first_by_canon.setdefault(canonical_params(p), j))
    return TypeTable(rows, params, tuple(canonical))


def type_tables(problem: ProblemSpec):
    return tuple(build_type_table(sets) for sets in problem.legs)


def decode(s, problem: ProblemSpec, tables=None) -> Plan:
    """Decode a solution vector into a Plan.

    Raises MalformedSolution on wrong length or out-of-range entries.
    """
    s = tuple(int(v) for v in s)
    if len(s) != 2 * problem.n_p:
        raise MalformedSolution(
            f"vector length {len(s)}, expected {2 * problem.n_p}")
    if tables is None:
        tables = type_tables(problem)
    targets = []
    params = []
    for i, sets in enumerate(problem.legs):
        kp, kt = s[2 * i], s[2 * i + 1]
        if not 1 <= kp <= len(sets.targets):
            raise MalformedSolution(f"target index {kp} out of range at leg {i + 1}")
        if not 1 <= kt <= len(tables[i].rows):
            raise MalformedSolution(f"type index {kt} out of range at leg {i + 1}")
        targets.append(sets.targets[kp - 1])
        params.append(tables[i].params[kt - 1])
    return Plan(tuple(targets), tuple(params))


def encode(plan: Plan, problem: ProblemSpec, tables=None):
    """Inverse of decode for plans whose parameters match a table row."""
    if tables is None:
        tables = type_tables(problem)
    if plan.n_legs != problem.n_p:
        raise MalformedSolution(
            f"plan has {plan.n_legs} legs, expected {problem.n_p}")
    s = []
    for i, sets in enumerate(problem.legs):
        try:
            kp = sets.targets.index(plan.targets[i]) + 1
            kt = tables[i].params.index(plan.params[i]) + 1
        except ValueError:
            raise MalformedSolution(
                f"leg {i + 1} of the plan is not in the problem sets") from None
        s.extend((kp, kt))
    return tuple(s)


def canonical_key(plan: Plan):
    """Hashable identity of a plan up to model-equivalent parameters."""
    return (plan.targets, tuple(canonical_params(p) for p in plan.params))


def sequence_code(problem: ProblemSpec, targets) -> str:
    """Compact body-code string of a sequence, departure body included."""
    names = (problem.P0,) + tuple(targets)
    return "".join(problem.catalog[n].code or n[:2].title() for n in names)


# ---------------------------------------------------------------------------
# shared search state


@dataclass(frozen=True)
class FeasibleEntry:
    """One feasible solution: vector, cost and its best trajectory."""

    s: tuple
    f_obj: float
    record: object

    @property
    def total_T(self) -> float:
        return self.record.total_T


@dataclass
class EvalOutcome:
    """Cached model verdict for one canonical plan."""

    feasible: bool
    f_obj: float = np.nan
    record: object = None
    l_u: int = 0


class SearchLists:
    """Feasible list, per-leg taboo lists and the evaluated-plan cache."""

    def __init__(self, n_p: int):
        self.feasible = []
        self._seen_s = set()
        self.taboo = [set() for _ in range(n_p)]
        self.evaluated = {}

    def record_result(self, s, outcome: EvalOutcome):
        """File an evaluated vector into the feasible or taboo lists."""
        s = tuple(s)
        if outcome.feasible:
            if s not in self._seen_s:
                self._seen_s.add(s)
                self.feasible.append(
                    FeasibleEntry(s, outcome.f_obj, outcome.record))
        else:
            self.taboo[outcome.l_u - 1].add(s[:2 * outcome.l_u])


def evaluate_vector(s, problem: ProblemSpec, lists: SearchLists, tables=None):
    """Decode and evaluate s, reusing the cache of equivalent plans.

    Returns (outcome, fresh) where fresh says whether the model actually
    ran (a cache hit costs no model evaluation).
    """
    plan = decode(s, problem, tables)
    key = canonical_key(plan)
    cached = lists.evaluated.get(key)
    if cached is not None:
        return cached, False
    try:
        ev = evaluate_plan(plan, problem)
        best = ev.records[0]
        outcome = EvalOutcome(True, ev.f_obj, best)
    except InfeasiblePlan as err:
        outcome = EvalOutcome(False, l_u=err.leg)
    lists.evaluated[key] = outcome
    return outcome, True


# ---------------------------------------------------------------------------
# probabilistic construction


def roulette_select(tau, rng) -> int:
    """Draw a 0-based index with probability tau_j / sum(tau)."""
    cum = np.cumsum(np.asarray(tau, dtype=float))
    total = cum[-1]
    if total <= 0.0:
        raise ValueError("roulette selection needs a positive total weight")
    return int(np.searchsorted(cum, rng.random() * total, side="right"))


class PheromoneIndex:
    """Per-iteration snapshot of the feasible list as prefix accumulators.

    seq[i] maps an odd-entry prefix through leg i+1 to sum(1/f_obj) of
    the matching feasible solutions; typ[i] does the same for the pair
    the interleaved prefix through leg i+1 (the partial solution that a
    partially typed vector is compared against the list with).
    """

    def __init__(self, feasible, n_p: int):
        self.seq = [{} for _ in range(n_p)]
        self.typ = [{} for _ in range(n_p)]
        for entry in feasible:
            odds = entry.s[0::2]
            inv = 1.0 / entry.f_obj
            for i in range(n_p):
                key = odds[:i + 1]
                self.seq[i][key] = self.seq[i].get(key, 0.0) + inv
                tkey = entry.s[:2 * (i + 1)]
                self.typ[i][tkey] = self.typ[i].get(tkey, 0.0) + inv


def generate_sequence(problem: ProblemSpec, index: PheromoneIndex,
                      w_planet: float, rng):
    """Choose the odd vector entries (targets), one leg at a time."""
    odds = []
    for i, sets in enumerate(problem.legs):
        tau = np.ones(len(sets.targets))
        if w_planet > 0.0:
            acc = index.seq[i]
            for j in range(len(sets.targets)):
                tau[j] += w_planet * acc.get((*odds, j + 1), 0.0)
        odds.append(roulette_select(tau, rng) + 1)
    return tuple(odds)


def generate_types(odds, problem: ProblemSpec, tables, lists: SearchLists,
                   index: PheromoneIndex, w_type: float, rng):
    """Complete the even entries, or return None when the ant is stuck.

    A type whose partial vector sits in the leg's taboo list gets zero
    pheromone; if that empties a whole leg the solution is discarded.
    """
    evens = []
    for i, table in enumerate(tables):
        n_rows = len(table.rows)
        tau = np.ones(n_rows)
        taboo = lists.taboo[i]
        acc = index.typ[i]
        for j in range(1, n_rows + 1):
            prefix = _interleave(odds, evens, i, j)
            if prefix in taboo:
                tau[j - 1] = 0.0
            elif w_type > 0.0:
                tau[j - 1] += w_type * acc.get(prefix, 0.0)
        if not tau.any():
            return None
        evens.append(roulette_select(tau, rng) + 1)
    return tuple(v for pair in zip(odds, evens) for v in pair)


def _interleave(odds, evens, i, j):
    """Partial vector of length 2(i+1): legs 1..i typed, candidate j at i+1."""
    out = []
    for k in range(i):
        out.extend((odds[k], evens[k]))
    out.extend((odds[i], j))
    return tuple(out)


# ---------------------------------------------------------------------------
# main loop


@dataclass(frozen=True)
class SearchConfig:
    """Colony settings: ants, (iterations, w-bar) steps, budget, seed."""

    n_ants: int = 10
    steps: tuple = ((30, 0.0), (30, 20.0))
    f_obj_ref: float = 3.0
    n_eval_max: int = 600
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "steps",
            tuple((int(n), float(w)) for n, w in self.steps))
        if self.n_ants < 1:
            raise ValueError("need at least one ant")
        if any(w < 0.0 for _, w in self.steps):
            raise ValueError("step weights must be non-negative")


@dataclass
class SearchStats:
    """Counters of one search run."""

    n_eval: int = 0
    n_iterations: int = 0
    n_constructed: int = 0
    n_discarded: int = 0
    n_duplicates: int = 0
    n_feasible: int = 0
    wall_time_s: float = 0.0
    step_iterations: tuple = ()


@dataclass
class SearchResult:
    """Sorted feasible list plus run counters."""

    entries: list
    stats: SearchStats


def sorted_entries(feasible):
    return sorted(feasible, key=lambda e: (e.f_obj, e.total_T, e.s))


def search(problem: ProblemSpec, config: SearchConfig) -> SearchResult:
    """Run the two-step colony search; reproducible from the seed.

    Each iteration, every ant constructs a vector against a snapshot of
    the lists taken at the iteration start; distinct vectors are then
    evaluated (cache hits for plans equivalent to an earlier one do not
    consume budget) and the lists updated.  The loop of each step stops
    when its iterations or the shared evaluation budget run out.
    """
    t_start = time.perf_counter()
    tables = type_tables(problem)
    lists = SearchLists(problem.n_p)
    stats = SearchStats()
    step_iters = []
    it_global = 0
    for n_iter_max, w_bar in config.steps:
        w = w_bar * config.f_obj_ref
        it_step = 0
        while it_step < n_iter_max and stats.n_eval < config.n_eval_max:
            index = PheromoneIndex(lists.feasible, problem.n_p)
            batch = []
            seen = set()
            for ant in range(config.n_ants):
                rng = np.random.default_rng((config.seed, it_global, ant))
                odds = generate_sequence(problem, index, w, rng)
                s = generate_types(odds, problem, tables, lists, index, w, rng)
                stats.n_constructed += 1
                if s is None:
                    stats.n_discarded += 1
                elif s not in seen:
                    seen.add(s)
                    batch.append(s)
            for s in batch:
                outcome, fresh = evaluate_vector(s, problem, lists, tables)
                if fresh:
                    stats.n_eval += 1
                else:
                    stats.n_duplicates += 1
                lists.record_result(s, outcome)
                if stats.n_eval >= config.n_eval_max:
                    break
            it_step += 1
            it_global += 1
        step_iters.append(it_step)
    stats.n_iterations = it_global
    stats.step_iterations = tuple(step_iters)
    stats.n_feasible = len(lists.feasible)
    stats.wall_time_s = time.perf_counter() - t_start
    return SearchResult(sorted_entries(lists.feasible), stats)


def best_by_sequence(problem: ProblemSpec, entries):
    """Best entry per planetary sequence, ordered by cost.

    Returns a list of (sequence code string, FeasibleEntry).
    """
    best = {}
    for entry in sorted_entries(entries):
        code = sequence_code(problem, decode(entry.s, problem).targets)
        best.setdefault(code, entry)
    return sorted(best.items(), key=lambda kv: (kv[1].f_obj, kv[0]))
