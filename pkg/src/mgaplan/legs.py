"""Trajectory legs: launch, swing-by, DSM arcs, phasing and plan evaluation.

A plan is a planet sequence plus one LegParams per leg.  Each leg leaves a
body (by launch or swing-by), coasts to a manoeuvre point M (tangential DSM
at an apsis, or a short forced propagation when no DSM is planned), then
coasts to a geometric intersection with the target body's orbit.  The one
scalar left free per leg (launch speed v0, or the signed swing-by
pericentre rps) is pinned down by the phasing condition: the target body
must actually be at the intersection at arrival time.  All phasing roots
are kept, so evaluating a plan grows a small tree of trajectories.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .conic import Orbit2D, State2D, orbit_from_state
from .ephem import Body, body_state
from .errors import (DegenerateIntersection, DegenerateSwingby,
                     InfeasiblePlan, LegInfeasible, NoIntersection,
                     PericentreOutOfRange)

DAY_S = K.DAY_S


@dataclass(frozen=True)
class LegParams:
    """Discrete transfer type of one leg.

    m_dsm: signed tangential DSM, km/s (0 = no DSM, forced propagation).
    n_rev1: full revolutions before the DSM apsis is taken.
    n_rev2: full revolutions between M and the orbit intersection.
    f_pa: 0 = DSM at pericentre, 1 = at apocentre.
    f_12: selects which of the two orbit intersections is aimed at.
    When m_dsm = 0, f_pa and n_rev1 play no role in the evaluation.
    """

    m_dsm: float = 0.0
    n_rev1: int = 0
    n_rev2: int = 0
    f_pa: int = 0
    f_12: int = 0

    def __post_init__(self):
        if self.f_pa not in (0, 1) or self.f_12 not in (0, 1):
            raise ValueError("f_pa and f_12 must be 0 or 1")
        if self.n_rev1 < 0 or self.n_rev2 < 0:
            raise ValueError("revolution counts must be >= 0")


@dataclass(frozen=True)
class Plan:
    """Decoded solution: target body name and transfer type per leg."""

    targets: tuple
    params: tuple

    def __post_init__(self):
        if len(self.targets) != len(self.params):
            raise ValueError("one LegParams per target required")

    @property
    def n_legs(self) -> int:
        return len(self.targets)


@dataclass(frozen=True)
class ArrivalCondition:
    """One branch of the trajectory tree at the end of a leg.

    ``at_body`` records which body the state refers to, so the next leg
    knows whose gravity well it starts from; ``leg_times`` accumulates the
    per-leg durations (days) needed for the final records.
    """

    state: State2D
    total_dv: float
    v0_used: float
    lambda_per_leg: tuple
    elapsed: float
    path_id: str
    at_body: str = ""
    leg_times: tuple = ()


@dataclass(frozen=True)
class TrajectoryRecord:
    """Fully evaluated branch, ready for reporting."""

    lambdas: tuple
    leg_times: tuple
    leg_dv: tuple
    v0: float
    v_inf_arrival: float
    total_T: float
    f_obj: float
    path_id: str


@dataclass(frozen=True)
class Objective:
    """Objective definition: 'vinf' or 'vinf_plus_time' (sigma in km/s per day)."""

    kind: str = "vinf"
    sigma: float = 0.0

    def __post_init__(self):
        if self.kind not in ("vinf", "vinf_plus_time"):
            raise ValueError(f"unknown objective kind {self.kind!r}")


def objective(record: TrajectoryRecord, spec: Objective) -> float:
    """Scalar cost of one trajectory record under the given objective."""
    if spec.kind == "vinf":
        return float(record.v_inf_arrival)
    return float(record.v_inf_arrival + spec.sigma * record.total_T)


@dataclass(frozen=True)
class PhasingContext:
    """Frozen inputs of one leg's phasing problem.

    mode 'launch' solves for the launch excess speed v0 in
    bounds = (v0_min, v0_max); mode 'swingby' solves for the signed
    pericentre radius, sampled over the two bands
    [-rp_max, -rp_min] and [rp_min, rp_max] of the swing-by body.
    """

    mode: str
    planet_state: State2D
    params: LegParams
    target: Body
    mu_central: float
    t_ref: float
    forced_dtheta: float = 0.3
    phi0: float = 0.0
    v_in: np.ndarray = None
    swingby_body: Body = None
    bounds: tuple = ()

    def __post_init__(self):
        if self.mode not in ("launch", "swingby"):
            raise ValueError(f"unknown phasing mode {self.mode!r}")
        if self.mode == "launch":
            lo, hi = self.bounds
            if not lo < hi:
                raise ValueError("launch bounds must satisfy v0_min < v0_max")
        elif self.swingby_body is None or self.v_in is None:
            raise ValueError("swingby context needs a body and inbound velocity")

    def bands(self):
        """Contiguous lambda intervals to be sampled."""
        if self.mode == "launch":
            return [tuple(self.bounds)]
        b = self.swingby_body
        if not b.rp_min < b.rp_max:
            raise ValueError("swing-by body has empty pericentre range")
        return [(-b.rp_max, -b.rp_min), (b.rp_min, b.rp_max)]


def _ctx_arrays(ctx: PhasingContext):
    s = ctx.planet_state
    start = np.array([s.r[0], s.r[1], s.v[0], s.v[1], s.t * DAY_S])
    if ctx.mode == "launch":
        mode = K.MODE_LAUNCH
        aux = np.array([ctx.phi0, 0.0, 0.0, 0.0])
    else:
        mode = K.MODE_SWINGBY
        aux = np.array([ctx.v_in[0], ctx.v_in[1],
                        ctx.swingby_body.mu_body, 0.0])
    p = ctx.params
    legp = np.array([p.m_dsm, float(p.n_rev1), float(p.n_rev2),
                     float(p.f_pa), float(p.f_12), ctx.forced_dtheta])
    el = ctx.target.elements
    tgt = np.array([el.a, el.e, el.lon_peri,
                    ctx.target.mean_anomaly_epoch, ctx.t_ref * DAY_S])
    return mode, start, aux, legp, tgt


# ---------------------------------------------------------------------------
# elementary leg operations


def launch_state(planet_state: State2D, v0: float, phi0: float,
                 mu: float) -> State2D:
    """Spacecraft state right after launch.

    The spacecraft leaves from the planet's position with velocity
    v_P + v0 * u(phi0), u measured counter-clockwise from the planet's
    velocity direction.  Raises LegInfeasible when the resulting orbit
    around the central body (parameter mu) is retrograde or not closed.
    """
    vP = planet_state.v
    speed = float(np.hypot(vP[0], vP[1]))
    u = vP / speed
    c, s = np.cos(phi0), np.sin(phi0)
    direction = np.array([c * u[0] - s * u[1], s * u[0] + c * u[1]])
    v = vP + v0 * direction
    _, _, _, _, status = K.orbit_from_state(planet_state.r[0],
                                            planet_state.r[1],
                                            v[0], v[1], mu)
    if status != K.OK:
        raise LegInfeasible("launch orbit is retrograde or not closed")
    return State2D(planet_state.r.copy(), v, planet_state.t)


def swingby(planet_state: State2D, v_in: np.ndarray, rps: float,
            body: Body) -> np.ndarray:
    """Outgoing heliocentric velocity of an unpowered swing-by.

    rps is the signed pericentre radius (sign selects the side of the
    passage and therefore the sign of the deflection).  The relative speed
    is preserved exactly; only its direction rotates by
    delta = sign(rps) * (2*theta_inf - pi).
    """
    rp = abs(rps)
    if not body.rp_min <= rp <= body.rp_max:
        raise PericentreOutOfRange(
            f"|rps| = {rp:.3f} km outside [{body.rp_min:.3f}, {body.rp_max:.3f}]")
    v_rel = np.asarray(v_in, dtype=float) - planet_state.v
    v_inf = float(np.hypot(v_rel[0], v_rel[1]))
    if v_inf == 0.0:
        raise DegenerateSwingby("zero relative velocity at the body")
    delta = K.swingby_turn(v_inf, body.mu_body, rp)
    if rps < 0.0:
        delta = -delta
    c, s = np.cos(delta), np.sin(delta)
    rotated = np.array([c * v_rel[0] - s * v_rel[1],
                        s * v_rel[0] + c * v_rel[1]])
    return planet_state.v + rotated


def first_arc(start: State2D, params: LegParams, delta_theta_forced: float,
              mu: float) -> State2D:
    """Coast to the manoeuvre point M and apply the DSM (if any).

    Returns the post-DSM state at M with its epoch updated.  Raises
    LegInfeasible when the orbit of ``start`` (or the post-DSM orbit) is
    retrograde or not elliptic.
    """
    a1, e1, w1, th0, st = K.orbit_from_state(start.r[0], start.r[1],
                                             start.v[0], start.v[1], mu)
    if st != K.OK:
        raise LegInfeasible("leg start orbit is retrograde or not closed")
    a2, e2, w2, thM, tM_s, st = K.first_arc_k(
        a1, e1, w1, th0, start.t * DAY_S, params.m_dsm, float(params.n_rev1),
        float(params.f_pa), delta_theta_forced, mu)
    if st != K.OK:
        raise LegInfeasible("post-DSM orbit is retrograde or not closed")
    x, y, vx, vy = K.state_at_anomaly(a2, e2, w2, mu, thM)
    return State2D(np.array([x, y]), np.array([vx, vy]), tM_s / DAY_S)


def second_arc(at_M: State2D, target: Body, f_12: int, n_rev2: int,
               mu: float):
    """Coast from M to the selected intersection with the target's orbit.

    Returns (theta_int, theta_bar, t_int, state): the intersection true
    anomaly on the spacecraft orbit, the same point's anomaly on the
    target orbit, the arrival epoch (days) and the spacecraft state there.
    Raises NoIntersection / DegenerateIntersection via the conic layer and
    LegInfeasible for a bad spacecraft orbit.
    """
    a2, e2, w2, thM, st = K.orbit_from_state(at_M.r[0], at_M.r[1],
                                             at_M.v[0], at_M.v[1], mu)
    if st != K.OK:
        raise LegInfeasible("orbit at M is retrograde or not closed")
    el = target.elements
    chosen_abs, st = K.select_intersection(a2, e2, w2, thM,
                                           el.a, el.e, el.lon_peri,
                                           float(f_12))
    _check_second_arc_status(st)
    theta_int = K.wrap_two_pi(chosen_abs - w2)
    theta_bar = K.wrap_two_pi(chosen_abs - el.lon_peri)
    dt2 = K.tof_ell(a2, e2, mu, thM, theta_int, float(n_rev2))
    t_int = at_M.t + dt2 / DAY_S
    x, y, vx, vy = K.state_at_anomaly(a2, e2, w2, mu, theta_int)
    return theta_int, theta_bar, t_int, State2D(np.array([x, y]),
                                                np.array([vx, vy]), t_int)


def _check_second_arc_status(st):
    if st == K.ERR_DEGENERATE:
        raise DegenerateIntersection("spacecraft orbit coincides with target")
    if st == K.ERR_NO_INTERSECTION:
        raise NoIntersection("spacecraft orbit never crosses the target orbit")


# ---------------------------------------------------------------------------
# phasing


def delta_theta(lam: float, ctx: PhasingContext) -> float:
    """Phasing gap for a trial lambda: target anomaly minus intersection
    anomaly at arrival time, wrapped to (-pi, pi].  Raises LegInfeasible
    when the leg cannot be built at this lambda.
    """
    mode, start, aux, legp, tgt = _ctx_arrays(ctx)
    d, _, _, _, _, _, ok = K.leg_eval(lam, mode, start, aux, legp, tgt,
                                      ctx.mu_central)
    if ok != K.OK:
        raise LegInfeasible(f"leg cannot be built at lambda = {lam}")
    return d


def _roots_full(ctx: PhasingContext, n_grid: int):
    """Phasing roots with their arrival payload.

    Returns a list of (lambda, t_int_days, State2D at intersection),
    sorted by lambda ascending across all bands.
    """
    if n_grid < 2:
        raise ValueError("n_grid must be >= 2")
    mode, start, aux, legp, tgt = _ctx_arrays(ctx)
    out = []
    for lo, hi in ctx.bands():
        rows = K.solve_band(mode, start, aux, legp, tgt, ctx.mu_central,
                            float(lo), float(hi), int(n_grid))
        for row in rows:
            t_days = row[1] / DAY_S
            st = State2D(np.array([row[2], row[3]]),
                         np.array([row[4], row[5]]), t_days)
            out.append((float(row[0]), t_days, st))
    return out


def solve_phasing(ctx: PhasingContext, n_grid: int = 64):
    """All solutions of the phasing problem in the context's bounds.

    Samples the gap on n_grid points per band, refines every genuine sign
    change with Brent to |gap| < 1e-9 rad, deduplicates at 1e-6 relative
    spacing and returns the lambda values sorted ascending.
    """
    return [lam for lam, _, _ in _roots_full(ctx, n_grid)]


# ---------------------------------------------------------------------------
# plan evaluation (trajectory tree)


@dataclass(frozen=True)
class Evaluation:
    """Feasible plan outcome: every surviving branch plus the best cost."""

    records: tuple
    f_obj: float


def _leg_caps(problem, i):
    cap = getattr(problem, "tof_leg_max_days", None)
    if cap is None:
        return None
    if np.isscalar(cap):
        return float(cap)
    return float(cap[i]) if cap[i] is not None else None


def extend_arrivals(arrivals, leg_index, target_name, params, problem):
    """Grow the trajectory tree by one leg (Algorithm 1 inner step).

    arrivals: list of ArrivalCondition after leg ``leg_index - 1`` (for
    leg_index = 0 pass the single pseudo-condition produced by
    ``initial_condition``).  Returns the surviving arrival conditions at
    ``target_name``; empty list when none survive.
    """
    catalog = problem.catalog
    target = catalog[target_name]
    new = []
    leg_cap = _leg_caps(problem, leg_index)
    total_cap = getattr(problem, "tof_total_max_days", None)
    for cond in arrivals:
        if leg_index == 0:
            ctx = PhasingContext(
                mode="launch", planet_state=cond.state, params=params,
                target=target, mu_central=catalog.central_mu,
                t_ref=catalog.t_ref, forced_dtheta=problem.forced_dtheta,
                phi0=problem.phi0, bounds=tuple(problem.v0_bounds))
        else:
            body_prev = catalog[cond.at_body]
            pstate = body_state(catalog, body_prev.name, cond.state.t)
            ctx = PhasingContext(
                mode="swingby", planet_state=pstate, params=params,
                target=target, mu_central=catalog.central_mu,
                t_ref=catalog.t_ref, forced_dtheta=problem.forced_dtheta,
                v_in=cond.state.v, swingby_body=body_prev)
        for k, (lam, t_days, st) in enumerate(_roots_full(ctx, problem.n_grid)):
            leg_time = t_days - cond.state.t
            elapsed = cond.elapsed + leg_time
            if leg_cap is not None and leg_time > leg_cap:
                continue
            if total_cap is not None and elapsed > total_cap:
                continue
            new.append(ArrivalCondition(
                state=st,
                total_dv=cond.total_dv + abs(params.m_dsm),
                v0_used=lam if leg_index == 0 else cond.v0_used,
                lambda_per_leg=cond.lambda_per_leg + (lam,),
                elapsed=elapsed,
                path_id=f"{cond.path_id}.{k}" if cond.path_id else str(k),
                at_body=target_name,
                leg_times=cond.leg_times + (leg_time,),
            ))
    return new


def initial_condition(problem):
    """Pseudo arrival condition representing the departure planet at t0."""
    p0 = body_state(problem.catalog, problem.P0, problem.t0)
    return ArrivalCondition(state=p0, total_dv=0.0, v0_used=np.nan,
                            lambda_per_leg=(), elapsed=0.0, path_id="",
                            at_body=problem.P0, leg_times=())


def finalize_arrivals(arrivals, plan, problem):
    """Turn surviving arrival conditions into sorted TrajectoryRecords."""
    catalog = problem.catalog
    leg_dv = tuple(abs(p.m_dsm) for p in plan.params)
    records = []
    for cond in arrivals:
        tstate = body_state(catalog, plan.targets[-1], cond.state.t)
        dv = cond.state.v - tstate.v
        v_inf = float(np.hypot(dv[0], dv[1]))
        leg_times = tuple(float(t) for t in cond.leg_times)
        stub = TrajectoryRecord(
            lambdas=tuple(float(v) for v in cond.lambda_per_leg),
            leg_times=leg_times, leg_dv=leg_dv, v0=float(cond.v0_used),
            v_inf_arrival=v_inf, total_T=float(sum(leg_times)),
            f_obj=np.nan, path_id=cond.path_id)
        records.append(TrajectoryRecord(
            **{**stub.__dict__, "f_obj": objective(stub, problem.objective)}))
    records.sort(key=lambda r: (r.f_obj, r.total_T, r.path_id))
    return Evaluation(tuple(records), records[0].f_obj)


def evaluate_plan(plan: Plan, problem) -> Evaluation:
    """Evaluate a decoded plan: trajectory tree with TOF pruning.

    Returns an Evaluation whose f_obj is the best branch cost; raises
    InfeasiblePlan carrying the 1-based index of the first leg at which no
    branch survives.
    """
    arrivals = [initial_condition(problem)]
    for i, (tname, prm) in enumerate(zip(plan.targets, plan.params)):
        arrivals = extend_arrivals(arrivals, i, tname, prm, problem)
        if not arrivals:
            raise InfeasiblePlan(i + 1)
    return finalize_arrivals(arrivals, plan, problem)


# ---------------------------------------------------------------------------
# branch reconstruction (for plots and position checks)


@dataclass(frozen=True)
class Segment:
    """One conic arc of a reconstructed trajectory."""

    orbit: Orbit2D
    theta_from: float
    theta_to: float
    n_rev: int
    t_from: float
    t_to: float


@dataclass(frozen=True)
class Event:
    """Discrete event along the trajectory (launch, dsm, swingby, arrival)."""

    kind: str
    r: np.ndarray
    t: float
    body: str = ""


@dataclass(frozen=True)
class Reconstruction:
    segments: tuple
    events: tuple
    arrival_state: State2D


def reconstruct(plan: Plan, problem, lambdas) -> Reconstruction:
    """Rebuild the geometry of one branch from its solved lambda values.

    Deterministic replay of the leg construction; no phasing solve is
    involved.  Useful for plotting and for verifying that the spacecraft
    meets each body where the ephemeris puts it.
    """
    catalog = problem.catalog
    mu = catalog.central_mu
    if len(lambdas) != plan.n_legs:
        raise ValueError("one lambda per leg required")
    segments = []
    events = []
    p0 = body_state(catalog, problem.P0, problem.t0)
    events.append(Event("launch", p0.r.copy(), problem.t0, problem.P0))
    sc = None
    for i, (tname, prm, lam) in enumerate(zip(plan.targets, plan.params,
                                              lambdas)):
        if i == 0:
            sc = launch_state(p0, lam, problem.phi0, mu)
        else:
            prev = catalog[plan.targets[i - 1]]
            pstate = body_state(catalog, prev.name, sc.t)
            v_out = swingby(pstate, sc.v, lam, prev)
            events.append(Event("swingby", pstate.r.copy(), sc.t, prev.name))
            sc = State2D(pstate.r.copy(), v_out, sc.t)
        orbit1, th0 = orbit_from_state(sc, mu)
        if not orbit1.is_elliptic:
            raise LegInfeasible("open orbit in reconstruction")
        if prm.m_dsm != 0.0:
            th_dsm = np.pi if prm.f_pa else 0.0
            n_rev_seg = prm.n_rev1
        else:
            th_dsm = K.wrap_two_pi(th0 + problem.forced_dtheta)
            n_rev_seg = 0
        at_M = first_arc(sc, prm, problem.forced_dtheta, mu)
        segments.append(Segment(orbit1, th0, th_dsm, n_rev_seg, sc.t, at_M.t))
        if prm.m_dsm != 0.0:
            events.append(Event("dsm", at_M.r.copy(), at_M.t))
        orbit2, thM = orbit_from_state(at_M, mu)
        theta_int, theta_bar, t_int, st = second_arc(
            at_M, catalog[tname], prm.f_12, prm.n_rev2, mu)
        segments.append(Segment(orbit2, thM, theta_int, prm.n_rev2,
                                at_M.t, t_int))
        sc = st
    events.append(Event("arrival", sc.r.copy(), sc.t, plan.targets[-1]))
    return Reconstruction(tuple(segments), tuple(events), sc)
