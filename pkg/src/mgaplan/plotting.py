"""Rendering of trajectories and campaign summaries to SVG files.

Figures are built without pyplot so no interactive backend is touched;
every element carries a gid (orbit-<body>, trajectory, event-<kind>-k)
so the emitted SVG can be inspected structurally.  Dates are stripped
from the SVG metadata to keep files reproducible bit for bit.
"""

import math

import matplotlib
import numpy as np
from matplotlib.figure import Figure

from .legs import reconstruct

MAX_STEP_RAD = math.radians(1.0)
_SAVE_OPTS = dict(format="svg", metadata={"Date": None})


def _save(fig, path):
    """Write SVG with a fixed hash salt and no date: bytes are a pure
    function of the figure content."""
    with matplotlib.rc_context({"svg.hashsalt": "mgaplan"}):
        fig.savefig(path, **_SAVE_OPTS)


def _orbit_points(orbit, theta_from=0.0, sweep=2.0 * np.pi):
    """Polyline along a conic, sampled at no more than one degree."""
    n = max(int(math.ceil(sweep / MAX_STEP_RAD)), 2)
    th = theta_from + np.linspace(0.0, sweep, n + 1)
    r = orbit.p / (1.0 + orbit.e * np.cos(th))
    ang = orbit.lon_peri + th
    return r * np.cos(ang), r * np.sin(ang)


def _segment_sweep(seg):
    base = (seg.theta_to - seg.theta_from) % (2.0 * np.pi)
    return base + 2.0 * np.pi * seg.n_rev


_EVENT_STYLE = {
    "launch": dict(marker="^", color="tab:green"),
    "dsm": dict(marker="*", color="tab:red"),
    "swingby": dict(marker="o", color="tab:orange"),
    "arrival": dict(marker="s", color="tab:purple"),
}


def render_branch(problem, plan, lambdas, path, title=""):
    """Draw one trajectory branch with body orbits and event markers."""
    recon = reconstruct(plan, problem, lambdas)
    fig = Figure(figsize=(7.0, 7.0))
    ax = fig.add_subplot(111)

    seen = []
    for name in (problem.P0, *plan.targets):
        if name in seen:
            continue
        seen.append(name)
        x, y = _orbit_points(problem.catalog[name].elements)
        ax.plot(x, y, lw=0.8, ls="--", color="0.55", gid=f"orbit-{name}")
        ax.annotate(name, (x[0], y[0]), fontsize=8, color="0.35")

    xs, ys = [], []
    for seg in recon.segments:
        x, y = _orbit_points(seg.orbit, seg.theta_from, _segment_sweep(seg))
        xs.append(x)
        ys.append(y)
    ax.plot(np.concatenate(xs), np.concatenate(ys), lw=1.4,
            color="tab:blue", gid="trajectory")

    counts = {}
    for ev in recon.events:
        k = counts.get(ev.kind, 0) + 1
        counts[ev.kind] = k
        style = _EVENT_STYLE.get(ev.kind, dict(marker="x", color="k"))
        label = ev.kind if k == 1 else None
        ax.scatter([ev.r[0]], [ev.r[1]], s=45, zorder=5, label=label,
                   gid=f"event-{ev.kind}-{k}", **style)

    ax.set_aspect("equal")
    ax.set_xlabel("x, km")
    ax.set_ylabel("y, km")
    if title:
        ax.set_title(title)
    ax.legend(loc="upper right", fontsize=8)
    _save(fig, path)
    return recon


def render_scan(rows, path, title="best objective vs launch date"):
    """Line plot of the best objective over a launch-date scan.

    rows: iterable of (t0, f_obj or None).
    """
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.add_subplot(111)
    t = [r[0] for r in rows if r[1] is not None]
    f = [r[1] for r in rows if r[1] is not None]
    ax.plot(t, f, marker="o", gid="scan-best")
    ax.set_xlabel("t0, days")
    ax.set_ylabel("best f_obj, km/s")
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def render_histogram(values, path, threshold=None,
                     title="best objective over runs"):
    """Histogram of per-run best objective values."""
    fig = Figure(figsize=(6.0, 4.0))
    ax = fig.add_subplot(111)
    if len(values):
        ax.hist(values, bins=min(30, max(5, len(values) // 3)),
                gid="run-hist", color="tab:blue", alpha=0.8)
    if threshold is not None:
        ax.axvline(threshold, color="tab:red", ls="--", gid="threshold")
    ax.set_xlabel("best f_obj, km/s")
    ax.set_ylabel("runs")
    ax.set_title(title)
    _save(fig, path)
