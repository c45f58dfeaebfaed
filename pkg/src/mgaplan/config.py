"""Run configuration: one JSON file describes a whole case study.

A config bundles the body catalog, the discrete problem definition
(initial conditions plus per-leg value sets, DSM values in km/s), the
colony settings, and the campaign extras (repetitions, success
threshold, optional launch-date scan window).  The raw dictionary is
kept alongside the resolved objects so result files can embed it and be
re-run bit-for-bit.
"""

import copy
import json
import os
from dataclasses import dataclass
from importlib import resources

from .ephem import load_catalog, packaged_catalog
from .legs import Objective
from .planner import LegSets, ProblemSpec, SearchConfig


@dataclass(frozen=True)
class ScanWindow:
    """Launch-date grid: start/end offsets are absolute epochs, days."""

    start: float
    end: float
    step: float

    def __post_init__(self):
        if self.step <= 0.0:
            raise ValueError("scan step must be positive")
        if self.end < self.start:
            raise ValueError("scan end before start")

    def dates(self):
        n = int(round((self.end - self.start) / self.step))
        return [self.start + k * self.step for k in range(n + 1)]


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration plus the raw dict it was built from."""

    problem: ProblemSpec
    search: SearchConfig
    reps: int = 100
    success_threshold: float = None
    scan: ScanWindow = None
    raw: dict = None


def _build_catalog(doc: dict):
    spec = doc.get("catalog", "planets")
    if isinstance(spec, str):
        catalog = packaged_catalog(spec)
    elif isinstance(spec, dict) and "path" in spec:
        catalog = load_catalog(spec["path"])
    elif isinstance(spec, dict):
        catalog = load_catalog(spec)
    else:
        raise ValueError("catalog must be a packaged name, {'path': ...} "
                         "or an inline catalog object")
    factors = doc.get("pericentre_factors")
    if factors:
        catalog = catalog.with_pericentre_factors(
            {name: tuple(v) for name, v in factors.items()})
    return catalog


def _build_problem(doc: dict, catalog) -> ProblemSpec:
    p = doc["problem"]
    legs = tuple(
        LegSets(targets=tuple(leg["targets"]),
                m_dsm=tuple(leg.get("m_dsm", [0.0])),
                n_rev1=tuple(leg.get("n_rev1", [0])),
                n_rev2=tuple(leg.get("n_rev2", [0])),
                f_pa=tuple(leg.get("f_pa", [0, 1])),
                f_12=tuple(leg.get("f_12", [0, 1])))
        for leg in p["legs"])
    obj = p.get("objective", {"kind": "vinf"})
    leg_cap = p.get("tof_leg_max_days")
    if isinstance(leg_cap, list):
        leg_cap = tuple(leg_cap)
    return ProblemSpec(
        catalog=catalog,
        P0=p["P0"],
        t0=float(p["t0"]),
        phi0=float(p["phi0"]),
        legs=legs,
        v0_bounds=tuple(p["v0_bounds"]),
        tof_total_max_days=float(p["tof_total_max_days"]),
        tof_leg_max_days=leg_cap,
        objective=Objective(obj.get("kind", "vinf"),
                            float(obj.get("sigma", 0.0))),
        forced_dtheta=float(p.get("forced_dtheta", 0.3)),
        n_grid=int(p.get("n_grid", 64)))


def config_from_dict(doc: dict) -> RunConfig:
    """Build a RunConfig from an already-parsed JSON document."""
    doc = copy.deepcopy(doc)
    catalog = _build_catalog(doc)
    problem = _build_problem(doc, catalog)
    s = doc.get("search", {})
    search = SearchConfig(
        n_ants=int(s.get("n_ants", 10)),
        steps=tuple((int(n), float(w))
                    for n, w in s.get("steps", [[30, 0.0], [30, 20.0]])),
        f_obj_ref=float(s.get("f_obj_ref", 1.0)),
        n_eval_max=int(s.get("n_eval_max", 600)),
        seed=int(s.get("seed", 0)))
    scan = doc.get("scan")
    if scan is not None:
        scan = ScanWindow(float(scan["start"]), float(scan["end"]),
                          float(scan["step"]))
    threshold = doc.get("success_threshold")
    return RunConfig(
        problem=problem, search=search,
        reps=int(doc.get("reps", 100)),
        success_threshold=None if threshold is None else float(threshold),
        scan=scan, raw=doc)


def packaged_config_path(name: str):
    base = resources.files("mgaplan").joinpath("data").joinpath("configs")
    return base.joinpath(f"{name}.json")


def load_config(spec) -> RunConfig:
    """Load a config from a file path or a packaged config name."""
    if isinstance(spec, dict):
        return config_from_dict(spec)
    if os.path.exists(spec):
        with open(spec) as f:
            return config_from_dict(json.load(f))
    path = packaged_config_path(spec)
    if path.is_file():
        return config_from_dict(json.loads(path.read_text()))
    raise FileNotFoundError(f"no config file or packaged config named {spec!r}")


def with_overrides(config: RunConfig, seed=None, n_eval_max=None,
                   t0=None) -> RunConfig:
    """New RunConfig with selected fields replaced (raw dict kept in sync)."""
    doc = copy.deepcopy(config.raw)
    if seed is not None:
        doc.setdefault("search", {})["seed"] = int(seed)
    if n_eval_max is not None:
        doc.setdefault("search", {})["n_eval_max"] = int(n_eval_max)
    if t0 is not None:
        doc["problem"]["t0"] = float(t0)
    return config_from_dict(doc)
