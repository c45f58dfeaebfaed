"""Analytic body ephemerides on fixed planar mean elements.

A catalog binds a central gravitational parameter to a set of bodies, each
carrying its own mu, mean radius, swing-by pericentre bounds (as factors of
the radius) and Keplerian elements referred to a common epoch t_ref (days,
MJD2000).  States are obtained by propagating the mean anomaly at the
two-body rate and solving Kepler's equation.
"""

import json
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np

from . import kernels as K
from .conic import Orbit2D, State2D

DAY_S = K.DAY_S


@dataclass(frozen=True)
class Body:
    name: str
    mu_body: float
    radius: float
    rp_min_factor: float
    rp_max_factor: float
    elements: Orbit2D
    mean_anomaly_epoch: float
    code: str = ""

    @property
    def rp_min(self) -> float:
        """Lowest admissible swing-by pericentre radius, km."""
        return self.rp_min_factor * self.radius

    @property
    def rp_max(self) -> float:
        return self.rp_max_factor * self.radius


@dataclass(frozen=True)
class BodyCatalog:
    central_mu: float
    bodies: dict
    t_ref: float

    def __getitem__(self, name: str) -> Body:
        try:
            return self.bodies[name]
        except KeyError:
            raise KeyError(f"body {name!r} not in catalog") from None

    def with_pericentre_factors(self, factors: dict) -> "BodyCatalog":
        """Copy of the catalog with per-body (min, max) factor overrides."""
        bodies = dict(self.bodies)
        for name, (lo, hi) in factors.items():
            if not 0.0 < lo <= hi:
                raise ValueError(f"bad pericentre factors for {name}: {lo}, {hi}")
            bodies[name] = replace(self[name], rp_min_factor=float(lo),
                                   rp_max_factor=float(hi))
        return BodyCatalog(self.central_mu, bodies, self.t_ref)


def solve_kepler(mean_anomaly: float, e: float) -> float:
    """Eccentric anomaly for an elliptic orbit, residual below 1e-13 rad."""
    if not 0.0 <= e < 1.0:
        raise ValueError("solve_kepler handles elliptic orbits only")
    return K.kepler_E(mean_anomaly, e)


def body_state(catalog: BodyCatalog, name: str, t: float) -> State2D:
    """Heliocentric (or central-body) state of ``name`` at epoch ``t`` (days)."""
    b = catalog[name]
    el = b.elements
    x, y, vx, vy = K.body_state_at(el.a, el.e, el.lon_peri,
                                   b.mean_anomaly_epoch,
                                   catalog.t_ref * DAY_S,
                                   catalog.central_mu, t * DAY_S)
    return State2D(np.array([x, y]), np.array([vx, vy]), t)


def body_anomaly(catalog: BodyCatalog, name: str, t: float) -> float:
    """True anomaly of ``name`` at epoch ``t`` (days), in [0, 2*pi)."""
    b = catalog[name]
    el = b.elements
    return K.body_anomaly_at(el.a, el.e, b.mean_anomaly_epoch,
                             catalog.t_ref * DAY_S, catalog.central_mu,
                             t * DAY_S)


def load_catalog(source) -> BodyCatalog:
    """Read a catalog from a JSON file path or an already-parsed dict."""
    if isinstance(source, dict):
        raw = source
    else:
        with open(source) as fh:
            raw = json.load(fh)
    mu_c = float(raw["central_mu"])
    t_ref = float(raw.get("t_ref", 0.0))
    bodies = {}
    for name, d in raw["bodies"].items():
        el = d["elements"]
        orbit = Orbit2D(float(el["a"]), float(el["e"]),
                        float(el["lon_peri"]), mu_c)
        bodies[name] = Body(
            name=name,
            mu_body=float(d["mu"]),
            radius=float(d["radius"]),
            rp_min_factor=float(d.get("rp_min_factor", 1.1)),
            rp_max_factor=float(d.get("rp_max_factor", 10.0)),
            elements=orbit,
            mean_anomaly_epoch=float(d["mean_anomaly_epoch"]),
            code=d.get("code", name[:1].upper()),
        )
    return BodyCatalog(mu_c, bodies, t_ref)


def packaged_catalog(name: str) -> BodyCatalog:
    """Load one of the catalogs shipped with the package.

    Available names: ``planets`` (heliocentric) and ``jupiter_moons``
    (joviocentric Galilean moons).
    """
    ref = resources.files("mgaplan").joinpath("data").joinpath(f"{name}.json")
    with ref.open() as fh:
        return load_catalog(json.load(fh))


def save_catalog(catalog: BodyCatalog, path) -> None:
    """Write a catalog to JSON in the same schema accepted by load_catalog."""
    out = {"central_mu": catalog.central_mu, "t_ref": catalog.t_ref,
           "bodies": {}}
    for name, b in catalog.bodies.items():
        out["bodies"][name] = {
            "mu": b.mu_body,
            "radius": b.radius,
            "rp_min_factor": b.rp_min_factor,
            "rp_max_factor": b.rp_max_factor,
            "code": b.code,
            "elements": {"a": b.elements.a, "e": b.elements.e,
                         "lon_peri": b.elements.lon_peri},
            "mean_anomaly_epoch": b.mean_anomaly_epoch,
        }
    with open(path, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")
