"""Planar two-body conics: orbits, states and coplanar intersections.

All public quantities use km, km/s, radians and days (epochs, MJD2000);
time-of-flight values are returned in seconds.  Only direct (prograde)
motion is modelled; states with non-positive angular momentum are rejected.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels as K
from .errors import DegenerateIntersection, NonElliptic, RetrogradeOrbit

TWO_PI = K.TWO_PI
DAY_S = K.DAY_S


@dataclass(frozen=True)
class Orbit2D:
    """Keplerian conic in the reference plane.

    Parameters
    ----------
    a : float
        Semi-major axis in km (negative for hyperbolae).
    e : float
        Eccentricity, >= 0.
    lon_peri : float
        Longitude of pericentre in rad, measured counter-clockwise from
        the +x axis.
    mu : float
        Gravitational parameter of the central body, km^3/s^2.
    """

    a: float
    e: float
    lon_peri: float
    mu: float

    @property
    def is_elliptic(self) -> bool:
        return self.e < 1.0

    @property
    def p(self) -> float:
        """Semi-latus rectum, km (positive for every conic)."""
        return self.a * (1.0 - self.e * self.e)

    @property
    def period(self) -> float:
        """Orbital period in seconds; elliptic orbits only."""
        if not self.is_elliptic:
            raise NonElliptic("open orbits have no period")
        return TWO_PI * np.sqrt(self.a ** 3 / self.mu)


@dataclass(frozen=True)
class State2D:
    """Cartesian state: position (km), velocity (km/s), epoch (days, MJD2000)."""

    r: np.ndarray
    v: np.ndarray
    t: float


@dataclass(frozen=True)
class IntersectionPair:
    """One common point of two coplanar conics.

    theta_sc and theta_body are the true anomalies of the point on the
    first (spacecraft) and second (body) conic respectively, in [0, 2*pi).
    """

    theta_sc: float
    theta_body: float


def orbit_from_state(state: State2D, mu: float):
    """Conic through a Cartesian state.

    Returns (orbit, theta) with theta the true anomaly of the state on the
    orbit.  Raises RetrogradeOrbit when the angular momentum is not
    strictly positive.  Hyperbolic / parabolic states are returned as-is
    (``orbit.is_elliptic`` is False); callers that need a closed orbit must
    check the flag.
    """
    a, e, w, theta, status = K.orbit_from_state(
        state.r[0], state.r[1], state.v[0], state.v[1], mu)
    if status == K.ERR_RETROGRADE:
        raise RetrogradeOrbit("state has h <= 0; only direct orbits are supported")
    return Orbit2D(a, e, w, mu), theta


def state_at_anomaly(orbit: Orbit2D, theta: float, t: float) -> State2D:
    """State on ``orbit`` at true anomaly ``theta``, stamped with epoch ``t`` (days)."""
    x, y, vx, vy = K.state_at_anomaly(orbit.a, orbit.e, orbit.lon_peri,
                                      orbit.mu, theta)
    return State2D(np.array([x, y]), np.array([vx, vy]), t)


def time_of_flight(orbit: Orbit2D, theta_from: float, theta_to: float,
                   n_rev: int = 0) -> float:
    """Seconds to fly forward from theta_from to theta_to plus n_rev laps.

    Zero when the anomalies coincide and n_rev = 0; elliptic orbits only.
    """
    if not orbit.is_elliptic:
        raise NonElliptic("time of flight is defined on closed orbits only")
    if n_rev < 0:
        raise ValueError("n_rev must be >= 0")
    return K.tof_ell(orbit.a, orbit.e, orbit.mu, theta_from, theta_to,
                     float(n_rev))


def intersect_orbits(orbit_sc: Orbit2D, orbit_body: Orbit2D):
    """Common points of two coplanar conics sharing a focus.

    Returns a list of 0, 1 or 2 IntersectionPair, ordered by theta_sc
    ascending in [0, 2*pi).  A tangency collapses to a single pair.
    Raises DegenerateIntersection when the conics coincide within 1e-9
    (normalised), where the crossing set is a whole curve.
    """
    n, ta, tb, degen = K.intersect_conics(
        orbit_sc.a, orbit_sc.e, orbit_sc.lon_peri,
        orbit_body.a, orbit_body.e, orbit_body.lon_peri)
    if degen:
        raise DegenerateIntersection("conics coincide within tolerance")
    absolute = [ta, tb][:n]
    pairs = [IntersectionPair(K.wrap_two_pi(t - orbit_sc.lon_peri),
                              K.wrap_two_pi(t - orbit_body.lon_peri))
             for t in absolute]
    pairs.sort(key=lambda pr: pr.theta_sc)
    return pairs
