"""Body catalog and planar Keplerian ephemeris tests."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mgaplan.conic import Orbit2D
from mgaplan.ephem import (Body, BodyCatalog, body_anomaly, body_state,
                           load_catalog, packaged_catalog, save_catalog,
                           solve_kepler)

import oracles

MU_SUN = 132712440018.0


def test_kepler_circular_identity():
    assert solve_kepler(0.7, 0.0) == pytest.approx(0.7, abs=1e-13)


def test_kepler_apoapsis_symmetry():
    assert solve_kepler(np.pi, 0.5) == pytest.approx(np.pi, abs=1e-13)


def test_kepler_residual_and_bound():
    e = 0.3
    E = solve_kepler(1.0, e)
    assert abs(E - e * np.sin(E) - 1.0) < 1e-13
    assert abs(E - 1.0) <= e + 1e-13


@given(M=st.floats(-20.0, 20.0), e=st.floats(0.0, 0.999))
@settings(max_examples=200, deadline=None)
def test_kepler_matches_bisection_oracle(M, e):
    """Solver and oracle agree modulo full turns of the mean anomaly."""
    two_pi = 2.0 * np.pi
    E = solve_kepler(M, e)
    resid = (E - e * np.sin(E) - M) % two_pi
    assert min(resid, two_pi - resid) < 1e-12
    gap = (E - oracles.kepler_bisection(M, e)) % two_pi
    assert min(gap, two_pi - gap) < 1e-11


def test_kepler_rejects_open_orbits():
    with pytest.raises(ValueError):
        solve_kepler(1.0, 1.0)
    with pytest.raises(ValueError):
        solve_kepler(1.0, -0.1)


def _circular_catalog(a=149597870.7, m0=0.25):
    body = Body(name="probe", mu_body=1000.0, radius=1000.0,
                rp_min_factor=1.1, rp_max_factor=5.0,
                elements=Orbit2D(a, 0.0, 0.0, MU_SUN),
                mean_anomaly_epoch=m0)
    return BodyCatalog(MU_SUN, {"probe": body}, t_ref=0.0)


def test_circular_state_at_epoch():
    cat = _circular_catalog(m0=0.25)
    st0 = body_state(cat, "probe", 0.0)
    a = cat["probe"].elements.a
    assert np.hypot(*st0.r) == pytest.approx(a, rel=1e-12)
    assert np.arctan2(st0.r[1], st0.r[0]) == pytest.approx(0.25, abs=1e-12)


def test_quarter_period_advances_quarter_turn():
    cat = _circular_catalog(m0=0.0)
    period = cat["probe"].elements.period / 86400.0
    st1 = body_state(cat, "probe", period / 4.0)
    assert period == pytest.approx(365.25, rel=2e-3)
    assert np.arctan2(st1.r[1], st1.r[0]) == pytest.approx(np.pi / 2,
                                                           abs=1e-9)


@pytest.mark.parametrize("name", ["mercury", "venus", "earth", "mars",
                                  "jupiter", "saturn"])
def test_periodicity(planets, name):
    period = planets[name].elements.period / 86400.0
    s0 = body_state(planets, name, 123.4)
    s1 = body_state(planets, name, 123.4 + period)
    assert np.allclose(s0.r, s1.r, rtol=0, atol=1e-9 * np.hypot(*s0.r))
    assert np.allclose(s0.v, s1.v, rtol=0, atol=1e-9 * np.hypot(*s0.v))


def test_energy_momentum_consistency(planets, moons):
    rng = np.random.default_rng(42)
    for catalog in (planets, moons):
        for name, body in catalog.bodies.items():
            el = body.elements
            for t in rng.uniform(-5000.0, 15000.0, size=5):
                s = body_state(catalog, name, float(t))
                r = np.hypot(*s.r)
                energy = 0.5 * (s.v @ s.v) - catalog.central_mu / r
                h = s.r[0] * s.v[1] - s.r[1] * s.v[0]
                assert energy == pytest.approx(
                    -catalog.central_mu / (2.0 * el.a), rel=1e-10)
                assert h == pytest.approx(
                    np.sqrt(catalog.central_mu * el.p), rel=1e-10)
                assert h > 0.0


def test_body_anomaly_consistent_with_state(planets):
    th = body_anomaly(planets, "mars", 777.0)
    s = body_state(planets, "mars", 777.0)
    el = planets["mars"].elements
    assert 0.0 <= th < 2.0 * np.pi
    r_expect = el.p / (1.0 + el.e * np.cos(th))
    assert np.hypot(*s.r) == pytest.approx(r_expect, rel=1e-12)
    assert np.arctan2(s.r[1], s.r[0]) % (2 * np.pi) == pytest.approx(
        (el.lon_peri + th) % (2 * np.pi), abs=1e-9)


def test_unknown_body_raises(planets):
    with pytest.raises(KeyError, match="pluto"):
        planets["pluto"]


def test_pericentre_factor_override(planets):
    cat = planets.with_pericentre_factors({"earth": (2.0, 8.0)})
    assert cat["earth"].rp_min == pytest.approx(2.0 * 6378.136)
    assert cat["earth"].rp_max == pytest.approx(8.0 * 6378.136)
    assert cat["venus"].rp_min_factor == planets["venus"].rp_min_factor
    with pytest.raises(ValueError):
        planets.with_pericentre_factors({"earth": (3.0, 2.0)})


def test_catalog_round_trip(tmp_path, planets):
    path = tmp_path / "cat.json"
    save_catalog(planets, path)
    again = load_catalog(str(path))
    assert again.central_mu == planets.central_mu
    assert set(again.bodies) == set(planets.bodies)
    for name in planets.bodies:
        a, b = planets[name], again[name]
        assert a.elements.a == b.elements.a
        assert a.mean_anomaly_epoch == b.mean_anomaly_epoch
        assert a.code == b.code


def test_load_catalog_defaults():
    cat = load_catalog({
        "central_mu": MU_SUN,
        "bodies": {"x": {"mu": 1.0, "radius": 10.0,
                         "elements": {"a": 1e8, "e": 0.1, "lon_peri": 0.3},
                         "mean_anomaly_epoch": 0.0}}})
    assert cat["x"].rp_min_factor == 1.1
    assert cat["x"].rp_max_factor == 10.0
    assert cat["x"].code == "X"
    assert cat.t_ref == 0.0


def test_packaged_catalogs_have_expected_bodies(planets, moons):
    assert set(planets.bodies) == {"mercury", "venus", "earth", "mars",
                                   "jupiter", "saturn"}
    assert set(moons.bodies) == {"io", "europa", "ganymede", "callisto"}
    assert moons.central_mu == pytest.approx(planets["jupiter"].mu_body)
    for cat in (planets, moons):
        for body in cat.bodies.values():
            assert 0.0 <= body.elements.e < 1.0
            assert body.rp_min < body.rp_max
