"""Configuration files: packaged case studies, dict input, overrides."""

import json

import pytest

from mgaplan.config import (ScanWindow, config_from_dict, load_config,
                            packaged_config_path, with_overrides)


def test_packaged_moon_tour_config(laplace_cfg):
    p = laplace_cfg.problem
    assert p.P0 == "ganymede"
    assert p.t0 == pytest.approx(9309.8)
    assert p.phi0 == pytest.approx(1.2471)
    assert p.v0_bounds == (4.5, 5.5)
    assert p.tof_total_max_days == 100.0
    assert p.n_p == 4
    assert p.legs[0].targets == ("ganymede",)
    assert p.legs[-1].targets == ("callisto",)
    assert p.objective.kind == "vinf"
    s = laplace_cfg.search
    assert (s.n_ants, s.steps, s.f_obj_ref, s.n_eval_max) == \
        (10, ((30, 0.0), (30, 20.0)), 3.0, 600)
    assert laplace_cfg.reps == 100
    assert laplace_cfg.success_threshold == 2.0
    assert laplace_cfg.scan is None
    assert laplace_cfg.raw["problem"]["P0"] == "ganymede"


def test_packaged_grand_tour_config(cassini_cfg):
    p = cassini_cfg.problem
    assert p.P0 == "earth"
    assert p.n_p == 5
    assert p.legs[-1].targets == ("saturn",)
    assert set(p.legs[0].m_dsm) == {-0.6, -0.35, -0.2, 0.0, 0.2, 0.35, 0.6}
    assert cassini_cfg.search.n_eval_max == 6000
    assert cassini_cfg.reps == 20
    assert cassini_cfg.success_threshold == 16.0
    jupiter = p.catalog["jupiter"]
    assert jupiter.rp_min == pytest.approx(5.0 * jupiter.radius)
    assert jupiter.rp_max == pytest.approx(100.0 * jupiter.radius)


def test_packaged_scan_config(bepi_cfg):
    assert bepi_cfg.scan == ScanWindow(4969.5, 4979.5, 2.5)
    assert bepi_cfg.scan.dates() == [4969.5, 4972.0, 4974.5, 4977.0, 4979.5]
    assert bepi_cfg.reps == 5
    assert bepi_cfg.problem.v0_bounds == (2.0, 4.5)


def test_config_from_dict_minimal(moons):
    doc = {
        "catalog": "jupiter_moons",
        "problem": {
            "P0": "ganymede", "t0": 9309.8, "phi0": 1.2471,
            "v0_bounds": [4.5, 5.5], "tof_total_max_days": 100.0,
            "legs": [{"targets": ["callisto"]}],
        },
    }
    cfg = config_from_dict(doc)
    assert cfg.problem.catalog["callisto"].name == "callisto"
    assert cfg.problem.legs[0].f_pa == (0, 1)
    assert cfg.search.n_ants == 10
    assert cfg.reps == 100
    assert cfg.success_threshold is None
    assert cfg.raw == doc


def test_config_pericentre_factor_override():
    doc = {
        "catalog": "jupiter_moons",
        "pericentre_factors": {"callisto": [1.5, 2.5]},
        "problem": {
            "P0": "ganymede", "t0": 0.0, "phi0": 0.0,
            "v0_bounds": [4.5, 5.5], "tof_total_max_days": 100.0,
            "legs": [{"targets": ["callisto"]}],
        },
    }
    body = config_from_dict(doc).problem.catalog["callisto"]
    assert (body.rp_min_factor, body.rp_max_factor) == (1.5, 2.5)


def test_load_config_from_file(tmp_path, laplace_cfg):
    path = tmp_path / "case.json"
    path.write_text(json.dumps(laplace_cfg.raw))
    cfg = load_config(str(path))
    assert cfg.problem == laplace_cfg.problem
    assert cfg.search == laplace_cfg.search


def test_load_config_unknown_name():
    with pytest.raises(FileNotFoundError):
        load_config("no_such_case")


def test_packaged_config_path_exists():
    assert packaged_config_path("laplace").is_file()
    assert packaged_config_path("cassini").is_file()
    assert packaged_config_path("bepicolombo_scan").is_file()


def test_with_overrides_round_trip(laplace_cfg):
    cfg = with_overrides(laplace_cfg, seed=7, n_eval_max=50, t0=9000.0)
    assert cfg.search.seed == 7
    assert cfg.search.n_eval_max == 50
    assert cfg.problem.t0 == 9000.0
    assert cfg.problem.phi0 == laplace_cfg.problem.phi0
    # the raw dict follows, so rebuilding from it gives the same config
    again = config_from_dict(cfg.raw)
    assert again.search == cfg.search
    assert again.problem == cfg.problem
    # the source config is untouched
    assert laplace_cfg.search.seed == 0
    assert laplace_cfg.problem.t0 == pytest.approx(9309.8)


def test_scan_window_validation():
    with pytest.raises(ValueError):
        ScanWindow(0.0, 10.0, 0.0)
    with pytest.raises(ValueError):
        ScanWindow(10.0, 0.0, 1.0)
    assert ScanWindow(5.0, 5.0, 1.0).dates() == [5.0]
