import math

import pytest

from patrolcover.config import ConfigError, PlanConfig, load_config, parse_start


def test_defaults_convert_degrees():
    cfg = PlanConfig()
    assert cfg.sensor.fov == pytest.approx(math.radians(120))
    assert cfg.grasp.iterations == 32 and cfg.grasp.rcl_size == 3 and cfg.grasp.seed == 0
    assert cfg.stop.max_iterations == 10_000


def test_updated_ignores_none_and_rejects_unknown():
    cfg = PlanConfig().updated({"fov_deg": 90, "seed": None, "grasp-iters": "5"})
    assert cfg.fov_deg == 90 and cfg.seed == 0 and cfg.grasp_iters == 5
    with pytest.raises(ConfigError):
        PlanConfig().updated({"bogus": 1})
    with pytest.raises(ConfigError):
        PlanConfig().updated({"rcl": 1.5})


def test_invalid_component_values():
    with pytest.raises(ConfigError):
        PlanConfig(fov_deg=0)
    with pytest.raises(ConfigError):
        PlanConfig(v_linear=-1)
    with pytest.raises(ConfigError):
        PlanConfig(rotation_mode="spin")


def test_parse_start():
    assert parse_start("1.5, 2,90") == (1.5, 2.0, 90.0)
    assert parse_start([1, 2]) == (1.0, 2.0, 0.0)
    with pytest.raises(ValueError):
        parse_start("1")


def test_load_yaml_and_json(tmp_path):
    (tmp_path / "c.yaml").write_text("fov_deg: 90\nstart: [0.5, 0.5, 45]\n")
    cfg = load_config(tmp_path / "c.yaml")
    assert cfg.fov_deg == 90 and cfg.start == (0.5, 0.5, 45.0)
    (tmp_path / "c.json").write_text('{"rcl": 1}')
    assert load_config(tmp_path / "c.json").rcl == 1
    (tmp_path / "bad.yaml").write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_config(tmp_path / "bad.yaml")
