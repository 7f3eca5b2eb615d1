import json

import pytest

from tlsdecay.cli import load_preset
from tlsdecay.config import parse_scenario, resolve_system, scenario_from_dict
from tlsdecay.errors import ConfigValidationError

MINIMAL = {
    "system": {"omega_s": 50},
    "environment": {"kind": "drude_lorentz", "center": 50, "width": 5, "gamma_target": 1},
    "models": ["markov"],
}


def with_changes(**sections):
    raw = json.loads(json.dumps(MINIMAL))
    for key, value in sections.items():
        if isinstance(value, dict) and isinstance(raw.get(key), dict):
            raw[key].update(value)
        else:
            raw[key] = value
    return raw


def errors_of(raw):
    with pytest.raises(ConfigValidationError) as info:
        scenario_from_dict(raw)
    return info.value.errors


def test_minimal_defaults(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(MINIMAL))
    cfg = parse_scenario(path)
    assert cfg.grid.points == 2000 and cfg.grid.spacing == "log" and cfg.grid.t_max == "10*t2"
    assert cfg.environment.coupling == 1.0 and cfg.tolerance == 1e-10
    assert cfg.to_dict()["grid"]["points"] == 2000


def test_weight_and_target_conflict():
    errs = errors_of(with_changes(environment={"weight": 2.0}))
    assert any("'weight'" in e and "'gamma_target'" in e for e in errs)


def test_all_errors_reported():
    raw = with_changes(models=[], grid={"t_min": 5, "t_max": 1, "spacing": "cubic"},
                       system={"omega_s": -1})
    errs = errors_of(raw)
    assert len(errs) >= 4
    joined = "\n".join(errs)
    for fragment in ("models", "t_min", "spacing", "omega_s"):
        assert fragment in joined


def test_missing_sections():
    errs = errors_of({"models": ["markov"]})
    assert "missing required section 'system'" in errs
    assert "missing required section 'environment'" in errs


def test_unknown_key_and_model():
    errs = errors_of(with_changes(models=["markov", "tcl9"], colour="blue"))
    assert any("tcl9" in e for e in errs) and any("colour" in e for e in errs)


def test_correlation_model_must_be_selected():
    errs = errors_of(with_changes(correlations=[{"pair": "-+", "model": "product"}]))
    assert any("product" in e for e in errs)


def test_echo_round_trip():
    cfg = scenario_from_dict(with_changes(
        correlations=[{"pair": "++", "base_value": [0.5, -1.0]}, {"pair": "-+"}],
        grid={"t_max": "3*t1", "points": 17}, line_shape={"width": 0.9}))
    again = scenario_from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg


def test_tabulated_round_trip(tmp_path):
    raw = with_changes(environment={"kind": "tabulated", "center": None, "width": None,
                                    "table": [[40, 0], [50, 1], [60, 0]]})
    cfg = scenario_from_dict(raw)
    assert scenario_from_dict(json.loads(json.dumps(cfg.to_dict()))) == cfg


def test_fig2_preset():
    cfg = load_preset("fig2")
    assert cfg.system.shifted_frequency == 100
    assert cfg.environment.gamma_target == 1
    assert cfg.environment.width == 10
    assert cfg.environment.center == "resonant"


def test_zero_detuning_fixed_point():
    resolved = resolve_system(load_preset("fig2"))
    m, st = resolved.model, resolved.stationary
    assert resolved.iterations <= 5
    assert m.omega_s + st.shift == pytest.approx(100.0, rel=1e-8)
    assert m.env.center == 100.0
    assert st.rate == pytest.approx(1.0, rel=1e-6)


def test_resonant_centre_with_fixed_omega():
    cfg = scenario_from_dict(with_changes(environment={"center": "resonant"}))
    resolved = resolve_system(cfg)
    assert resolved.model.env.center == pytest.approx(50 + resolved.stationary.shift, rel=1e-8)


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigValidationError):
        parse_scenario(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigValidationError):
        parse_scenario(bad)
