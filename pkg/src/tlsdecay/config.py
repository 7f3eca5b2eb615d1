"""Scenario configuration: JSON schema, exhaustive validation and echo.

A scenario file is a JSON object::

    {
      "system":      {"omega_s": 100}            # or {"shifted_frequency": 100}
      "environment": {"kind": "drude_lorentz", "center": "resonant", "width": 10,
                      "gamma_target": 1, "coupling": 1},   # or "weight" instead of gamma_target
      "line_shape":  {"shifted_frequency": ..., "width": ...},   # optional overrides
      "grid":        {"t_min": 0.001, "t_max": "10*t2", "points": 2000, "spacing": "log"},
      "models":      ["markov", "tcl2", "lrt", "product"],
      "correlations": [{"pair": "-+", "base_value": 1, "model": "product"}],
      "dipole_strength": 1,
      "tolerance": 1e-10,
      "average_window": 0.2,                    # trailing window of the rate average, in t1
      "outputs":     {"directory": "out", "formats": ["csv", "json"]}
    }

``shifted_frequency`` pins ``w_S + dw_stat`` instead of ``w_S``; with
``"center": "resonant"`` the environment peak sits on the shifted frequency
(zero detuning). Both are resolved by a short fixed-point iteration in
:func:`resolve_system`. ``t_max`` may be a number or ``"<x>*t1"``,
``"<x>*t2"``, ``"<x>*tgamma"`` (``tgamma = 1/gamma``).

Validation never stops at the first problem: :func:`parse_scenario` collects
every error and raises one :class:`ConfigValidationError` listing them all.
"""
import json
import math
import re
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Optional, Union

from .dynamics import KINDS, PAIRS
from .errors import ConfigValidationError, DegenerateCalibrationError, NumericalFailure
from .kernel_tcl import SystemEnvironmentModel, stationary_shift_rate
from .quadrature import RTOL
from .spectral import KINDS as SPECTRUM_KINDS, SpectralDensity, calibrate_weight, load_tabulated_csv

FIXED_POINT_ITERATIONS = 5
FIXED_POINT_RTOL = 1e-8
SPACINGS = ("log", "linear")
FORMATS = ("csv", "json")
_SCALED_TIME = re.compile(r"^\s*([0-9.eE+-]+)\s*\*\s*(t1|t2|tgamma)\s*$")


@dataclass(frozen=True)
class SystemConfig:
    omega_s: Optional[float] = None
    shifted_frequency: Optional[float] = None


@dataclass(frozen=True)
class EnvironmentConfig:
    kind: str
    width: Optional[float] = None
    center: Union[float, str, None] = None
    weight: Optional[float] = None
    gamma_target: Optional[float] = None
    coupling: float = 1.0
    table: Optional[tuple] = None
    csv: Optional[str] = None
    interpolation: str = "pchip"


@dataclass(frozen=True)
class LineShapeConfig:
    shifted_frequency: Optional[float] = None
    width: Optional[float] = None


@dataclass(frozen=True)
class GridConfig:
    t_min: Optional[float] = None
    t_max: Union[float, str] = "10*t2"
    points: int = 2000
    spacing: str = "log"


@dataclass(frozen=True)
class CorrelationRequest:
    pair: str
    model: str
    base_value: Optional[complex] = None


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "out"
    formats: tuple = FORMATS


@dataclass(frozen=True)
class ScenarioConfig:
    system: SystemConfig
    environment: EnvironmentConfig
    models: tuple
    line_shape: LineShapeConfig = field(default_factory=LineShapeConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    correlations: tuple = ()
    dipole_strength: float = 1.0
    tolerance: float = RTOL
    average_window: float = 0.2
    outputs: OutputConfig = field(default_factory=OutputConfig)

    def to_dict(self):
        """Plain-JSON echo; :func:`scenario_from_dict` inverts it."""
        out = asdict(self)
        env = out["environment"]
        if env["table"] is not None:
            env["table"] = [list(row) for row in env["table"]]
        out["models"] = list(self.models)
        out["outputs"]["formats"] = list(self.outputs.formats)
        out["correlations"] = [
            {"pair": c.pair, "model": c.model,
             "base_value": None if c.base_value is None else [c.base_value.real, c.base_value.imag]}
            for c in self.correlations]
        return out

    def with_overrides(self, tolerance=None, grid_points=None, models=None, directory=None):
        cfg = self
        if tolerance is not None:
            cfg = replace(cfg, tolerance=float(tolerance))
        if grid_points is not None:
            cfg = replace(cfg, grid=replace(cfg.grid, points=int(grid_points)))
        if models is not None:
            cfg = replace(cfg, models=tuple(models),
                          correlations=tuple(c for c in cfg.correlations if c.model in models))
        if directory is not None:
            cfg = replace(cfg, outputs=replace(cfg.outputs, directory=str(directory)))
        errors = []
        _check_scenario(cfg, errors)
        if errors:
            raise ConfigValidationError(errors)
        return cfg


# -- parsing -----------------------------------------------------------------

def _number(section, key, errors, positive=True, required=False, default=None):
    if key not in section or section[key] is None:
        if required:
            errors.append(f"missing required key {key!r}")
        return default
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        errors.append(f"{key!r} must be a finite number, got {value!r}")
        return default
    if positive and value <= 0:
        errors.append(f"{key!r} must be positive, got {value!r}")
        return default
    return float(value)


def _section(raw, key, errors, required=True):
    value = raw.get(key)
    if value is None:
        if required:
            errors.append(f"missing required section {key!r}")
        return {}
    if not isinstance(value, dict):
        errors.append(f"section {key!r} must be an object")
        return {}
    return value


def _unknown(section, allowed, where, errors):
    for key in sorted(set(section) - set(allowed)):
        errors.append(f"unknown key {where}.{key}")


def _complex(value, where, errors):
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value):
        return complex(value[0], value[1])
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    errors.append(f"{where} must be a number or [re, im], got {value!r}")
    return None


def _parse_system(raw, errors):
    sec = _section(raw, "system", errors)
    _unknown(sec, ("omega_s", "shifted_frequency"), "system", errors)
    omega_s = _number(sec, "omega_s", errors)
    shifted = _number(sec, "shifted_frequency", errors)
    given = [k for k in ("omega_s", "shifted_frequency") if sec.get(k) is not None]
    if len(given) != 1:
        errors.append("system needs exactly one of 'omega_s' or 'shifted_frequency', got "
                      + (", ".join(repr(k) for k in given) or "neither"))
    return SystemConfig(omega_s, shifted)


def _parse_environment(raw, errors, base_dir):
    sec = _section(raw, "environment", errors)
    _unknown(sec, ("kind", "center", "width", "weight", "gamma_target", "coupling", "table", "csv",
                   "interpolation"), "environment", errors)
    kind = sec.get("kind")
    if kind not in SPECTRUM_KINDS:
        errors.append(f"environment.kind must be one of {SPECTRUM_KINDS}, got {kind!r}")
    center = sec.get("center")
    if isinstance(center, str):
        if center != "resonant":
            errors.append(f"environment.center must be a number or 'resonant', got {center!r}")
        elif kind == "tabulated":
            errors.append("a tabulated environment cannot be re-centred ('resonant')")
    else:
        center = _number(sec, "center", errors, required=kind in ("drude_lorentz", "full_lorentzian"))
    width = _number(sec, "width", errors, required=kind in ("drude_lorentz", "full_lorentzian"))
    weight = _number(sec, "weight", errors)
    target = _number(sec, "gamma_target", errors)
    if (sec.get("weight") is None) == (sec.get("gamma_target") is None):
        both = sec.get("weight") is not None
        errors.append("environment needs exactly one of 'weight' or 'gamma_target'"
                      + (" (both 'weight' and 'gamma_target' given)" if both else " (neither given)"))
    coupling = _number(sec, "coupling", errors, default=1.0)
    table = sec.get("table")
    csv_path = sec.get("csv")
    if kind == "tabulated":
        if (table is None) == (csv_path is None):
            errors.append("tabulated environment needs exactly one of 'table' or 'csv'")
        if csv_path is not None:
            path = Path(csv_path)
            if not path.is_absolute() and base_dir is not None:
                path = Path(base_dir) / path
            csv_path = str(path)
        if table is not None:
            try:
                table = tuple((float(w), float(v)) for w, v in table)
            except (TypeError, ValueError):
                errors.append("environment.table must be a list of [frequency, value] pairs")
                table = None
    elif table is not None or csv_path is not None:
        errors.append(f"'table'/'csv' only apply to tabulated environments, not {kind!r}")
    interpolation = sec.get("interpolation", "pchip")
    if interpolation not in ("pchip", "linear"):
        errors.append(f"environment.interpolation must be 'pchip' or 'linear', got {interpolation!r}")
    return EnvironmentConfig(kind, width, center, weight, target, coupling, table, csv_path,
                             interpolation)


def _parse_grid(raw, errors):
    sec = _section(raw, "grid", errors, required=False)
    _unknown(sec, ("t_min", "t_max", "points", "spacing"), "grid", errors)
    t_min = _number(sec, "t_min", errors)
    t_max = sec.get("t_max", GridConfig.t_max)
    if isinstance(t_max, str):
        if not _SCALED_TIME.match(t_max):
            errors.append(f"grid.t_max string must look like '<x>*t1|t2|tgamma', got {t_max!r}")
    else:
        t_max = _number(sec, "t_max", errors, default=GridConfig.t_max)
    points = sec.get("points", GridConfig.points)
    if isinstance(points, bool) or not isinstance(points, int) or points < 2:
        errors.append(f"grid.points must be an integer >= 2, got {points!r}")
        points = GridConfig.points
    spacing = sec.get("spacing", "log")
    if spacing not in SPACINGS:
        errors.append(f"grid.spacing must be one of {SPACINGS}, got {spacing!r}")
    if t_min is not None and isinstance(t_max, float) and not t_min < t_max:
        errors.append(f"grid must increase: t_min={t_min} is not below t_max={t_max}")
    return GridConfig(t_min, t_max, points, spacing)


def _parse_models(raw, errors):
    models = raw.get("models")
    if not isinstance(models, list) or not models:
        errors.append("'models' must be a non-empty list")
        return ()
    bad = [m for m in models if m not in KINDS]
    if bad:
        errors.append(f"unknown models {bad}; choose from {KINDS}")
    if len(set(models)) != len(models):
        errors.append("'models' contains duplicates")
    return tuple(m for m in models if m in KINDS)


def _parse_correlations(raw, models, errors):
    items = raw.get("correlations", [])
    if not isinstance(items, list):
        errors.append("'correlations' must be a list")
        return ()
    out = []
    for i, item in enumerate(items):
        where = f"correlations[{i}]"
        if not isinstance(item, dict):
            errors.append(f"{where} must be an object")
            continue
        _unknown(item, ("pair", "model", "base_value"), where, errors)
        pair = item.get("pair")
        if pair not in PAIRS:
            errors.append(f"{where}.pair must be one of {PAIRS}, got {pair!r}")
        targets = [item["model"]] if "model" in item else list(models)
        for m in targets:
            if m not in models:
                errors.append(f"{where}.model {m!r} is not among the selected models")
        base = item.get("base_value")
        base = None if base is None else _complex(base, f"{where}.base_value", errors)
        out.extend(CorrelationRequest(pair, m, base) for m in targets if m in models)
    return tuple(out)


def _parse_outputs(raw, errors):
    sec = _section(raw, "outputs", errors, required=False)
    _unknown(sec, ("directory", "formats"), "outputs", errors)
    directory = sec.get("directory", "out")
    if not isinstance(directory, str) or not directory:
        errors.append("outputs.directory must be a non-empty string")
        directory = "out"
    formats = sec.get("formats", list(FORMATS))
    if not isinstance(formats, list) or not formats or any(f not in FORMATS for f in formats):
        errors.append(f"outputs.formats must be a non-empty subset of {FORMATS}")
        formats = list(FORMATS)
    return OutputConfig(directory, tuple(formats))


def _check_scenario(cfg, errors):
    if not cfg.models:
        errors.append("at least one model is required")
    if not (cfg.tolerance > 0 and cfg.tolerance < 1e-2):
        errors.append(f"tolerance must lie in (0, 1e-2), got {cfg.tolerance!r}")
    if cfg.grid.points < 2:
        errors.append(f"grid.points must be >= 2, got {cfg.grid.points}")


def scenario_from_dict(raw, base_dir=None):
    """Validate a decoded scenario object; raises with every problem found."""
    if not isinstance(raw, dict):
        raise ConfigValidationError(["scenario must be a JSON object"])
    errors = []
    _unknown(raw, ("system", "environment", "line_shape", "grid", "models", "correlations",
                   "dipole_strength", "tolerance", "average_window", "outputs"), "scenario", errors)
    system = _parse_system(raw, errors)
    env = _parse_environment(raw, errors, base_dir)
    line_sec = _section(raw, "line_shape", errors, required=False)
    _unknown(line_sec, ("shifted_frequency", "width"), "line_shape", errors)
    line = LineShapeConfig(_number(line_sec, "shifted_frequency", errors),
                           _number(line_sec, "width", errors))
    grid = _parse_grid(raw, errors)
    models = _parse_models(raw, errors)
    correlations = _parse_correlations(raw, models, errors)
    dipole = _number(raw, "dipole_strength", errors, default=1.0)
    tolerance = _number(raw, "tolerance", errors, default=RTOL)
    window = _number(raw, "average_window", errors, default=0.2)
    outputs = _parse_outputs(raw, errors)
    cfg = ScenarioConfig(system, env, models, line, grid, correlations, dipole, tolerance, window,
                         outputs)
    if models:
        _check_scenario(cfg, errors)
    if errors:
        raise ConfigValidationError(errors)
    return cfg


def parse_scenario(path):
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigValidationError([f"cannot read {path}: {exc.strerror}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigValidationError([f"{path} is not valid JSON: {exc}"]) from exc
    return scenario_from_dict(raw, base_dir=path.parent)


# -- physical resolution ------------------------------------------------------

@dataclass(frozen=True)
class ResolvedSystem:
    model: SystemEnvironmentModel
    stationary: object
    iterations: int


def _spectrum(env, center, omega_s):
    if env.kind == "tabulated":
        if env.csv is not None:
            spec = load_tabulated_csv(env.csv, interpolation=env.interpolation)
        else:
            spec = SpectralDensity("tabulated", table=env.table, interpolation=env.interpolation)
    else:
        spec = SpectralDensity(env.kind, center=center, width=env.width)
    if env.gamma_target is not None:
        return calibrate_weight(spec, env.coupling, omega_s, env.gamma_target)
    return spec.scaled(env.weight / spec.weight)


def resolve_system(cfg):
    """Build the system-environment model and its plateau pair.

    A pinned ``shifted_frequency`` or a resonant centre makes the system a
    fixed point of a scalar map: ``w_S = w~ - dw_stat(w_S)`` or
    ``center = w_S + dw_stat(center)``. The map is contracting but slowly
    (factor about -0.2 on the presets), so after the first plain step the
    update is a secant step on ``F(x) - x``. At most five evaluations,
    stopping at 1e-8 relative change.
    """
    env = cfg.environment
    resonant = env.center == "resonant"
    pinned = cfg.system.shifted_frequency
    if not resonant and pinned is None:
        model = SystemEnvironmentModel(cfg.system.omega_s, env.coupling,
                                       _spectrum(env, env.center, cfg.system.omega_s))
        return ResolvedSystem(model, stationary_shift_rate(model, rtol=cfg.tolerance), 0)

    def evaluate(x):
        # x is w_S when the shifted frequency is pinned, the centre otherwise
        omega_s = x if pinned is not None else cfg.system.omega_s
        center = (pinned if resonant else env.center) if pinned is not None else x
        if not omega_s > 0:
            raise DegenerateCalibrationError("fixed point drove omega_s non-positive", module="cli")
        model = SystemEnvironmentModel(omega_s, env.coupling, _spectrum(env, center, omega_s))
        st = stationary_shift_rate(model, rtol=cfg.tolerance)
        image = pinned - st.shift if pinned is not None else omega_s + st.shift
        return model, st, image - x

    x_prev = pinned if pinned is not None else cfg.system.omega_s
    model, st, r_prev = evaluate(x_prev)
    x = x_prev + r_prev
    for it in range(2, FIXED_POINT_ITERATIONS + 1):
        if abs(r_prev) < FIXED_POINT_RTOL * abs(x_prev):
            return ResolvedSystem(model, st, it - 1)
        model, st, r = evaluate(x)
        if abs(r) < FIXED_POINT_RTOL * abs(x):
            return ResolvedSystem(model, st, it)
        if r == r_prev:
            break
        x, x_prev, r_prev = x - r * (x - x_prev) / (r - r_prev), x, r
    raise NumericalFailure("zero-detuning fixed point did not converge",
                           residual=abs(r_prev) / abs(x_prev), module="cli",
                           iterations=FIXED_POINT_ITERATIONS)


def scaled_time(spec, t1, t2, gamma):
    if not isinstance(spec, str):
        return float(spec)
    factor, unit = _SCALED_TIME.match(spec).groups()
    return float(factor) * {"t1": t1, "t2": t2, "tgamma": 1.0 / gamma}[unit]
