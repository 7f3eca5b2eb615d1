"""Scenario execution: resolve the system, build the grid, run every model."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import warnings

import numpy as np

from .assembly import (DEGENERATE_SHIFT, RegimeReport, running_average, t2_relative_residual,
                       transition_t1, transition_t2)
from .config import resolve_system, scaled_time
from .dynamics import (AmplitudeSeries, CorrelationSeries, RateModel, correlation_from_exponent,
                       integrate_amplitude)
from .errors import InvalidInputError, TLSDecayError
from .kernel_tcl import golden_rule_rate
from .lrt import LineShape

REFINE_POINTS = 41
REFINE_SPAN = 0.1


@dataclass(frozen=True)
class Notice:
    """A warning tied to where it came from."""

    message: str
    module: str
    model: str = None
    t: float = None

    def to_dict(self):
        return {"message": self.message, "module": self.module, "model": self.model, "t": self.t}


@dataclass(frozen=True)
class ModelResult:
    kind: str
    shift: np.ndarray
    rate: np.ndarray
    amplitude: AmplitudeSeries
    correlations: tuple = ()
    rate_average: np.ndarray = None
    notices: tuple = ()


@dataclass(frozen=True)
class ResultBundle:
    config: object
    grid: np.ndarray
    stationary: dict
    regimes: RegimeReport
    models: dict
    notices: tuple = field(default=())

    @property
    def all_notices(self):
        out = list(self.notices)
        for res in self.models.values():
            out.extend(res.notices)
        return tuple(out)


def build_grid(spec, t1, t2, gamma):
    """``[0]`` plus the configured points, with linear refinement around ``t1`` and ``t2``."""
    t_min = spec.t_min if spec.t_min is not None else 1e-2 / gamma
    t_max = scaled_time(spec.t_max, t1, t2, gamma)
    if not 0 < t_min < t_max:
        raise InvalidInputError(f"grid needs 0 < t_min < t_max, got t_min={t_min}, t_max={t_max}",
                                module="cli")
    if spec.spacing == "log":
        base = np.geomspace(t_min, t_max, spec.points)
    else:
        base = np.linspace(t_min, t_max, spec.points)
    parts = [np.zeros(1), base]
    for mark in (t1, t2):
        if t_min < mark < t_max:
            lo, hi = max(t_min, (1 - REFINE_SPAN) * mark), min(t_max, (1 + REFINE_SPAN) * mark)
            parts.append(np.linspace(lo, hi, REFINE_POINTS))
            parts.append(np.array([mark]))
    return np.unique(np.concatenate(parts))


def _line_shape(cfg, omega_s, stationary):
    over = cfg.line_shape
    centre = over.shifted_frequency if over.shifted_frequency is not None else omega_s + stationary.shift
    width = over.width if over.width is not None else stationary.rate
    return LineShape(centre, width)


def _default_base(cfg):
    # factorised ground-state value |d|^2; the same prefactor is used for every pair
    return complex(cfg.dipole_strength)


def _run_model(kind, cfg, system, stationary, line, grid, t1):
    notices = []
    degenerate = abs(stationary.shift) < DEGENERATE_SHIFT * stationary.rate
    rate_only = kind == "product" and degenerate
    if rate_only:
        notices.append(Notice("stationary shift is degenerate; product shift omitted, rate only",
                              "assembly", kind, 0.0))
    rm = RateModel(kind, system.omega_s, stationary, system, line, rate_only=rate_only)
    try:
        pair = rm.shift_rate(grid)
        amp = integrate_amplitude(rm, grid, rtol=cfg.tolerance)
    except TLSDecayError as exc:
        exc.context.setdefault("model", kind)
        raise
    shift = np.asarray(pair.shift, float)
    rate = np.asarray(pair.rate, float)
    negative = rate < -cfg.tolerance * stationary.rate  # ignore rounding noise around 0
    if np.any(negative):
        first = float(grid[np.argmax(negative)])
        notices.append(Notice("instantaneous rate becomes negative", "dynamics_qrt", kind, first))
    correlations = tuple(
        CorrelationSeries(grid, correlation_from_exponent(amp.exponent, grid, system.omega_s, req.pair,
                                                          base),
                          req.pair, 0.0, base)
        for req in cfg.correlations if req.model == kind
        for base in [req.base_value if req.base_value is not None else _default_base(cfg)])
    average = None
    if kind == "product":
        average = running_average(grid, 2.0 * amp.exponent.real, cfg.average_window * t1, rate)
    return ModelResult(kind, shift, rate, amp, correlations, average, tuple(notices))


def run_scenario(cfg, max_workers=None):
    """Run a validated :class:`~tlsdecay.config.ScenarioConfig`."""
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        resolved = resolve_system(cfg)
    notices = [Notice(str(w.message).split(" [module=")[0], "kernel_tcl", None, None) for w in caught]
    system, st = resolved.model, resolved.stationary
    t1 = transition_t1(st)
    t2 = transition_t2(system.omega_s, st)
    line = _line_shape(cfg, system.omega_s, st)
    grid = build_grid(cfg.grid, t1, t2, system.gamma)
    regimes = RegimeReport.for_grid(grid, t1, t2)
    stationary = {
        "omega_s": system.omega_s,
        "shifted_frequency": system.omega_s + st.shift,
        "dw_stat": st.shift,
        "gamma_stat": st.rate,
        "golden_rule_rate": float(golden_rule_rate(system)),
        "t1": t1,
        "t2": t2,
        "t2_relative_residual": float(t2_relative_residual(t2, system.omega_s, st)),
        "gamma_env": system.gamma,
        "expansion_parameter": st.rate / system.gamma,
        "environment_center": system.env.center,
        "environment_weight": system.env.weight,
        "line_shape": {"shifted_frequency": line.shifted_frequency, "width": line.width,
                       "normalization": line.normalization},
        "fixed_point_iterations": resolved.iterations,
    }

    def work(kind):
        return _run_model(kind, cfg, system, st, line, grid, t1)

    with ThreadPoolExecutor(max_workers=max_workers or len(cfg.models)) as pool:
        results = list(pool.map(work, cfg.models))
    return ResultBundle(cfg, grid, stationary, regimes, {r.kind: r for r in results}, tuple(notices))
