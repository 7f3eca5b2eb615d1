"""Product matching of TCL and LRT shift/rate, and the regime transition times."""
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateShiftError, InvalidInputError, RootNotFoundError
from .kernel_tcl import ShiftRatePair

DEGENERATE_SHIFT = 1e-9
REGIMES = ("transient", "markovian", "algebraic")


def product_shift_rate(tcl_pair, lrt_pair, stationary, rate_only=False):
    """``(dw_tcl dw_lrt / dw_stat, G_tcl G_lrt / G_stat)``; arrays allowed.

    With ``rate_only`` a degenerate stationary shift yields ``nan`` for the
    shift instead of raising.
    """
    if not stationary.rate > 0:
        raise InvalidInputError("stationary rate must be positive", module="assembly")
    rate = np.asarray(tcl_pair.rate) * np.asarray(lrt_pair.rate) / stationary.rate
    if abs(stationary.shift) < DEGENERATE_SHIFT * stationary.rate:
        if not rate_only:
            raise DegenerateShiftError(
                f"|dw_stat| = {abs(stationary.shift):.3g} is below {DEGENERATE_SHIFT:g} Gamma_stat; "
                "the product shift divides by it", module="assembly", model="product")
        shift = np.full(np.shape(rate), np.nan)
    else:
        shift = np.asarray(tcl_pair.shift) * np.asarray(lrt_pair.shift) / stationary.shift
    if np.ndim(rate) == 0:
        return ShiftRatePair(float(shift), float(rate))
    return ShiftRatePair(shift, rate)


def transition_t1(stationary):
    if not stationary.rate > 0:
        raise InvalidInputError("stationary rate must be positive", module="assembly")
    return 1.0 / stationary.rate


def _t2_log_residual(t, w, rate):
    # log(LHS) - log(RHS) of exp(-G t/2) = 2 w G / (pi (w^2 + G^2/4)^2 t^2)
    log_rhs = np.log(2 * w * rate / np.pi) - 2 * np.log(w * w + 0.25 * rate * rate) - 2 * np.log(t)
    return -0.5 * rate * t - log_rhs


def transition_t2(omega_s, stationary, xtol=1e-12):
    """Time where the algebraic branch-cut term overtakes the pole term."""
    rate = stationary.rate
    w = omega_s + stationary.shift
    if not (rate > 0 and w > 0):
        raise InvalidInputError("need Gamma_stat > 0 and w_S + dw_stat > 0", module="assembly")
    t1 = 1.0 / rate
    lo, hi = t1, 1e4 * t1
    f_lo, f_hi = _t2_log_residual(lo, w, rate), _t2_log_residual(hi, w, rate)
    if not (f_lo > 0 > f_hi):
        raise RootNotFoundError("no sign change of the t2 equation in [t1, 1e4 t1]",
                                module="assembly")
    while hi - lo > xtol * hi:
        mid = 0.5 * (lo + hi)
        if _t2_log_residual(mid, w, rate) > 0:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    # one Newton step on the log residual, derivative -G/2 + 2/t
    t -= _t2_log_residual(t, w, rate) / (-0.5 * rate + 2.0 / t)
    return t


def t2_relative_residual(t2, omega_s, stationary):
    rate, w = stationary.rate, omega_s + stationary.shift
    lhs = np.exp(-0.5 * rate * t2)
    rhs = 2 * w * rate / (np.pi * (w * w + 0.25 * rate * rate) ** 2 * t2 ** 2)
    return abs(lhs - rhs) / rhs


def classify_regime(t, t1, t2):
    if t < 0:
        raise InvalidInputError("t must be non-negative", module="assembly")
    if t < t1:
        return "transient"
    return "markovian" if t < t2 else "algebraic"


@dataclass(frozen=True)
class RegimeReport:
    t1: float
    t2: float
    labels: tuple

    def __post_init__(self):
        if not 0 < self.t1 < self.t2:
            raise InvalidInputError("need 0 < t1 < t2", module="assembly")

    @classmethod
    def for_grid(cls, grid, t1, t2):
        return cls(t1, t2, tuple(classify_regime(float(t), t1, t2) for t in grid))

    def counts(self):
        return {name: self.labels.count(name) for name in REGIMES}

    def to_dict(self):
        return {"t1": self.t1, "t2": self.t2,
                "boundaries": {"transient": [0.0, self.t1], "markovian": [self.t1, self.t2],
                               "algebraic": [self.t2, None]},
                "counts": self.counts()}


def running_average(grid, cumulative, window, instantaneous=None):
    """Trailing time average of a rate from its running integral.

    ``cumulative[i]`` is the integral of the rate from ``grid[0]`` to
    ``grid[i]``; the average at ``t`` is taken over ``[max(t - window, 0), t]``.
    Where that window is empty the ``instantaneous`` rate (or nan) is used.
    """
    grid = np.asarray(grid, float)
    cumulative = np.asarray(cumulative, float)
    start = np.maximum(grid - window, grid[0])
    span = grid - start
    prior = np.interp(start, grid, cumulative)
    with np.errstate(invalid="ignore", divide="ignore"):
        avg = (cumulative - prior) / span
    fill = np.nan if instantaneous is None else np.asarray(instantaneous, float)
    return np.where(span > 0, avg, fill)
