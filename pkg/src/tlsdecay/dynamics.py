"""Amplitude, population and two-point correlations under a rate model.

Every rate model supplies a shift ``dw(t)`` and a population rate
``G(t)``. The excited-state amplitude is

    c1(t) = exp(-i w_S t - E(t)),   E(t) = int_0^t [i dw(s) + G(s)/2] ds

and the two-point functions <s_a(t+tau) s_b(t)> obey, to second order in
the coupling,

    dC/dtau = s_a [i w_S + eta i dw(tau) - s_a G(tau)/2] C

with ``s_+ = +1``, ``s_- = -1``, ``eta = +1`` for the mixed pairs (+-, -+)
and ``eta = -1`` for the equal pairs (++, --). The generator is a scalar,
so ``C(tau) = C(0) exp(s_a i w_S tau + s_a eta i Im E(tau) - Re E(tau))``.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .assembly import product_shift_rate
from .errors import InvalidInputError, TLSDecayError
from .kernel_tcl import ShiftRatePair, SystemEnvironmentModel, tcl2_shift_rate
from .lrt import LineShape, c1_lrt, lrt_shift_rate
from .quadrature import RTOL, cumulative_integral
from .spectral import full_lorentzian

KINDS = ("markov", "wwa", "tcl2", "lrt", "product")
PAIRS = ("+-", "-+", "++", "--")


@dataclass(frozen=True)
class RateModel:
    """One of the five shift/rate prescriptions.

    ``markov`` uses the TCL2 plateau pair; ``wwa`` keeps only the pole of the
    emission line, i.e. its centre and width, which coincide with the plateau
    unless the line shape is overridden.
    """

    kind: str
    omega_s: float
    stationary: ShiftRatePair
    system: Optional[SystemEnvironmentModel] = None
    line: Optional[LineShape] = None
    rate_only: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown rate model {self.kind!r}", module="dynamics_qrt")
        if self.kind in ("tcl2", "product") and self.system is None:
            raise InvalidInputError(f"{self.kind} needs a system-environment model",
                                    module="dynamics_qrt", model=self.kind)
        if self.kind in ("wwa", "lrt", "product") and self.line is None:
            raise InvalidInputError(f"{self.kind} needs a line shape",
                                    module="dynamics_qrt", model=self.kind)

    @property
    def constant(self):
        return self.kind in ("markov", "wwa")

    def constant_pair(self):
        if self.kind == "markov":
            return ShiftRatePair(self.stationary.shift, self.stationary.rate)
        if self.kind == "wwa":
            return ShiftRatePair(self.line.shifted_frequency - self.omega_s, self.line.width)
        raise TypeError(f"{self.kind} rates are time dependent")

    def shift_rate(self, t):
        """Shift and rate at ``t``; arrays in, arrays out."""
        t = np.asarray(t, dtype=float)
        if self.constant:
            pair = self.constant_pair()
            return ShiftRatePair(np.full(t.shape, pair.shift), np.full(t.shape, pair.rate))
        if self.kind == "tcl2":
            return tcl2_shift_rate(self.system, t)
        lrt = lrt_shift_rate(self.line, t, self.omega_s)
        if self.kind == "lrt":
            return ShiftRatePair(lrt.shift, lrt.rate)
        tcl = tcl2_shift_rate(self.system, t)
        return product_shift_rate(tcl, ShiftRatePair(lrt.shift, lrt.rate), self.stationary,
                                  rate_only=self.rate_only)


@dataclass(frozen=True)
class AmplitudeSeries:
    grid: np.ndarray
    c1: np.ndarray
    exponent: np.ndarray  # E(t) = int_0^t (i dw + G/2)

    @property
    def p1(self):
        return population(self)


@dataclass(frozen=True)
class CorrelationSeries:
    delays: np.ndarray
    values: np.ndarray
    pair: str
    base_time: float
    initial: complex


def _check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2 or grid[0] != 0 or np.any(np.diff(grid) <= 0):
        raise InvalidInputError("grid must start at 0 and increase strictly",
                                module="dynamics_qrt")
    return grid


def cumulative_exponent(model, grid, rtol=RTOL):
    """``E(t) = int_0^t [i dw(s) + G(s)/2] ds`` on ``grid``."""
    grid = _check_grid(grid)
    if model.constant:
        pair = model.constant_pair()
        return (1j * pair.shift + 0.5 * pair.rate) * grid
    skip_shift = model.kind == "product" and model.rate_only

    def integrand(s):
        try:
            pair = model.shift_rate(s)
        except TLSDecayError as exc:
            exc.context.setdefault("model", model.kind)
            raise
        if skip_shift:
            return 0.5 * pair.rate
        return 1j * pair.shift + 0.5 * pair.rate

    try:
        out = cumulative_integral(integrand, grid, rtol=rtol, what=f"{model.kind} exponent")
    except TLSDecayError as exc:
        exc.context.setdefault("model", model.kind)
        exc.context.setdefault("module", "dynamics_qrt")
        raise
    if skip_shift:
        out = out.real + 1j * np.nan
    return out


def integrate_amplitude(model, grid, direct=True, rtol=RTOL):
    """Excited-state amplitude on ``grid`` (which must start at 0).

    For ``lrt`` the closed-form amplitude is returned unless ``direct`` is
    False, in which case the rate is re-integrated like any other model.
    """
    grid = _check_grid(grid)
    if model.kind == "lrt" and direct:
        c1 = np.asarray(c1_lrt(model.line, grid))
        with np.errstate(divide="ignore"):
            exponent = -np.log(c1 * np.exp(1j * model.omega_s * grid))
        # imaginary part only modulo 2 pi here
        return AmplitudeSeries(grid, c1, exponent)
    exponent = cumulative_exponent(model, grid, rtol)
    c1 = np.exp(-1j * model.omega_s * grid - exponent)
    return AmplitudeSeries(grid, c1, exponent)


def population(series):
    """``|c1|**2``, taken as ``exp(-2 Re E)`` so constant rates give ``exp(-G t)`` to the last digit."""
    with np.errstate(over="ignore"):
        return np.exp(-2.0 * np.asarray(series.exponent).real)


def _pair_signs(pair):
    if pair not in PAIRS:
        raise InvalidInputError(f"pair must be one of {PAIRS}, got {pair!r}", module="dynamics_qrt")
    s = 1.0 if pair[0] == "+" else -1.0
    eta = 1.0 if pair[0] != pair[1] else -1.0
    return s, eta


def correlation_from_exponent(exponent, delays, omega_s, pair, base_value):
    s, eta = _pair_signs(pair)
    delays = np.asarray(delays, float)
    return base_value * np.exp(s * 1j * omega_s * delays + s * eta * 1j * exponent.imag - exponent.real)


def correlation_sigma(model, a, b, base_value, delays, base_time=0.0, rtol=RTOL):
    """``<s_a(t + tau) s_b(t)>`` over ``delays`` (starting at 0).

    ``base_value`` is the correlation at zero delay; in general it does not
    factorise and must come from the caller.
    """
    pair = f"{a}{b}"
    _pair_signs(pair)
    delays = _check_grid(delays)
    exponent = cumulative_exponent(model, delays, rtol)
    values = correlation_from_exponent(exponent, delays, model.omega_s, pair, base_value)
    return CorrelationSeries(delays, values, pair, base_time, complex(base_value))


def dipole_correlation_ground(model, delays, dipole_sq=1.0, rtol=RTOL):
    """Ground-state dipole correlation ``|d|^2 exp(-int [i w_S + i dw + G/2])``."""
    return correlation_sigma(model, "-", "+", dipole_sq, delays, rtol=rtol)


def markov_baseline(stationary, omega_s, t, pair=None, base_value=1.0):
    """Constant-rate exponentials.

    With ``pair=None`` returns the population ``exp(-G t)``; otherwise the
    correlation for that pair with generator ``s (i w_S + eta i dw) - G/2``.
    """
    t = np.asarray(t, dtype=float)
    if pair is None:
        return np.exp(-stationary.rate * t)
    s, eta = _pair_signs(pair)
    return base_value * np.exp((s * 1j * (omega_s + eta * stationary.shift) - 0.5 * stationary.rate) * t)


def markov_spectrum(stationary, omega_s):
    """Power spectrum whose transform is the Markovian ``-+`` exponential: a full Lorentzian."""
    return full_lorentzian(omega_s + stationary.shift, stationary.rate)
