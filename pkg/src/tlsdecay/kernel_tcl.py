"""Memory kernel and second-order time-convolutionless shift and rate.

Conventions (hbar = 1). The memory kernel is

    k(tau) = g2 * int S_B(w) exp(-i (w - w_S) tau) dw

and its running integral ``K(t) = int_0^t k`` is the second-order generator
of the excited-state amplitude: ``c1(t) = exp(-i w_S t - int_0^t K)``.
Splitting ``K = i dw + Gamma/2`` gives a population rate ``Gamma = 2 Re K``
whose plateau is the golden-rule rate ``2 pi g2 S_B(w_S)``, and a shift
``dw = Im K`` whose plateau is ``-g2 PV int S_B(w) / (w - w_S) dw``.

Two evaluation routes exist for ``K``:

``contour``
    Drude-Lorentz environments only. The pole term is integrated in closed
    form; the branch-cut term reduces to one Laplace-type sum over a fixed
    node set, so whole time grids are evaluated in one kernel call.
``fourier``
    Any spectrum. ``K(t) = -i g2 int S (1 - exp(-i D t)) / D dw`` with
    ``D = w - w_S``; the removable 1/D is handled by subtracting ``S(w_S)``
    and integrating that piece with sine/cosine integrals.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple
import warnings

import numpy as np
from scipy import special

from .contour import DrudeLorentzContour
from .errors import InvalidInputError, NumericalFailure
from .quadrature import RTOL, checked_quad, fourier_integral
from .spectral import SpectralDensity, correlation_from_spectrum, eval_spectral_density, total_weight

SEPARATION_WARN = 0.5
PLATEAU_RTOL = 1e-6


class ShiftRatePair(NamedTuple):
    shift: float
    rate: float


class TimescaleWarning(UserWarning):
    pass


@dataclass(frozen=True)
class SystemEnvironmentModel:
    """Two-level system frequency, coupling ``g2 = |d|^2`` and environment spectrum."""

    omega_s: float
    coupling: float
    env: SpectralDensity

    def __post_init__(self):
        if not self.omega_s > 0:
            raise InvalidInputError("omega_s must be positive", module="kernel_tcl")
        if not self.coupling > 0:
            raise InvalidInputError("coupling must be positive", module="kernel_tcl")

    @property
    def gamma(self):
        """Environment correlation decay rate, taken as the spectral width."""
        return self.env.width

    @cached_property
    def _contour(self):
        if self.env.kind != "drude_lorentz":
            return None
        return DrudeLorentzContour(self.env.center, self.env.width)

    @cached_property
    def _tail_at_zero(self):
        return complex(self._contour.shifted_tail(0.0, self.omega_s))

    def separation(self):
        """Expansion parameter ``Gamma_stat / gamma`` (golden-rule estimate)."""
        return golden_rule_rate(self) / self.gamma


def _method(model, method):
    if method == "auto":
        return "contour" if model.env.kind == "drude_lorentz" else "fourier"
    if method == "contour" and model.env.kind != "drude_lorentz":
        raise InvalidInputError("contour route needs a Drude-Lorentz environment",
                                module="kernel_tcl")
    if method not in ("contour", "fourier"):
        raise InvalidInputError(f"unknown method {method!r}", module="kernel_tcl")
    return method


def memory_kernel(model, tau, method="auto", rtol=RTOL):
    """``k(tau)`` for ``tau >= 0``; scalar or array."""
    taus = np.asarray(tau, dtype=float)
    if np.any(taus < 0) or not np.all(np.isfinite(taus)):
        raise InvalidInputError("tau must be finite and non-negative", module="kernel_tcl")
    g2w = model.coupling * model.env.weight
    if _method(model, method) == "contour":
        c = model._contour
        out = g2w * (np.exp(-(1j * (c.center - model.omega_s) + 0.5 * c.width) * taus)
                     - np.exp(1j * model.omega_s * taus) * c.branch(taus))
    else:
        out = model.coupling * np.exp(1j * model.omega_s * taus) * np.asarray(
            correlation_from_spectrum(model.env, taus, rtol))
    return complex(out) if np.ndim(out) == 0 else out


def _cin(z):
    """``int_0^z (1 - cos u) / u du`` for ``z >= 0``."""
    z = float(z)
    if z < 0.5:
        # alternating series; the closed form cancels catastrophically here
        total, term, k = 0.0, 1.0, 1
        z2 = z * z
        while True:
            term *= z2 / ((2 * k - 1) * (2 * k))
            add = term / (2 * k)
            total += add if k % 2 else -add
            if add < 1e-18 * max(total, 1e-300):
                return total
            k += 1
    si, ci = special.sici(z)
    return np.euler_gamma + np.log(z) - ci


def _generator_fourier(model, t, rtol):
    if t == 0:
        return 0.0j
    env, ws, g2 = model.env, model.omega_s, model.coupling
    lo, hi = env.support
    pts = sorted(set(env.breakpoints) | {ws})
    a = lo if np.isfinite(lo) else min(pts[0], ws) - 40 * env.width
    b = hi if np.isfinite(hi) else max(pts[-1], ws) + 40 * env.width
    inside = a < ws < b
    s0 = eval_spectral_density(env, ws) if inside else 0.0
    inner = tuple(p for p in pts if a < p < b)
    scale = total_weight(env, rtol) * min(t, 1.0 / env.width)
    eps = rtol * max(scale, 1e-300)
    eta = 1e-7 * env.width

    def slope(w):
        return (eval_spectral_density(env, ws + eta) - eval_spectral_density(env, ws - eta)) / (2 * eta)

    def h(w):
        d = w - ws
        if abs(d) < 1e-9 * env.width:
            return slope(w)
        return (eval_spectral_density(env, w) - s0) / d

    def tail(w):
        return eval_spectral_density(env, w) / (w - ws)

    def piece(f, lo_, hi_, points):
        plain = sum(checked_quad(f, p, q, eps, rtol, "TCL generator")[0]
                    for p, q in zip([lo_, *points], [*points, hi_]))
        osc = fourier_integral(f, lo_, hi_, t, points, eps, rtol, "TCL generator")
        return -1j * (plain - np.exp(1j * ws * t) * osc)

    if inside:
        core = piece(h, a, b, tuple(p for p in inner if p != ws))
        x_hi, x_lo = (b - ws) * t, (ws - a) * t
        si_hi, si_lo = special.sici(x_hi)[0], special.sici(x_lo)[0]
        core += s0 * ((si_hi + si_lo) - 1j * (_cin(x_hi) - _cin(x_lo)))
    else:
        core = piece(tail, a, b, tuple(p for p in inner if p != ws))
    if np.isposinf(hi):
        core += piece(tail, b, np.inf, ())
    if np.isneginf(lo):
        core += piece(tail, -np.inf, a, ())
    return g2 * core


def _generator_contour(model, t):
    c = model._contour
    g2w = model.coupling * model.env.weight
    z = 1j * (c.center - model.omega_s) + 0.5 * c.width
    tail = c.shifted_tail(t, model.omega_s)
    out = g2w * (-np.expm1(-z * t) / z - model._tail_at_zero
                 + np.exp(1j * model.omega_s * t) * tail)
    return np.where(t == 0, 0.0j, out)


def tcl2_generator(model, t, order=2, method="auto", rtol=RTOL):
    """``K(t) = int_0^t k(tau) dtau``; scalar or array ``t >= 0``."""
    if order != 2:
        raise InvalidInputError(f"TCL order {order} is not implemented; only 2", module="kernel_tcl")
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0) or not np.all(np.isfinite(ts)):
        raise InvalidInputError("t must be finite and non-negative", module="kernel_tcl")
    if _method(model, method) == "contour":
        out = _generator_contour(model, ts)
    else:
        out = np.array([_generator_fourier(model, float(x), rtol) for x in ts.ravel()]).reshape(ts.shape)
    return complex(out) if out.ndim == 0 else out


def tcl2_shift_rate(model, t, method="auto", rtol=RTOL):
    """Shift ``Im K`` and population rate ``2 Re K``; arrays for array ``t``."""
    k = tcl2_generator(model, t, method=method, rtol=rtol)
    if np.ndim(k) == 0:
        return ShiftRatePair(float(np.imag(k)), float(2 * np.real(k)))
    return ShiftRatePair(np.imag(k), 2 * np.real(k))


def stationary_shift_rate(model, method="auto", rtol=RTOL, plateau_rtol=PLATEAU_RTOL):
    """Plateau of the TCL2 pair, found by doubling ``t`` from ``10/gamma``."""
    t = 10.0 / model.gamma
    prev = tcl2_generator(model, t, method=method, rtol=rtol)
    while t < 1e4 / model.gamma:
        t *= 2
        cur = tcl2_generator(model, t, method=method, rtol=rtol)
        if abs(cur - prev) < plateau_rtol * abs(cur):
            if model.separation() > SEPARATION_WARN:
                warnings.warn(
                    f"Gamma_stat/gamma = {model.separation():.3g} > {SEPARATION_WARN}: "
                    "second order is not justified [module=kernel_tcl]", TimescaleWarning)
            return ShiftRatePair(float(cur.imag), float(2 * cur.real))
        prev = cur
    raise NumericalFailure("TCL2 generator has no plateau before 1e4/gamma; "
                           "timescales are not separated", residual=abs(cur - prev) / abs(cur),
                           module="kernel_tcl", t=t)


def golden_rule_rate(model):
    return 2.0 * np.pi * model.coupling * eval_spectral_density(model.env, model.omega_s)


def principal_value_shift(model, rtol=RTOL):
    """``-g2 PV int S_B(w) / (w - w_S) dw`` by Cauchy-weighted quadrature."""
    env, ws = model.env, model.omega_s
    lo, hi = env.support
    pts = sorted(env.breakpoints)
    a = lo if np.isfinite(lo) else min(pts[0], ws) - 40 * env.width
    b = hi if np.isfinite(hi) else max(pts[-1], ws) + 40 * env.width
    f = lambda w: eval_spectral_density(env, w)
    # near zero detuning the integral nearly cancels, so a relative target alone is unreachable
    eps = rtol * total_weight(env, rtol) / env.width
    total = 0.0
    # Cauchy weight on a window around w_S, ordinary quadrature elsewhere
    half = 2 * env.width
    c_lo, c_hi = max(a, ws - half), min(b, ws + half)
    edges = sorted({a, b, c_lo, c_hi, *(p for p in pts if a < p < b and not c_lo <= p <= c_hi)})
    for p, q in zip(edges[:-1], edges[1:]):
        if p >= c_lo and q <= c_hi and c_lo < c_hi:
            total += checked_quad(f, p, q, eps, rtol, "principal value", weight="cauchy", wvar=ws)[0]
        else:
            total += checked_quad(lambda w: f(w) / (w - ws), p, q, eps, rtol, "principal value")[0]
    if np.isposinf(hi):
        total += checked_quad(lambda w: f(w) / (w - ws), b, np.inf, eps, rtol, "principal value")[0]
    if np.isneginf(lo):
        total += checked_quad(lambda w: f(w) / (w - ws), -np.inf, a, eps, rtol, "principal value")[0]
    return -model.coupling * total
