"""Spectral densities, the correlation-from-spectrum transform and the
linear-response compatibility test.

A power spectrum that can be written as the imaginary part of a causal
response function is odd in frequency. For a physical environment or system
at zero temperature only positive frequencies are populated, so the
equivalent one-sided statement is that ``S(w) = 0`` for ``w <= 0``; that is
what :func:`lrt_compatible` checks. A Lorentzian has weight on both sides of
zero and therefore fails it, which is why exponential (Markovian) decay of a
correlation function cannot come from a response function.
"""
import csv
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import DegenerateCalibrationError, InvalidInputError
from .quadrature import RTOL, checked_quad, fourier_integral

KINDS = ("drude_lorentz", "full_lorentzian", "tabulated")
LRT_LEAKAGE_TOL = 1e-9


@dataclass(frozen=True)
class SpectralDensity:
    """Non-negative frequency distribution.

    Parameters
    ----------
    kind : {'drude_lorentz', 'full_lorentzian', 'tabulated'}
    center : float
        Peak frequency (rad/time). Derived from the table for ``tabulated``.
    width : float
        Full width of the peak (rad/time). Derived from the table for
        ``tabulated``.
    weight : float
        Overall amplitude multiplying the line shape (or the table values).
    table : tuple of (frequency, value) pairs, optional
        Required for ``tabulated``; frequencies strictly increasing.
    interpolation : {'pchip', 'linear'}
        Interpolant for ``tabulated``. Both keep the values non-negative.
    """

    kind: str
    center: Optional[float] = None
    width: Optional[float] = None
    weight: float = 1.0
    table: Optional[tuple] = field(default=None, repr=False)
    interpolation: str = "pchip"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown spectrum kind {self.kind!r}", module="spectral")
        if not (np.isfinite(self.weight) and self.weight >= 0):
            raise InvalidInputError("weight must be finite and non-negative", module="spectral")
        if self.kind == "tabulated":
            if self.table is None or len(self.table) < 2:
                raise InvalidInputError("tabulated spectrum needs at least two rows",
                                        module="spectral")
            if self.interpolation not in ("pchip", "linear"):
                raise InvalidInputError(f"unknown interpolation {self.interpolation!r}",
                                        module="spectral")
            freq, val = self._columns
            if np.any(np.diff(freq) <= 0):
                raise InvalidInputError("tabulated frequencies must be strictly increasing",
                                        module="spectral")
            if np.any(val < 0) or not np.all(np.isfinite(val)):
                raise InvalidInputError("tabulated values must be finite and non-negative",
                                        module="spectral")
            if self.center is None:
                object.__setattr__(self, "center", float(freq[np.argmax(val)]))
            if self.width is None:
                object.__setattr__(self, "width", _table_fwhm(self))
        else:
            for name in ("center", "width"):
                v = getattr(self, name)
                if v is None or not np.isfinite(v):
                    raise InvalidInputError(f"{name} must be a finite number", module="spectral")
            if self.width <= 0:
                raise InvalidInputError("width must be positive", module="spectral")
            if self.kind == "drude_lorentz" and self.center <= 0:
                raise InvalidInputError("Drude-Lorentz center must be positive", module="spectral")

    @cached_property
    def _columns(self):
        arr = np.asarray(self.table, dtype=float)
        return arr[:, 0].copy(), arr[:, 1].copy()

    @cached_property
    def _interp(self):
        freq, val = self._columns
        if self.interpolation == "linear":
            return lambda w: np.interp(w, freq, val, left=0.0, right=0.0)
        return PchipInterpolator(freq, val, extrapolate=False)

    @property
    def support(self):
        if self.kind == "drude_lorentz":
            return 0.0, np.inf
        if self.kind == "full_lorentzian":
            return -np.inf, np.inf
        freq, _ = self._columns
        return float(freq[0]), float(freq[-1])

    @property
    def breakpoints(self):
        """Points where quadrature should split the integration range."""
        if self.kind == "tabulated":
            return tuple(self._columns[0][1:-1])
        c, w = self.center, self.width
        pts = (c - 40 * w, c - 2 * w, c, c + 2 * w, c + 40 * w)
        lo, hi = self.support
        return tuple(p for p in pts if lo < p < hi)

    def scaled(self, factor):
        return replace(self, weight=self.weight * factor)

    def __call__(self, omega):
        return eval_spectral_density(self, omega)


def _table_fwhm(model):
    freq, _ = model._columns
    w = np.linspace(freq[0], freq[-1], 8193)
    v = np.nan_to_num(model._interp(w))
    above = w[v >= 0.5 * v.max()]
    return float(max(above[-1] - above[0], w[1] - w[0]))


def drude_lorentz(center, width, weight=1.0):
    return SpectralDensity("drude_lorentz", center=center, width=width, weight=weight)


def full_lorentzian(center, width, weight=1.0):
    return SpectralDensity("full_lorentzian", center=center, width=width, weight=weight)


def tabulated(frequencies, values, weight=1.0, interpolation="pchip"):
    table = tuple((float(f), float(v)) for f, v in zip(frequencies, values))
    return SpectralDensity("tabulated", table=table, weight=weight, interpolation=interpolation)


def load_tabulated_csv(path, weight=1.0, interpolation="pchip"):
    """Read a two-column (frequency, value) CSV; a header row is optional."""
    rows = []
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except (ValueError, IndexError):
                if i == 0 and not rows:
                    continue  # header
                raise InvalidInputError(f"{path}: bad row {i + 1}: {row!r}", module="spectral")
    return tabulated(*zip(*rows), weight=weight, interpolation=interpolation)


def eval_spectral_density(model, omega):
    """Evaluate ``S(omega)``; accepts scalars or arrays."""
    w = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(w)):
        raise InvalidInputError("frequency must be finite", module="spectral")
    if model.kind == "drude_lorentz":
        c, g = model.center, model.width
        # (c^2 + g^2/4 - w^2)^2 + g^2 w^2 factorised to avoid cancellation near w = c
        den = ((w - c) ** 2 + 0.25 * g * g) * ((w + c) ** 2 + 0.25 * g * g)
        val = np.where(w > 0, (2.0 / np.pi) * g * c * w / den, 0.0)
    elif model.kind == "full_lorentzian":
        c, g = model.center, model.width
        val = (0.5 * g / np.pi) / ((w - c) ** 2 + 0.25 * g * g)
    else:
        val = np.nan_to_num(np.asarray(model._interp(w), dtype=float))
        val = np.maximum(val, 0.0)
    val = model.weight * val
    return float(val) if np.ndim(val) == 0 else val


def _scalar(model):
    return lambda w: eval_spectral_density(model, w)


def total_weight(model, rtol=RTOL):
    """Integral of ``S`` over its full support."""
    if model.weight == 0:
        return 0.0
    lo, hi = model.support
    f = _scalar(model)
    edges = [lo, *model.breakpoints, hi]
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, _ = checked_quad(f, a, b, epsabs=0.0, epsrel=rtol, what="spectral weight")
        total += val
    return total


def correlation_from_spectrum(model, tau, rtol=RTOL):
    """``C(tau) = int S(w) exp(-i w tau) dw``; scalar or array ``tau``."""
    taus = np.asarray(tau, dtype=float)
    if not np.all(np.isfinite(taus)):
        raise InvalidInputError("tau must be finite", module="spectral")
    lo, hi = model.support
    scale = total_weight(model, rtol)
    f = _scalar(model)
    out = np.array([
        fourier_integral(f, lo, hi, float(t), model.breakpoints,
                         epsabs=rtol * scale, epsrel=rtol, what="correlation_from_spectrum")
        for t in taus.ravel()
    ]).reshape(taus.shape)
    return complex(out) if out.ndim == 0 else out


class LRTVerdict(NamedTuple):
    compatible: bool
    leakage: float  # weight at w <= 0 over total weight


def lrt_compatible(model, tol=LRT_LEAKAGE_TOL):
    """Is ``model`` a one-sided (response-function compatible) spectrum?"""
    lo, hi = model.support
    total = total_weight(model)
    if total == 0:
        return LRTVerdict(True, 0.0)
    if lo >= 0:
        negative = 0.0
    else:
        f = _scalar(model)
        edges = [lo, *(p for p in model.breakpoints if p < 0), min(hi, 0.0)]
        negative = sum(
            checked_quad(f, a, b, epsabs=0.0, what="negative-frequency weight")[0]
            for a, b in zip(edges[:-1], edges[1:]))
    leakage = negative / total
    return LRTVerdict(bool(leakage < tol), float(leakage))


def calibrate_weight(model, coupling, omega_s, rate_target):
    """Rescale ``model`` so that ``2 pi coupling S(omega_s) = rate_target``."""
    unit = eval_spectral_density(replace(model, weight=1.0), omega_s)
    if unit <= 0 or coupling <= 0:
        raise DegenerateCalibrationError(
            f"spectrum vanishes at omega_s={omega_s}; cannot pin the rate", module="spectral")
    return replace(model, weight=rate_target / (2.0 * np.pi * coupling * unit))
