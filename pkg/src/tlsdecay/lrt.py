"""Excited-state amplitude from a Drude-Lorentz emission line.

The amplitude is the normalised Fourier transform of the line,
``c1(t) = int S_D(w) exp(-i w t) dw / int S_D``. For the Drude-Lorentz shape
it splits into the resonant pole term ``exp(-(i w~ + G/2) t)`` and a real,
non-oscillating branch-cut integral that decays like ``t**-2``
(see :mod:`tlsdecay.contour`). ``c1_direct`` evaluates the Fourier integral
by brute force and serves as the check on the split.

Writing ``-dc1/dt / c1 = i w_lrt(t) + G_lrt(t)/2`` defines a time-dependent
frequency and population rate. The full oscillation is kept inside ``c1``,
so ``w_lrt`` is the total frequency and the reported shift is
``w_lrt - w_S``.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Optional
import warnings

import numpy as np

from .contour import DrudeLorentzContour
from .errors import AmplitudeRangeError, InvalidInputError
from .quadrature import RTOL
from .spectral import correlation_from_spectrum, drude_lorentz, total_weight

UNDERFLOW = 1e-300
# |P - B| below this fraction of |P| + |B| flags a near cancellation
CANCELLATION = 1e-6
DIRECT_PHASE_LIMIT = 1e5


class OscillatoryQuadratureWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LineShape:
    """Drude-Lorentz emission line centred at ``shifted_frequency`` with full width ``width``.

    ``normalization`` defaults to ``1 / c1_unnormalised(0)`` so that
    ``c1_lrt(0) == 1`` holds to rounding.
    """

    shifted_frequency: float
    width: float
    normalization: Optional[float] = None

    def __post_init__(self):
        if not (self.shifted_frequency > 0 and self.width > 0):
            raise InvalidInputError("line shape needs positive frequency and width", module="lrt")
        if self.normalization is None:
            object.__setattr__(self, "normalization", 1.0 / (1.0 - self._contour.branch_at_zero))
        elif not self.normalization > 0:
            raise InvalidInputError("normalization must be positive", module="lrt")

    @classmethod
    def from_stationary(cls, omega_s, stationary):
        return cls(omega_s + stationary.shift, stationary.rate)

    @cached_property
    def _contour(self):
        return DrudeLorentzContour(self.shifted_frequency, self.width)

    @property
    def spectrum(self):
        return drude_lorentz(self.shifted_frequency, self.width)


def _times(t):
    ts = np.asarray(t, dtype=float)
    if np.any(ts < 0) or not np.all(np.isfinite(ts)):
        raise InvalidInputError("t must be finite and non-negative", module="lrt")
    return ts


def _out(x):
    return x.item() if np.ndim(x) == 0 else x


def c1_pole(shape, t):
    """Resonant pole term; also the pole-approximation amplitude."""
    return _out(shape._contour.pole(_times(t)))


def c1_branchcut(shape, t):
    """Unnormalised branch-cut integral (real, positive, decreasing)."""
    return _out(shape._contour.branch(_times(t)))


def c1_lrt(shape, t):
    ts = _times(t)
    c = shape._contour
    # the normalisation makes c1(0) = 1 up to one rounding; pin it exactly
    return _out(np.where(ts == 0, 1.0 + 0j, shape.normalization * (c.pole(ts) - c.branch(ts))))


def c1_lrt_derivative(shape, t):
    """Analytic ``dc1/dt``; the branch cut is differentiated under the integral."""
    ts = _times(t)
    c = shape._contour
    moment2 = c.moments(ts, (2,))[0]
    return _out(shape.normalization * (-(1j * c.center + 0.5 * c.width) * c.pole(ts) + moment2))


def c1_direct(shape, t, rtol=RTOL):
    """Brute-force normalised Fourier transform of the line (independent check)."""
    ts = _times(t)
    if np.any(shape.shifted_frequency * ts > DIRECT_PHASE_LIMIT):
        warnings.warn(f"w~ t exceeds {DIRECT_PHASE_LIMIT:g}; oscillatory quadrature may lose "
                      "accuracy [module=lrt]", OscillatoryQuadratureWarning)
    spec = shape.spectrum
    return _out(np.asarray(correlation_from_spectrum(spec, ts, rtol)) / total_weight(spec, rtol))


class LRTShiftRate(NamedTuple):
    shift: np.ndarray       # w_lrt - w_S
    rate: np.ndarray        # population rate G_lrt
    frequency: np.ndarray   # w_lrt
    cancellation: np.ndarray  # True where pole and branch cut nearly cancel


def lrt_shift_rate(shape, t, omega_s):
    """Frequency and rate from the logarithmic derivative ``-dc1/dt / c1``."""
    ts = _times(t)
    c = shape._contour
    pole = c.pole(ts)
    m1, m2 = c.moments(ts, (1, 2))
    m1, m2 = m1.reshape(ts.shape), m2.reshape(ts.shape)
    den = pole - m1
    if np.any(shape.normalization * np.abs(den) < UNDERFLOW):
        bad = ts[shape.normalization * np.abs(den) < UNDERFLOW].ravel()[0]
        raise AmplitudeRangeError("|c1| underflows; rescale the units of time", module="lrt",
                                  t=float(bad))
    ratio = ((1j * c.center + 0.5 * c.width) * pole - m2) / den
    cancel = np.abs(den) < CANCELLATION * (np.abs(pole) + np.abs(m1))
    freq = ratio.imag
    return LRTShiftRate(_out(freq - omega_s), _out(2.0 * ratio.real), _out(freq), _out(cancel))
