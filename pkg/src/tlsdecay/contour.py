"""Contour decomposition of one-sided Drude-Lorentz Fourier integrals.

For ``S(w) = (2/pi) c g w / ((c^2 + g^2/4 - w^2)^2 + g^2 w^2)`` on ``w > 0``
and ``t >= 0``::

    int_0^inf S(w) exp(-i w t) dw = exp(-(i c + g/2) t) - B(t)

    B(t) = (2/pi) c g int_0^inf x exp(-x t) / D(x) dx
    D(x) = (c^2 + g^2/4 + x^2)^2 - g^2 x^2
         = ((x - g/2)^2 + c^2) ((x + g/2)^2 + c^2)  > 0

The first term is the residue of the pole at ``c - i g/2``; the second runs
along the negative imaginary frequency axis. All ``x`` integrals use one
fixed composite rule, so batches of times cost one kernel call.
"""
from functools import cached_property

import numpy as np

from . import _accel
from .quadrature import laplace_rule


class DrudeLorentzContour:
    """Branch-cut integrals for a unit-weight Drude-Lorentz peak."""

    def __init__(self, center, width):
        if center <= 0 or width <= 0:
            raise ValueError("center and width must be positive")
        self.center = float(center)
        self.width = float(width)
        self.radius = float(np.hypot(center, 0.5 * width))
        nodes, weights = laplace_rule(self.radius)
        den = ((nodes - 0.5 * width) ** 2 + center ** 2) * ((nodes + 0.5 * width) ** 2 + center ** 2)
        if not np.all(den > 0):
            raise ArithmeticError("branch-cut denominator is not positive")
        self.nodes = nodes
        # (2/pi) c g * w_k / D(x_k): the x-independent part of every integrand
        self.base = (2.0 / np.pi) * center * width * weights / den

    def pole(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(-(1j * self.center + 0.5 * self.width) * t)

    def moments(self, t, powers=(1,)):
        """``(2/pi) c g int x^p exp(-x t) / D dx`` for each power, shape (len(powers), len(t))."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        rows = np.stack([self.base * self.nodes ** p for p in powers])
        out = _accel.moment_sums(t.ravel(), self.nodes, rows)
        return out.reshape((len(powers),) + t.shape)

    def branch(self, t):
        t = np.asarray(t, dtype=float)
        return self.moments(t, (1,))[0].reshape(t.shape)

    @cached_property
    def branch_at_zero(self):
        # analytically (2/pi) arctan(g / 2c); the quadrature value keeps c1(0) = 1 exact
        return float(self.branch(0.0))

    def _shifted_coeffs(self, omega):
        return self.base * self.nodes / (self.nodes - 1j * omega)

    def shifted_tail(self, t, omega):
        """``(2/pi) c g int x exp(-x t) / (D (x - i omega)) dx``."""
        t = np.asarray(t, dtype=float)
        out = _accel.laplace_sum(t.ravel(), self.nodes, self._shifted_coeffs(omega))
        return out.reshape(t.shape)
