"""Quadrature building blocks.

* ``checked_quad`` / ``fourier_integral``: scipy QUADPACK wrappers that raise
  instead of warning when the requested tolerance is missed.
* ``laplace_rule``: a fixed composite Gauss-Legendre rule on [0, inf) with
  geometrically growing panels, for integrands of the form ``f(x) exp(-x t)``
  evaluated at many ``t`` at once.
* ``cumulative_integral``: batched adaptive Gauss-Legendre integration of a
  vectorised integrand between consecutive points of a time grid.
"""
from functools import lru_cache
import warnings

import numpy as np
from scipy import integrate

from .errors import NumericalFailure

RTOL = 1e-10
QUAD_LIMIT = 500


@lru_cache(maxsize=None)
def gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def checked_quad(f, a, b, epsabs=0.0, epsrel=RTOL, what="integral", **kwargs):
    """``scipy.integrate.quad`` that raises ``NumericalFailure`` on a missed tolerance."""
    kwargs.setdefault("limit", QUAD_LIMIT)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        res = integrate.quad(f, a, b, epsabs=epsabs, epsrel=epsrel,
                             full_output=1, **kwargs)
    value, abserr = res[0], res[1]
    target = max(epsabs, epsrel * abs(value))
    if len(res) > 3 and abserr > target:
        # QUADPACK flags roundoff even when the estimate is fine; only the
        # error estimate decides.
        raise NumericalFailure(f"{what} did not converge: {res[3].splitlines()[0]}",
                               residual=abserr)
    if not np.isfinite(value):
        raise NumericalFailure(f"{what} is not finite", residual=abserr)
    return value, abserr


def _split(a, b, points):
    edges = [a] + sorted(p for p in points if a < p < b) + [b]
    return list(zip(edges[:-1], edges[1:]))


def fourier_integral(f, a, b, t, points=(), epsabs=0.0, epsrel=RTOL, what="Fourier integral"):
    """Return ``int_a^b f(w) exp(-i w t) dw`` for real ``f``.

    ``b`` may be ``inf``; ``a`` may be ``-inf``. Oscillatory pieces go through
    QAWO (finite) or QAWF (semi-infinite).
    """
    if t < 0:
        return np.conj(fourier_integral(f, a, b, -t, points, epsabs, epsrel, what))
    pieces = []
    lo_inf, hi_inf = np.isneginf(a), np.isposinf(b)
    inner = sorted(p for p in points if a < p < b)
    if lo_inf:
        a_fin = inner[0] if inner else (0.0 if b > 0 else b - 1.0)
        pieces.append(("left", a_fin))
        a = a_fin
    if hi_inf:
        b_fin = inner[-1] if inner else max(a, 0.0) + 1.0
        pieces.append(("right", b_fin))
        b = b_fin
    n_parts = max(1, len(_split(a, b, inner)) + len(pieces))
    tol_abs = epsabs / n_parts
    total = 0.0 + 0.0j
    for lo, hi in _split(a, b, inner):
        if hi <= lo:
            continue
        if t == 0.0:
            re, _ = checked_quad(f, lo, hi, tol_abs, epsrel, what)
            total += re
            continue
        re, _ = checked_quad(f, lo, hi, tol_abs, epsrel, what, weight="cos", wvar=t)
        im, _ = checked_quad(f, lo, hi, tol_abs, epsrel, what, weight="sin", wvar=t)
        total += re - 1j * im
    for side, edge in pieces:
        if side == "right":
            g, base, sign = f, edge, 1.0
        else:
            # reflect w -> -w so the tail runs to +inf
            g, base, sign = (lambda w: f(-w)), -edge, -1.0
        if t == 0.0:
            re, _ = checked_quad(g, base, np.inf, tol_abs, epsrel, what)
            total += re
            continue
        # QAWF needs a finite epsabs
        eps = tol_abs if tol_abs > 0 else 1e-300
        re, _ = checked_quad(g, base, np.inf, eps, epsrel, what, weight="cos", wvar=t)
        im, _ = checked_quad(g, base, np.inf, eps, epsrel, what, weight="sin", wvar=t)
        total += re - 1j * sign * im
    return total


@lru_cache(maxsize=64)
def laplace_rule(scale, lo=1e-12, hi=1e7, ratio=2.0, order=20):
    """Nodes and weights for ``int_0^inf f(x) dx`` with geometric panels.

    Panels run from ``lo*scale`` to ``hi*scale`` with width ratio ``ratio``;
    ``[0, lo*scale]`` is one panel and ``[hi*scale, inf)`` is mapped onto
    ``(0, 1]`` through ``x = hi*scale/u``. Nodes come out sorted ascending.
    """
    x, w = gauss_legendre(order)
    start, stop = lo * scale, hi * scale
    n_pan = int(np.ceil(np.log(stop / start) / np.log(ratio)))
    edges = np.concatenate([[0.0], start * ratio ** np.arange(n_pan + 1)])
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    top = edges[-1]
    u = 0.5 * (x + 1.0)
    tail_nodes = top / u[::-1]
    tail_weights = (0.5 * w * top / u ** 2)[::-1]
    nodes = np.concatenate([nodes, tail_nodes])
    weights = np.concatenate([weights, tail_weights])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def cumulative_integral(f, grid, rtol=RTOL, atol=1e-14, order=10, max_depth=40,
                        what="cumulative integral"):
    """Return ``E[i] = int_{grid[0]}^{grid[i]} f(s) ds`` for a vectorised ``f``.

    Each grid interval is integrated with an ``order``-point Gauss rule and
    checked against the ``2*order`` rule; intervals whose difference exceeds
    ``max(atol, rtol * int |f|)`` are bisected. All pending sub-intervals are
    evaluated in a single call to ``f`` per sweep.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be one-dimensional and strictly increasing")
    xg1, wg1 = gauss_legendre(order)
    xg2, wg2 = gauss_legendre(2 * order)
    x_all = np.concatenate([xg1, xg2])
    n1 = order

    seg = np.zeros(grid.size - 1, dtype=complex)
    lo = grid[:-1].copy()
    hi = grid[1:].copy()
    owner = np.arange(grid.size - 1)
    depth = 0
    while lo.size:
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        pts = mid[:, None] + half[:, None] * x_all[None, :]
        vals = np.asarray(f(pts.ravel()), dtype=complex).reshape(pts.shape)
        if not np.all(np.isfinite(vals)):
            bad = pts[~np.isfinite(vals)][0]
            raise NumericalFailure(f"{what}: integrand not finite", t=float(bad))
        coarse = half * (vals[:, :n1] @ wg1)
        fine = half * (vals[:, n1:] @ wg2)
        scale = half * (np.abs(vals[:, n1:]) @ wg2)
        err = np.abs(fine - coarse)
        ok = err <= np.maximum(atol, rtol * scale)
        np.add.at(seg, owner[ok], fine[ok])
        if np.all(ok):
            break
        depth += 1
        if depth > max_depth:
            worst = np.argmax(np.where(ok, 0.0, err))
            raise NumericalFailure(f"{what}: subdivision limit reached",
                                   residual=float(err[worst]), t=float(mid[worst]))
        keep = ~ok
        lo_k, mid_k, hi_k, own_k = lo[keep], mid[keep], hi[keep], owner[keep]
        lo = np.concatenate([lo_k, mid_k])
        hi = np.concatenate([mid_k, hi_k])
        owner = np.concatenate([own_k, own_k])
    out = np.empty(grid.size, dtype=complex)
    out[0] = 0.0
    out[1:] = np.cumsum(seg)
    return out
