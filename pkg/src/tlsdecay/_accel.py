"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Set ``TLSDECAY_NUMBA=0`` in the environment to force the numpy path.
Both paths compute the same sums; the benchmark in ``benchmarks/`` times them.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is optional
    numba = None

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("TLSDECAY_NUMBA", "1").lower() not in (
    "0", "false", "no", "off")

# exp(-x) underflows to zero beyond this
_EXP_CUTOFF = 745.0
_CHUNK = 1 << 21


def _laplace_sum_numpy(t, nodes, coeffs):
    out = np.zeros(t.shape, dtype=np.complex128)
    step = max(1, _CHUNK // max(nodes.size, 1))
    for start in range(0, t.size, step):
        tt = t[start:start + step]
        expo = np.exp(-np.outer(tt, nodes))
        out[start:start + step] = expo @ coeffs
    return out


def _laplace_sum_loop(t, nodes, coeffs):
    out = np.zeros(t.shape[0], dtype=np.complex128)
    for j in range(t.shape[0]):
        tj = t[j]
        acc = 0.0 + 0.0j
        for k in range(nodes.shape[0]):
            x = nodes[k] * tj
            if x > _EXP_CUTOFF:
                break  # nodes ascend, the rest underflow
            acc += coeffs[k] * np.exp(-x)
        out[j] = acc
    return out


def _moment_sums_loop(t, nodes, coeffs):
    # out[m, j] = sum_k coeffs[m, k] * exp(-nodes[k] * t[j])
    n_rows = coeffs.shape[0]
    out = np.zeros((n_rows, t.shape[0]))
    for j in range(t.shape[0]):
        tj = t[j]
        for k in range(nodes.shape[0]):
            x = nodes[k] * tj
            if x > _EXP_CUTOFF:
                break
            e = np.exp(-x)
            for m in range(n_rows):
                out[m, j] += coeffs[m, k] * e
    return out


def _moment_sums_numpy(t, nodes, coeffs):
    out = np.empty((coeffs.shape[0], t.size))
    step = max(1, _CHUNK // max(nodes.size, 1))
    for start in range(0, t.size, step):
        tt = t[start:start + step]
        expo = np.exp(-np.outer(tt, nodes))
        out[:, start:start + step] = coeffs @ expo.T
    return out


if HAVE_NUMBA:
    _laplace_sum_jit = numba.njit(cache=True, nogil=True)(_laplace_sum_loop)
    _moment_sums_jit = numba.njit(cache=True, nogil=True)(_moment_sums_loop)
else:  # pragma: no cover
    _laplace_sum_jit = _moment_sums_jit = None


def laplace_sum(t, nodes, coeffs, use_numba=None):
    """Return ``sum_k coeffs[k] * exp(-nodes[k] * t)`` for each entry of ``t``.

    ``nodes`` must be non-negative and sorted ascending; ``t`` non-negative.
    """
    t = np.ascontiguousarray(t, dtype=np.float64).ravel()
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    if USE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA):
        return _laplace_sum_jit(t, nodes, coeffs)
    return _laplace_sum_numpy(t, nodes, coeffs)


def moment_sums(t, nodes, coeffs, use_numba=None):
    """Real Laplace sums ``sum_k coeffs[m, k] exp(-nodes[k] t)``, one row per ``m``."""
    t = np.ascontiguousarray(t, dtype=np.float64).ravel()
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    coeffs = np.ascontiguousarray(np.atleast_2d(coeffs), dtype=np.float64)
    if USE_NUMBA if use_numba is None else (use_numba and HAVE_NUMBA):
        return _moment_sums_jit(t, nodes, coeffs)
    return _moment_sums_numpy(t, nodes, coeffs)
