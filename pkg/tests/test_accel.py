import numpy as np
import pytest

from tlsdecay import _accel
from tlsdecay.contour import DrudeLorentzContour

needs_numba = pytest.mark.skipif(not _accel.HAVE_NUMBA, reason="numba not installed")


@pytest.fixture(scope="module")
def contour():
    return DrudeLorentzContour(100.0, 1.0)


@needs_numba
def test_paths_agree(contour):
    t = np.concatenate([[0.0], np.geomspace(1e-4, 1e4, 300)])
    rows = np.stack([contour.base * contour.nodes ** p for p in (1, 2)])
    a = _accel.moment_sums(t, contour.nodes, rows, use_numba=True)
    b = _accel.moment_sums(t, contour.nodes, rows, use_numba=False)
    np.testing.assert_allclose(a, b, rtol=1e-13, atol=1e-300)
    coeffs = contour._shifted_coeffs(99.0)
    np.testing.assert_allclose(_accel.laplace_sum(t, contour.nodes, coeffs, use_numba=True),
                               _accel.laplace_sum(t, contour.nodes, coeffs, use_numba=False),
                               rtol=1e-13, atol=1e-300)


def test_laplace_sum_exponential():
    # single node: c exp(-x t)
    t = np.array([0.0, 0.5, 2.0])
    got = _accel.laplace_sum(t, np.array([3.0]), np.array([2.0 + 1j]), use_numba=False)
    np.testing.assert_allclose(got, (2 + 1j) * np.exp(-3 * t))


def test_laplace_rule_integrates_exponential(contour):
    # int_0^inf x exp(-x t) dx = 1/t^2
    nodes = contour.nodes
    from tlsdecay.quadrature import laplace_rule
    _, weights = laplace_rule(contour.radius)
    for t in (1e-3, 0.1, 10.0):
        assert np.sum(weights * nodes * np.exp(-nodes * t)) == pytest.approx(1 / t ** 2, rel=1e-10)


def test_env_flag(monkeypatch):
    import importlib
    monkeypatch.setenv("TLSDECAY_NUMBA", "0")
    mod = importlib.reload(_accel)
    try:
        assert mod.USE_NUMBA is False
    finally:
        monkeypatch.delenv("TLSDECAY_NUMBA")
        importlib.reload(_accel)
