import numpy as np
import pytest

from tlsdecay.assembly import transition_t1, transition_t2
from tlsdecay.cli import load_preset
from tlsdecay.config import resolve_system
from tlsdecay.lrt import LineShape
from tlsdecay.runner import run_scenario


class Preset:
    """The resolved Fig. 2-style preset: zero detuning, w~ = 100 Gamma = 10 gamma."""

    def __init__(self):
        self.config = load_preset("fig2")
        resolved = resolve_system(self.config)
        self.system = resolved.model
        self.stationary = resolved.stationary
        self.omega_s = self.system.omega_s
        self.line = LineShape.from_stationary(self.omega_s, self.stationary)
        self.t1 = transition_t1(self.stationary)
        self.t2 = transition_t2(self.omega_s, self.stationary)

    def log_grid(self, lo_factor=1e-3, hi_factor=10.0, n=400):
        """The standard log grid, [lo_factor * t1, hi_factor * t2]."""
        return np.geomspace(lo_factor * self.t1, hi_factor * self.t2, n)


@pytest.fixture(scope="session")
def preset():
    return Preset()


@pytest.fixture(scope="session")
def fig2_bundle():
    return run_scenario(load_preset("fig2"))


def loglog_slope(x, y):
    return np.polyfit(np.log(x), np.log(y), 1)[0]
