"""Time-dependent shifts, rates and correlations of a decaying two-level system.

Second-order time-convolutionless rates cover the transient regime, the
linear-response amplitude of a Drude-Lorentz emission line covers the
algebraic tail, and their product interpolates across all timescales.
"""
__version__ = "0.1.0"

from .assembly import (RegimeReport, classify_regime, product_shift_rate, transition_t1,
                       transition_t2)
from .dynamics import (AmplitudeSeries, CorrelationSeries, RateModel, correlation_sigma,
                       dipole_correlation_ground, integrate_amplitude, markov_baseline, population)
from .errors import (AmplitudeRangeError, ConfigValidationError, DegenerateCalibrationError,
                     DegenerateShiftError, InvalidInputError, NumericalFailure, RootNotFoundError,
                     TLSDecayError)
from .kernel_tcl import (ShiftRatePair, SystemEnvironmentModel, golden_rule_rate, memory_kernel,
                         stationary_shift_rate, tcl2_generator, tcl2_shift_rate)
from .lrt import LineShape, c1_branchcut, c1_direct, c1_lrt, c1_pole, lrt_shift_rate
from .spectral import (SpectralDensity, calibrate_weight, correlation_from_spectrum, drude_lorentz,
                       eval_spectral_density, full_lorentzian, lrt_compatible, tabulated,
                       total_weight)

__all__ = [name for name in dir() if not name.startswith("_")]
