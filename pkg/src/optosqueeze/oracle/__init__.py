"""Independent time-domain check of the frequency-domain spectra."""
from .crosscheck import OracleConfig, OracleReport, OracleRow, crosscheck
from .demod import DemodResult, InsufficientDataError, demodulate, demodulated_signal, lowpass
from .simulate import (
    BlowUpError,
    RingdownFit,
    SimulationConfig,
    SimulationRun,
    ringdown,
    simulate,
    simulate_many,
    synthesize_noise,
)

__all__ = [
    "OracleConfig", "OracleReport", "OracleRow", "crosscheck", "DemodResult",
    "InsufficientDataError", "demodulate", "demodulated_signal", "lowpass", "BlowUpError",
    "RingdownFit", "SimulationConfig", "SimulationRun", "ringdown", "simulate",
    "simulate_many", "synthesize_noise",
]
