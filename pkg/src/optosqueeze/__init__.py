"""Squeezing of optomechanical eigenmodes by parametric pump modulation."""
from .eigenmodes import EigenMode, ModeSet, compute_modes, critical_modulation, epsilon_matrix
from .noise import DetectorPreset, builtin_presets, get_preset, xi_factor
from .params import (
    BASELINE_PARAMS,
    DimensionlessParams,
    ModulationParams,
    ParameterError,
    PhysicalParams,
    close_parameters,
    to_dimensionless,
)
from .readout import OutputSpectrum, output_psd
from .spectral import QuadratureSpectrum, ThresholdError, decoupled_psd, line_variance, quadrature_psd

__version__ = "0.1.0"

__all__ = [
    "BASELINE_PARAMS", "DimensionlessParams", "ModulationParams", "PhysicalParams",
    "ParameterError", "ThresholdError", "close_parameters", "to_dimensionless",
    "EigenMode", "ModeSet", "compute_modes", "critical_modulation", "epsilon_matrix",
    "DetectorPreset", "builtin_presets", "get_preset", "xi_factor",
    "QuadratureSpectrum", "quadrature_psd", "decoupled_psd", "line_variance",
    "OutputSpectrum", "output_psd",
]
