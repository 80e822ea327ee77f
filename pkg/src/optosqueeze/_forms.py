"""Linear functionals of the input noise.

A quantity ``Q(x)`` that is linear in the inputs is stored as coefficients on
``n(X_s)`` for a few absolute frequencies ``X_s`` ("slots").  Inputs at
distinct frequencies are uncorrelated, so spectra follow from a sum of
quadratic forms and cross-correlations are exact by construction.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SAME_FREQ_TOL = 1e-9


@dataclass(frozen=True)
class LinearForm:
    coef: np.ndarray  # (N, S, channels)
    freq: np.ndarray  # (N, S)

    def __post_init__(self):
        if self.coef.shape[:2] != self.freq.shape:
            raise ValueError("coefficient / frequency shape mismatch")

    def __mul__(self, scalar):
        return LinearForm(self.coef * scalar, self.freq)

    __rmul__ = __mul__

    def __add__(self, other: "LinearForm") -> "LinearForm":
        if self.freq.shape == other.freq.shape and np.allclose(
                self.freq, other.freq, rtol=0, atol=_SAME_FREQ_TOL):
            return LinearForm(self.coef + other.coef, self.freq)
        # different slot sets must be disjoint, otherwise correlations would be lost
        gap = np.abs(self.freq[:, :, None] - other.freq[:, None, :])
        if np.any(gap < _SAME_FREQ_TOL):
            raise ValueError("forms share some but not all frequency slots")
        return LinearForm(np.concatenate([self.coef, other.coef], axis=1),
                          np.concatenate([self.freq, other.freq], axis=1))

    def __sub__(self, other):
        return self + other * -1.0

    def psd(self, spectrum) -> np.ndarray:
        """``sum_s sum_c |coef|^2 S_c(X_s)`` with ``spectrum(freq) -> (N, S, channels)``."""
        s = spectrum(self.freq)
        return np.einsum("nsc,nsc->n", np.abs(self.coef) ** 2, s)
