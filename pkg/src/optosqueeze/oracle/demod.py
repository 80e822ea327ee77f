"""Lock-in demodulation of the simulated output with a jackknife error."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import fft as sfft


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class DemodResult:
    variance: float
    error: float
    n_segments: int
    segment_means: np.ndarray

    def combine(self, *others: "DemodResult") -> "DemodResult":
        return DemodResult.from_segments(
            np.concatenate([self.segment_means] + [o.segment_means for o in others]))

    @staticmethod
    def from_segments(means) -> "DemodResult":
        means = np.asarray(means, dtype=float)
        n = means.size
        if n < 2:
            raise InsufficientDataError("need at least two segments for a jackknife error")
        total = means.sum()
        loo = (total - means) / (n - 1)
        err = math.sqrt((n - 1) / n * np.sum((loo - loo.mean()) ** 2))
        return DemodResult(float(total / n), err, n, means)


def lowpass(signal, dt: float, bandwidth: float) -> np.ndarray:
    """Brick-wall low-pass ``|omega| <= bandwidth`` via the FFT."""
    spec = sfft.rfft(signal)
    omega = 2 * math.pi * sfft.rfftfreq(len(signal), dt)
    spec[omega > bandwidth] = 0.0
    return sfft.irfft(spec, len(signal))


def demodulated_signal(t, signal, omega: float, phase_M: float, bandwidth: float) -> np.ndarray:
    """``lowpass(signal * cos(omega t + phase_M))`` on the sampling grid of ``t``."""
    t = np.asarray(t, dtype=float)
    mixed = np.asarray(signal, dtype=float) * np.cos(omega * t + phase_M)
    return lowpass(mixed, t[1] - t[0], bandwidth)


def demodulate(t, signal, omega: float, phase_M: float, bandwidth: float,
               segment_length: float, gamma: float | None = None) -> DemodResult:
    """Mean square of ``lowpass(signal * cos(omega t + phase_M))`` per segment.

    The demodulated process has zero mean, so the uncentered mean square is
    the variance.  Segments must be at least ``50 / gamma`` long when
    ``gamma`` is given.
    """
    t = np.asarray(t, dtype=float)
    dt = t[1] - t[0]
    if gamma is not None and segment_length < 50.0 / gamma * (1 - 1e-12):
        raise InsufficientDataError(
            f"segment length {segment_length:.6g} is below 50 / gamma = {50.0 / gamma:.6g}")
    per = int(round(segment_length / dt))
    n_seg = len(t) // per
    if n_seg < 1:
        raise InsufficientDataError(
            f"stationary record ({len(t) * dt:.6g}) shorter than one segment ({segment_length:.6g})")
    filtered = demodulated_signal(t, signal, omega, phase_M, bandwidth)
    squares = filtered[: n_seg * per].reshape(n_seg, per) ** 2
    means = squares.mean(axis=1)
    if n_seg == 1:
        return DemodResult(float(means[0]), float("nan"), 1, means)
    return DemodResult.from_segments(means)
