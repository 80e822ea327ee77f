"""Slow-amplitude spectra of the eigenmode quadratures under pump modulation.

With ``(b1, z) = sum_i v_i g_i e^{-i w_i t} + h.c.`` and slow ``g_i``, the
averaged equations read (spectral domain, ``y`` offset from ``w_j``)::

    (gamma_j - i y) g_j(y) + sum_i conj(eps_ji) g_i^+(y + w_i + w_j - 2p) = f_j(y)

where ``g^+(y)`` denotes the transform of the adjoint amplitude.  Shifting the
amplitudes to a common base frequency ``x`` gives a 4x4 linear system in
``(u1, v1, u2, v2) = (g_j(x + p - w_j), g_j^+(x + w_j - p))``, driven by the
noise at the two absolute frequencies ``x + p`` and ``x - p``.

Quadratures are ``G_j^(+/-)(x) = (g_j(x) +/- g_j^+(x)) / sqrt(2)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._forms import LinearForm
from .eigenmodes import ModeSet, epsilon_matrix
from .noise import check_bandwidth, default_bandwidth, input_coupling, input_psd
from .params import ModulationParams

SLOW_AMPLITUDE_RATIO = 0.1
SEPARATION_RATIO = 10.0
_RESONANT_TOL = 1e-9


class ThresholdError(ArithmeticError):
    """Modulation drives a quadrature through the parametric threshold."""


class SlowAmplitudeWarning(UserWarning):
    pass


class SeparationWarning(UserWarning):
    pass


@dataclass(frozen=True)
class QuadratureSpectrum:
    x: np.ndarray
    S_plus: np.ndarray
    S_minus: np.ndarray
    mode_index: int
    modulation: ModulationParams


def _bandwidths(modes: ModeSet, bandwidth):
    if bandwidth is None:
        return [default_bandwidth(modes, j) for j in range(2)]
    if np.ndim(bandwidth) == 0:
        bandwidth = [float(bandwidth)] * 2
    for j, b in enumerate(bandwidth):
        check_bandwidth(modes, j, b)
    return [float(b) for b in bandwidth]


def _check_slow(modes: ModeSet, eps: np.ndarray):
    for j, m in enumerate(modes.modes):
        ratio = max(m.gamma, np.max(np.abs(eps[j]))) / m.omega
        if ratio > SLOW_AMPLITUDE_RATIO:
            warnings.warn(f"mode {j + 1}: slow-amplitude ratio {ratio:.3g} exceeds "
                          f"{SLOW_AMPLITUDE_RATIO}", SlowAmplitudeWarning, stacklevel=3)


def resonant(modes: ModeSet, j: int, p: float) -> bool:
    return abs(modes[j].omega - p) <= _RESONANT_TOL * max(1.0, p)


def coupled_matrix(x, modes: ModeSet, mod: ModulationParams, eps=None) -> np.ndarray:
    """Left-hand side of the shifted-amplitude system; shape (N, 4, 4).

    Unknown order is ``(u1, v1, u2, v2)``.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = modes.pump_half_frequency(mod)
    eps = epsilon_matrix(modes, mod) if eps is None else eps
    mat = np.zeros((x.size, 4, 4), dtype=complex)
    for j, mj in enumerate(modes.modes):
        u, v = 2 * j, 2 * j + 1
        mat[:, u, u] = mj.gamma - 1j * x + 1j * (mj.omega - p)
        mat[:, v, v] = mj.gamma - 1j * x - 1j * (mj.omega - p)
        for i in range(2):
            mat[:, u, 2 * i + 1] = np.conj(eps[j, i])
            mat[:, v, 2 * i] = eps[j, i]
    return mat


def check_threshold(modes: ModeSet, mod: ModulationParams, eps=None, tol=1e-12) -> float:
    """Smallest decay rate of the slow dynamics; raises if it is negative."""
    h = coupled_matrix(0.0, modes, mod, eps)[0]
    rate = float(np.min(np.linalg.eigvals(h).real))
    if rate < -tol * max(modes.gammas):
        raise ThresholdError(
            f"modulation depth {mod.depth:.6g} is beyond the parametric threshold "
            f"(slowest rate {rate:.3g}); a quadrature is unstable"
        )
    return rate


def coupled_rhs(x, modes: ModeSet, mod: ModulationParams, bandwidth=None, frozen=False):
    """Forcing of ``(u1, v1, u2, v2)`` on ``n(x + p)`` and ``n(x - p)``.

    Returns ``(rhs, freq)`` with rhs shape (N, 4, 2, 3).  ``frozen`` evaluates
    the forcing at the line centre for every ``x`` (white-forcing limit).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dp = modes.params
    p = modes.pump_half_frequency(mod)
    bands = _bandwidths(modes, bandwidth)
    xe = np.zeros_like(x) if frozen else x
    c_plus = input_coupling(xe + p, dp)
    c_minus = input_coupling(xe - p, dp)
    rhs = np.zeros((x.size, 4, 2, 3), dtype=complex)
    for j, mj in enumerate(modes.modes):
        pi = mj.dual_vector
        if frozen:
            gate_u = np.full(x.size, abs(p - mj.omega) <= bands[j])
            gate_v = gate_u
        else:
            gate_u = np.abs(x + (p - mj.omega)) <= bands[j]
            gate_v = np.abs(x + (mj.omega - p)) <= bands[j]
        rhs[:, 2 * j, 0] = (1j / (2 * mj.omega)) * np.einsum("i,nic->nc", pi, c_plus) * gate_u[:, None]
        rhs[:, 2 * j + 1, 1] = ((-1j / (2 * mj.omega)) * np.einsum("i,nic->nc", pi.conj(), c_minus)
                                * gate_v[:, None])
    freq = np.stack([xe + p, xe - p], axis=1)
    return rhs, freq


def coupled_solve(x, modes: ModeSet, mod: ModulationParams, bandwidth=None, eps=None,
                  frozen=False):
    """Transfer from the noise slots to ``(u1, v1, u2, v2)``.

    Returns ``(transfer, freq)``; transfer has shape (N, 4, 2, 3).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    eps = epsilon_matrix(modes, mod) if eps is None else eps
    check_threshold(modes, mod, eps)
    mat = coupled_matrix(x, modes, mod, eps)
    cond = np.linalg.cond(mat)
    if not np.all(np.isfinite(cond)) or np.max(cond) > 1e13:
        raise ThresholdError("shifted-amplitude system is singular on the grid "
                             "(parametric threshold reached)")
    rhs, freq = coupled_rhs(x, modes, mod, bandwidth, frozen)
    sol = np.linalg.solve(mat, rhs.reshape(x.size, 4, 6)).reshape(x.size, 4, 2, 3)
    return sol, freq


def amplitude_forms(x, modes: ModeSet, mod: ModulationParams, j: int, bandwidth=None,
                    eps=None, frozen=False):
    """``(g_j(x), g_j^+(x))`` as linear forms of the input noise."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = modes.pump_half_frequency(mod)
    w = modes[j].omega
    if resonant(modes, j, p):
        sol, freq = coupled_solve(x, modes, mod, bandwidth, eps, frozen)
        return LinearForm(sol[:, 2 * j], freq), LinearForm(sol[:, 2 * j + 1], freq)
    sol_u, freq_u = coupled_solve(x + w - p, modes, mod, bandwidth, eps, frozen)
    sol_v, freq_v = coupled_solve(x + p - w, modes, mod, bandwidth, eps, frozen)
    return LinearForm(sol_u[:, 2 * j], freq_u), LinearForm(sol_v[:, 2 * j + 1], freq_v)


def _spectrum(thermal=None):
    return lambda freq: input_psd(freq, thermal)


def quadrature_psd(modes: ModeSet, mod: ModulationParams, x, bandwidth=None, thermal=None,
                   eps=None):
    """Spectra of ``G_j^(+/-)`` for both modes from the coupled system."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    eps = epsilon_matrix(modes, mod) if eps is None else eps
    _check_slow(modes, eps)
    out = []
    for j in range(2):
        g, g_adj = amplitude_forms(x, modes, mod, j, bandwidth, eps)
        s = 1 / math.sqrt(2)
        plus = ((g + g_adj) * s).psd(_spectrum(thermal))
        minus = ((g - g_adj) * s).psd(_spectrum(thermal))
        out.append(QuadratureSpectrum(x, np.maximum(plus, 0.0), np.maximum(minus, 0.0), j, mod))
    return out


def decoupled_psd(modes: ModeSet, mod: ModulationParams, x, j: int = 0, bandwidth=None,
                  thermal=None, include_minus=True) -> QuadratureSpectrum:
    """Closed-form quadrature spectra for well separated modes (``p = w_j``).

    ``S_+/- = S_f / ((gamma -/+ ... ) ...)``: the sum quadrature gets damping
    ``gamma + |eps_jj|``, the difference quadrature ``gamma - |eps_jj|``.
    """
    from .noise import modal_forcing_psd

    x = np.atleast_1d(np.asarray(x, dtype=float))
    ratio = modes.separation / max(modes.gammas)
    if ratio < SEPARATION_RATIO:
        warnings.warn(f"mode separation is only {ratio:.3g} linewidths; "
                      "the decoupled approximation is poor", SeparationWarning, stacklevel=2)
    eps = abs(epsilon_matrix(modes, mod)[j, j])
    gamma = modes[j].gamma
    band = _bandwidths(modes, bandwidth)[j]
    s_f = 0.5 * (modal_forcing_psd(modes, j, x, modes.params, band, thermal)
                 + modal_forcing_psd(modes, j, -x, modes.params, band, thermal))
    plus = s_f / ((gamma + eps) ** 2 + x * x)
    if include_minus:
        if eps >= gamma:
            raise ThresholdError(f"|eps| = {eps:.6g} >= gamma = {gamma:.6g}: "
                                 "difference quadrature is unstable")
        minus = s_f / ((gamma - eps) ** 2 + x * x)
    else:
        minus = np.full_like(plus, np.nan)
    return QuadratureSpectrum(x, plus, minus, j, mod)


def default_grid(modes: ModeSet, half_width=10.0, points=2001) -> np.ndarray:
    """``x`` in ``[-half_width * gamma_1, half_width * gamma_1]``."""
    return np.linspace(-half_width * modes[0].gamma, half_width * modes[0].gamma, points)


def line_variance(modes: ModeSet, mod: ModulationParams, j: int = 0, quadrature="+",
                  nodes=800, eps=None, decoupled=False) -> float:
    """``int S_G(x) dx / 2 pi`` over the whole line with line-centre (white) forcing.

    Uses ``x = gamma_j tan(theta)`` so the Lorentzian tails are integrated
    exactly to infinity; an even node count keeps ``x = 0`` off the grid so
    the marginal quadrature at threshold is never evaluated.  ``decoupled`` keeps only the self-coupling
    ``eps_jj``; the ratio to the unmodulated value is then exactly
    ``gamma_j / (gamma_j + |eps_jj|)``.  With the cross-mode couplings the
    squeezing axis turns slightly, so close to threshold the fixed ``G^(+)``
    quadrature picks up part of the diverging ``G^(-)`` noise.
    """
    p = modes.pump_half_frequency(mod)
    eps = epsilon_matrix(modes, mod) if eps is None else np.array(eps, dtype=complex)
    if decoupled:
        keep = np.zeros_like(eps)
        keep[j, j] = eps[j, j]
        eps = keep
    if not resonant(modes, j, p):
        raise ValueError("line variance is defined for the modulated (resonant) mode")
    theta, weights = np.polynomial.legendre.leggauss(nodes)
    theta = theta * (np.pi / 2)
    weights = weights * (np.pi / 2)
    scale = modes[j].gamma
    x = scale * np.tan(theta)
    jac = scale / np.cos(theta) ** 2
    # only large band matters here: the forcing is frozen at the line centre
    band = [0.5 * modes.separation * (1 - 1e-9)] * 2
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=UserWarning)
        g, g_adj = amplitude_forms(x, modes, mod, j, band, eps, frozen=True)
    sign = {"+": 1.0, "-": -1.0}[quadrature]
    s = ((g + g_adj * sign) * (1 / math.sqrt(2))).psd(_spectrum())
    return float(np.sum(s * jac * weights) / (2 * np.pi))
