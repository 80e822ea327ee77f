"""Output light: the reflected phase quadrature and its demodulated sidebands.

``a2_out = -a2_in - 2 kappa b1``.  Demodulating at ``omega_j`` with phase
``phi_M`` gives ``A_j = (e^{i phi_M} a2_out(x + omega_j) + e^{-i phi_M} a2_out(x - omega_j)) / sqrt(2)``;
``phi_M = 0`` is ``A_j^(+)`` and ``phi_M = pi/2`` has the PSD of ``A_j^(-)``.
The shot-noise level of ``A_j`` is 1/2; exported spectra are divided by it.

Two chains map the input noise onto ``a2_out``:

* ``"modal"``: slow amplitudes of the two eigenmodes (``spectral``), with
  ``b1 = sum_i V_i (g_i e^{-i w_i t} + h.c.)`` and each mode band-limited to
  ``|offset| <= B_i``.
* ``"exact"``: harmonic balance of the full periodically pumped equations.
  Sidebands ``X_k = X + 2 k p`` obey
  ``M(X_k) q_k + A |m| J (e^{i phi} q_{k+1} + e^{-i phi} q_{k-1}) = C(X_k) n_k``
  with ``J = [[0, 1], [-1, 0]]``, truncated at ``|k| <= harmonics``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._forms import LinearForm
from .eigenmodes import ModeSet, epsilon_matrix
from .noise import VACUUM_PSD, input_coupling, input_psd
from .params import DimensionlessParams, ModulationParams, system_matrix
from .spectral import _bandwidths, check_threshold, coupled_solve

SHOT_NOISE = VACUUM_PSD  # PSD of A_j for vacuum input
DEFAULT_HARMONICS = 4
_COINCIDE_TOL = 1e-9


class BandOverlapError(ValueError):
    """Requested offsets make the demodulated sidebands overlap."""


@dataclass(frozen=True)
class OutputSpectrum:
    x: np.ndarray
    S_A_plus: np.ndarray
    S_A_minus: np.ndarray
    mode_index: int
    V: float
    S_unmod: np.ndarray
    method: str = "modal"


def output_quadrature_transfer(x, dp: DimensionlessParams) -> np.ndarray:
    """Row mapping ``n(x) = (a1, a2, z_th)`` onto ``a2_out(x)`` without modulation.

    Includes the direct reflection of ``a2_in`` and its path through ``b1``.
    """
    x = np.asarray(x, dtype=float)
    transfer = np.linalg.solve(system_matrix(x, dp), input_coupling(x, dp))
    row = -2.0 * dp.kappa * transfer[..., 0, :]
    row[..., 1] -= 1.0
    return row


def check_offsets(x, modes: ModeSet, j: int) -> None:
    limit = 0.5 * min(modes[j].omega, modes.separation)
    if np.any(np.abs(x) >= limit):
        raise BandOverlapError(
            f"|x| must stay below {limit:.6g} (half of min(omega_j, |omega_2 - omega_1|)) "
            "for the demodulated sidebands to be distinct"
        )


def demod_combination(upper: LinearForm, lower: LinearForm, phase_M: float = 0.0) -> LinearForm:
    """``(e^{i phi_M} a(x + w) + e^{-i phi_M} a(x - w)) / sqrt(2)``."""
    return (upper * np.exp(1j * phase_M) + lower * np.exp(-1j * phase_M)) * (1 / math.sqrt(2))


# ---------------------------------------------------------------------------
# modal chain


def _modal_side(base, modes, mod, sign, bands, eps, modes_used):
    """``a2_out`` at ``base + sign * p`` from the shifted-amplitude solution at ``base``."""
    sol, freq = coupled_solve(base, modes, mod, bands, eps)
    kappa = modes.params.kappa
    slot = 0 if sign > 0 else 1
    coef = np.zeros_like(sol[:, 0])
    coef[:, slot, 1] = -1.0
    for i in modes_used:
        idx = 2 * i if sign > 0 else 2 * i + 1
        coef -= 2.0 * kappa * modes[i].optical_weight * sol[:, idx]
    return LinearForm(coef, freq)


def modal_output_forms(x, modes: ModeSet, mod: ModulationParams, j: int = 0, bandwidth=None,
                       include_cross_modes=True, corrupt_epsilon=False):
    """``(a2_out(x + w_j), a2_out(x - w_j))`` as linear forms, slow-amplitude chain.

    ``corrupt_epsilon`` flips the sign of the modulation coupling (negative
    control for the Monte Carlo oracle).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    p = modes.pump_half_frequency(mod)
    w = modes[j].omega
    bands = _bandwidths(modes, bandwidth)
    eps = epsilon_matrix(modes, mod)
    if corrupt_epsilon:
        eps = -eps
    used = range(len(modes)) if include_cross_modes else [j]
    upper = _modal_side(x + w - p, modes, mod, +1, bands, eps, used)
    lower = _modal_side(x - w + p, modes, mod, -1, bands, eps, used)
    return upper, lower


# ---------------------------------------------------------------------------
# exact harmonic-balance chain


def _ladder(x0, dp: DimensionlessParams, mod: ModulationParams, p: float, kmin: int, kmax: int):
    """Solve the sideband ladder at ``X_k = x0 + 2 k p``, ``k = kmin..kmax``.

    Returns ``(b1_rows, freq)``: ``b1(X_k)`` as coefficients on ``n(X_l)``,
    shapes (N, K, K, 3) and (N, K).
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    ks = np.arange(kmin, kmax + 1)
    nk, n = ks.size, x0.size
    freq = x0[:, None] + 2.0 * p * ks[None, :]
    big = np.zeros((n, 2 * nk, 2 * nk), dtype=complex)
    rhs = np.zeros((n, 2 * nk, nk, 3), dtype=complex)
    m_diag = system_matrix(freq, dp)
    c = input_coupling(freq, dp)
    coupling = dp.A * mod.depth * np.array([[0.0, 1.0], [-1.0, 0.0]])
    up = coupling * np.exp(1j * mod.phase)
    down = coupling * np.exp(-1j * mod.phase)
    for a in range(nk):
        sl = slice(2 * a, 2 * a + 2)
        big[:, sl, sl] = m_diag[:, a]
        if a + 1 < nk:
            big[:, sl, 2 * a + 2:2 * a + 4] = up
        if a > 0:
            big[:, sl, 2 * a - 2:2 * a] = down
        rhs[:, sl, a, :] = c[:, a]
    sol = np.linalg.solve(big, rhs.reshape(n, 2 * nk, 3 * nk)).reshape(n, 2 * nk, nk, 3)
    return sol[:, 0::2], freq


def _exact_side(b1_row, freq, row_index, kappa):
    coef = -2.0 * kappa * b1_row[:, row_index]
    coef[:, row_index, 1] -= 1.0
    return LinearForm(coef, freq)


def exact_output_forms(x, modes: ModeSet, mod: ModulationParams, j: int = 0,
                       harmonics: int = DEFAULT_HARMONICS, corrupt_epsilon=False):
    """``(a2_out(x + w_j), a2_out(x - w_j))`` from the full pumped equations.

    ``corrupt_epsilon`` shifts the pump phase by pi, which flips the sign of
    every modulation coupling.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if harmonics < 1:
        raise ValueError("harmonics must be >= 1")
    dp = modes.params
    p = modes.pump_half_frequency(mod)
    w = modes[j].omega
    if corrupt_epsilon:
        mod = ModulationParams(mod.depth, mod.phase + math.pi, mod.pump_half_frequency)
    if abs(w - p) <= _COINCIDE_TOL * max(1.0, p):
        # x - w = (x + w) - 2p: both sidebands sit on one ladder
        rows, freq = _ladder(x + w, dp, mod, p, -harmonics - 1, harmonics)
        k0 = harmonics + 1
        return (_exact_side(rows, freq, k0, dp.kappa), _exact_side(rows, freq, k0 - 1, dp.kappa))
    rows_u, freq_u = _ladder(x + w, dp, mod, p, -harmonics, harmonics)
    rows_l, freq_l = _ladder(x - w, dp, mod, p, -harmonics, harmonics)
    return (_exact_side(rows_u, freq_u, harmonics, dp.kappa),
            _exact_side(rows_l, freq_l, harmonics, dp.kappa))


# ---------------------------------------------------------------------------


def output_forms(x, modes: ModeSet, mod: ModulationParams, j: int = 0, method="modal",
                 bandwidth=None, corrupt_epsilon=False, harmonics=DEFAULT_HARMONICS):
    if method == "modal":
        return modal_output_forms(x, modes, mod, j, bandwidth, corrupt_epsilon=corrupt_epsilon)
    if method == "exact":
        return exact_output_forms(x, modes, mod, j, harmonics, corrupt_epsilon)
    raise ValueError(f"unknown method {method!r}; use 'modal' or 'exact'")


def demodulated_psd(x, modes: ModeSet, mod: ModulationParams, j: int = 0, phase_M=0.0,
                    method="modal", bandwidth=None, thermal=None, cutoff=None,
                    corrupt_epsilon=False, harmonics=DEFAULT_HARMONICS) -> np.ndarray:
    """Shot-noise-normalized PSD of the demodulated quadrature at detection phase ``phase_M``."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    check_offsets(x, modes, j)
    upper, lower = output_forms(x, modes, mod, j, method, bandwidth, corrupt_epsilon, harmonics)
    form = demod_combination(upper, lower, phase_M)
    return form.psd(lambda f: input_psd(f, thermal, cutoff)) / SHOT_NOISE


def output_psd(modes: ModeSet, mod: ModulationParams, x, j: int = 0, method="modal",
               bandwidth=None, thermal=None, cutoff=None,
               harmonics=DEFAULT_HARMONICS) -> OutputSpectrum:
    """Normalized ``A_j^(+)``, ``A_j^(-)`` spectra and the unmodulated reference."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    check_threshold(modes, mod)
    kw = dict(method=method, bandwidth=bandwidth, thermal=thermal, cutoff=cutoff,
              harmonics=harmonics)
    plus = demodulated_psd(x, modes, mod, j, 0.0, **kw)
    minus = demodulated_psd(x, modes, mod, j, math.pi / 2, **kw)
    bare = ModulationParams(0.0, mod.phase, mod.pump_half_frequency)
    unmod = demodulated_psd(x, modes, bare, j, 0.0, **kw)
    return OutputSpectrum(x, plus, minus, j, modes[j].optical_weight, unmod, method)


def band_variance(modes: ModeSet, mod: ModulationParams, j: int = 0, phase_M=0.0,
                  bandwidth=None, method="exact", cutoff=None, points=4001,
                  corrupt_epsilon=False, harmonics=DEFAULT_HARMONICS) -> float:
    """Variance of the demodulated quadrature low-passed to ``|x| <= B``.

    ``int_{-B}^{B} S_A(x) dx / (2 pi)`` in absolute units (not normalized),
    which is what a brick-wall demodulator measures.
    """
    band = _bandwidths(modes, bandwidth)[j]
    x = np.linspace(-band, band, points)
    s = demodulated_psd(x, modes, mod, j, phase_M, method, None if method == "exact" else bandwidth,
                        None, cutoff, corrupt_epsilon, harmonics) * SHOT_NOISE
    # demodulation by cos (not sqrt(2) cos) halves the amplitude
    return float(np.trapezoid(s, x) / (2 * np.pi) / 2.0)
