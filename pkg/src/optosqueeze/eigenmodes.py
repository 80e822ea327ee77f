"""Optomechanical eigenmodes of the cavity-mirror system.

A free solution ``exp(-i s t) v`` requires ``M(s) v = 0``; the four roots of
``det M`` come in pairs ``{s, -conj(s)}`` and the two with ``Re s > 0`` are the
retained modes, ``s = omega - i*gamma``.

The mode vectors are not orthogonal (``M`` is not self-adjoint), so a dual
basis ``Pi_j`` with the *unconjugated* pairing ``Pi_j @ v_i = delta_ji`` is
used for projections.  The modulation coefficients use the conjugated
pairing ``vdot(Pi_j, w_i)``; both pairings are kept exactly as defined.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .params import DimensionlessParams, ModulationParams, characteristic_coefficients, system_matrix

ROOT_DEGENERACY_TOL = 1e-6
DUAL_CONDITION_LIMIT = 1e8


class DegenerateRootsWarning(UserWarning):
    """Two characteristic roots (nearly) coincide: double-resonance regime."""


class ModeNormalizationWarning(UserWarning):
    """Mode vector has no optical component; normalized on the mechanical one."""


class NotARootError(ValueError):
    pass


class NearCollinearError(ValueError):
    """Mode vectors are (nearly) parallel; the dual basis does not exist."""


class ModeError(ValueError):
    pass


def companion_matrix(coeffs) -> np.ndarray:
    """Frobenius companion matrix of a monic-normalized polynomial."""
    coeffs = np.asarray(coeffs, dtype=complex)
    coeffs = coeffs / coeffs[0]
    n = len(coeffs) - 1
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -coeffs[1:]
    comp[1:, :-1] = np.eye(n - 1)
    return comp


def characteristic_roots(dp: DimensionlessParams) -> np.ndarray:
    """All four roots of ``det M(x) = 0``, ordered by (Re s, -Im s)."""
    coeffs = characteristic_coefficients(dp)
    roots = np.linalg.eigvals(companion_matrix(coeffs))
    dcoeffs = np.polyder(coeffs)
    # two Newton polishing steps; eigvals is already close
    for _ in range(2):
        d = np.polyval(dcoeffs, roots)
        step = np.where(np.abs(d) > 0, np.polyval(coeffs, roots) / np.where(d == 0, 1, d), 0)
        roots = roots - step
    order = np.lexsort((-roots.imag, roots.real))
    roots = roots[order]
    for i in range(4):
        for k in range(i + 1, 4):
            if abs(roots[i] - roots[k]) < ROOT_DEGENERACY_TOL:
                warnings.warn(
                    f"characteristic roots {roots[i]:.6g} and {roots[k]:.6g} coincide "
                    "(double resonance)",
                    DegenerateRootsWarning,
                    stacklevel=2,
                )
    return roots


def mode_vector(s: complex, dp: DimensionlessParams) -> np.ndarray:
    """Unit null vector of ``M(s)``, first component real and non-negative."""
    m = system_matrix(complex(s), dp)
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if abs(det) > 1e-8:
        raise NotARootError(f"|det M(s)| = {abs(det):.3e} at s = {s}")
    _, _, vh = np.linalg.svd(m)
    v = vh[-1].conj()
    v = v / np.linalg.norm(v)
    if abs(v[0]) >= 1e-12:
        v = v * np.exp(-1j * np.angle(v[0]))
        v[0] = v[0].real
    else:
        warnings.warn("mode vector has no optical component; normalizing on z",
                      ModeNormalizationWarning, stacklevel=2)
        v = v * np.exp(-1j * np.angle(v[1]))
        v[1] = v[1].real
    return v


def dual_basis(v1, v2):
    """Rows of ``inv([v1 v2])``: ``Pi_j @ v_i = delta_ji`` (no conjugation)."""
    basis = np.column_stack([np.asarray(v1, complex), np.asarray(v2, complex)])
    cond = np.linalg.cond(basis)
    if not np.isfinite(cond) or cond > DUAL_CONDITION_LIMIT:
        raise NearCollinearError(
            f"mode vectors nearly collinear (condition number {cond:.3e}); "
            "double resonance, no dual basis"
        )
    inv = np.linalg.inv(basis)
    return inv[0], inv[1]


def coupling_w(v, dp: DimensionlessParams) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    return np.array([dp.A * v[1], -dp.A * v[0]])


@dataclass(frozen=True)
class EigenMode:
    root: complex
    mode_vector: np.ndarray
    dual_vector: np.ndarray
    coupling_vector: np.ndarray

    @property
    def omega(self) -> float:
        return float(self.root.real)

    @property
    def gamma(self) -> float:
        return float(-self.root.imag)

    @property
    def quality(self) -> float:
        return self.omega / (2.0 * self.gamma)

    @property
    def optical_weight(self) -> float:
        """``V_j``: the (real) b1 component of the mode vector."""
        return float(self.mode_vector[0].real)

    @property
    def modulation_overlap(self) -> complex:
        """``vdot(Pi_j, w_j)``, the self-coupling entering ``epsilon_jj``."""
        return complex(np.vdot(self.dual_vector, self.coupling_vector))


@dataclass(frozen=True)
class ModeSet:
    params: DimensionlessParams
    modes: tuple
    roots: np.ndarray
    stable: bool

    def __getitem__(self, j) -> EigenMode:
        return self.modes[j]

    def __len__(self):
        return len(self.modes)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([m.omega for m in self.modes])

    @property
    def gammas(self) -> np.ndarray:
        return np.array([m.gamma for m in self.modes])

    @property
    def separation(self) -> float:
        return abs(self.modes[1].omega - self.modes[0].omega)

    def epsilon(self, mod: ModulationParams) -> np.ndarray:
        return epsilon_matrix(self, mod)

    def critical_modulation(self) -> np.ndarray:
        return critical_modulation(self)

    def squeezing_phase(self, j: int = 0) -> float:
        """Modulation phase making ``epsilon_jj`` real and positive."""
        return float(np.mod(-np.angle(-1j * self.modes[j].modulation_overlap), 2 * np.pi))

    def pump_half_frequency(self, mod: ModulationParams) -> float:
        if mod.pump_half_frequency is None:
            return self.modes[0].omega
        return float(mod.pump_half_frequency)


def compute_modes(dp: DimensionlessParams) -> ModeSet:
    roots = characteristic_roots(dp)
    positive = [s for s in roots if s.real > 0]
    if len(positive) != 2:
        raise ModeError(f"expected two positive-frequency roots, got {len(positive)}: {roots}")
    vectors = [mode_vector(s, dp) for s in positive]
    duals = dual_basis(*vectors)
    modes = tuple(
        EigenMode(complex(s), v, pi, coupling_w(v, dp))
        for s, v, pi in zip(positive, vectors, duals)
    )
    stable = bool(np.all(roots.imag <= 0))
    return ModeSet(dp, modes, roots, stable)


def epsilon_matrix(modes: ModeSet, mod: ModulationParams) -> np.ndarray:
    """``eps[j, i] = -i |m| vdot(Pi_j, w_i) exp(i phase) / (2 omega_j)``."""
    eps = np.empty((2, 2), dtype=complex)
    for j, mj in enumerate(modes.modes):
        if mj.omega == 0:
            raise ModeError("zero eigenfrequency")
        for i, mi in enumerate(modes.modes):
            overlap = np.vdot(mj.dual_vector, mi.coupling_vector)
            eps[j, i] = -1j * mod.depth * overlap * np.exp(1j * mod.phase) / (2.0 * mj.omega)
    return eps


def critical_modulation(modes: ModeSet) -> np.ndarray:
    """Depth where ``|eps_jj| = gamma_j``: ``m_c = 2 omega_j gamma_j / |vdot(Pi_j, w_j)|``."""
    out = np.empty(len(modes))
    for j, m in enumerate(modes.modes):
        overlap = abs(m.modulation_overlap)
        if overlap < 1e-300 or not math.isfinite(overlap):
            raise ModeError(f"mode {j + 1}: modulation does not couple to the mode")
        out[j] = 2.0 * m.omega * m.gamma / overlap
    return out
