"""Cavity parameters, unit conversion and the spectral equations of motion.

The two degrees of freedom are the intracavity amplitude quadrature ``b1`` and
the dimensionless mirror displacement ``z``.  In the spectral domain (time
dependence ``exp(-i x t)``) they obey ``M(x) @ (b1, z) = (nu1, nu2)`` with::

    M(x) = [[-x**2 - 1j*x*g + 2,  A    ],
            [-A + 1j*x*alpha,     -x**2]]
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import constants, optimize

SPEED_OF_LIGHT = constants.c
HBAR = constants.hbar
K_BOLTZMANN = constants.k

G_MAX = 2.0 * math.sqrt(2.0)


class ParameterError(ValueError):
    """Raised for parameter sets outside the physical domain."""


class ClosureError(RuntimeError):
    """Raised when (Gamma, Delta) cannot be recovered from dimensionless targets."""


@dataclass(frozen=True)
class PhysicalParams:
    """SI description of the equivalent Fabry-Perot cavity.

    ``circulating_power`` is the power of the equivalent single cavity, i.e.
    twice the per-arm power of the interferometer it stands in for.
    ``feedback_gain`` is ``alpha_fb`` in the feedback force
    ``f_fb = -mu * alpha_fb * d(a2_out)/dt``.
    """

    arm_length: float
    reduced_mass: float
    circulating_power: float
    wavelength: float
    relaxation_rate: float
    detuning: float
    feedback_gain: float = 0.0

    def __post_init__(self):
        for name in ("arm_length", "reduced_mass", "circulating_power",
                     "wavelength", "relaxation_rate"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ParameterError(f"{name} must be positive and finite, got {value!r}")
        if not (math.isfinite(self.detuning) and self.detuning > 0):
            raise ParameterError(
                "detuning must be positive (blue-detuned pump creates the optical spring), "
                f"got {self.detuning!r}"
            )
        if not (math.isfinite(self.feedback_gain) and self.feedback_gain >= 0):
            raise ParameterError(f"feedback_gain must be >= 0, got {self.feedback_gain!r}")

    @property
    def one_way_time(self) -> float:
        return self.arm_length / SPEED_OF_LIGHT

    @property
    def pump_frequency(self) -> float:
        return 2.0 * math.pi * SPEED_OF_LIGHT / self.wavelength

    @property
    def frequency_scale(self) -> float:
        """Angular frequency (rad/s) corresponding to x = 1."""
        return math.hypot(self.relaxation_rate, self.detuning) / math.sqrt(2.0)


@dataclass(frozen=True)
class DimensionlessParams:
    """Coupling ``A``, optical damping ``g``, feedback ``alpha`` and ``kappa``.

    ``kappa = sqrt(Gamma * tau)`` only rescales the noise forcings and the
    output coupling; every normalized spectrum is independent of it.
    """

    A: float
    g: float
    alpha: float
    kappa: float = 1.0

    def __post_init__(self):
        for name in ("A", "g", "alpha", "kappa"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        # A = 0 is accepted so the decoupled limit can be inspected.
        if self.A < 0:
            raise ParameterError(f"A must be >= 0, got {self.A}")
        if not 0 < self.g < G_MAX:
            raise ParameterError(f"g must lie in (0, 2*sqrt(2)), got {self.g}")
        if self.alpha < 0:
            raise ParameterError(f"alpha must be >= 0, got {self.alpha}")
        if self.kappa <= 0:
            raise ParameterError(f"kappa must be positive, got {self.kappa}")

    def replace(self, **changes) -> "DimensionlessParams":
        values = dict(A=self.A, g=self.g, alpha=self.alpha, kappa=self.kappa)
        values.update(changes)
        return DimensionlessParams(**values)


#: Parameter set used for all the numerical examples of the model.
BASELINE_PARAMS = DimensionlessParams(A=0.90, g=0.1, alpha=0.1)


@dataclass(frozen=True)
class ModulationParams:
    """Pump modulation ``A -> A (1 + 2 |m| cos(2 p t + phase))``.

    ``pump_half_frequency`` is ``p``; ``None`` means "the first eigenfrequency".
    """

    depth: float = 0.0
    phase: float = 0.0
    pump_half_frequency: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.depth) and self.depth >= 0):
            raise ParameterError(f"modulation depth must be >= 0, got {self.depth}")
        if not math.isfinite(self.phase):
            raise ParameterError("modulation phase must be finite")
        if self.pump_half_frequency is not None and not self.pump_half_frequency > 0:
            raise ParameterError("pump_half_frequency must be positive")


def to_dimensionless(phys: PhysicalParams) -> DimensionlessParams:
    gamma, delta = phys.relaxation_rate, phys.detuning
    rate2 = gamma**2 + delta**2
    g = 2.0 * math.sqrt(2.0) * gamma / math.sqrt(rate2)
    A = (2.0 / rate2) * math.sqrt(
        2.0 * phys.circulating_power * phys.pump_frequency * delta
        / (phys.reduced_mass * phys.arm_length * SPEED_OF_LIGHT)
    )
    alpha = (2.0 * phys.feedback_gain / math.sqrt(rate2)) * math.sqrt(
        phys.reduced_mass * delta * gamma / HBAR
    )
    kappa = math.sqrt(gamma * phys.one_way_time)
    if not all(math.isfinite(v) for v in (A, g, alpha, kappa)):
        raise ParameterError("dimensionless conversion produced a non-finite value")
    return DimensionlessParams(A=A, g=g, alpha=alpha, kappa=kappa)


def close_parameters(arm_length, reduced_mass, power, wavelength, A_target, g_target,
                     *, rtol=1e-10, max_iter=200):
    """Recover ``(Gamma, Delta)`` reproducing ``(A_target, g_target)``.

    ``g`` fixes the ratio ``Gamma / Delta``; with it eliminated, ``A`` is a
    strictly decreasing function of ``Delta`` and a bracketed scalar root
    find on ``log(A(Delta) / A_target)`` gives the unique solution.
    """
    if not 0 < g_target < G_MAX:
        raise ParameterError(f"g_target must lie in (0, 2*sqrt(2)), got {g_target}")
    if not A_target > 0:
        raise ParameterError(f"A_target must be positive, got {A_target}")
    for name, v in (("arm_length", arm_length), ("reduced_mass", reduced_mass),
                    ("power", power), ("wavelength", wavelength)):
        if not (math.isfinite(v) and v > 0):
            raise ParameterError(f"{name} must be positive, got {v!r}")

    q = g_target / G_MAX
    ratio = q / math.sqrt(1.0 - q * q)  # Gamma / Delta
    omega0 = 2.0 * math.pi * SPEED_OF_LIGHT / wavelength
    drive = 2.0 * power * omega0 / (reduced_mass * arm_length * SPEED_OF_LIGHT)

    def coupling(delta):
        gamma = ratio * delta
        return (2.0 / (gamma**2 + delta**2)) * math.sqrt(drive * delta)

    def residual(log_delta):
        return math.log(coupling(math.exp(log_delta)) / A_target)

    lo, hi = 0.0, 0.0
    for _ in range(max_iter):
        if residual(lo) > 0:
            break
        lo -= 5.0
    for _ in range(max_iter):
        if residual(hi) < 0:
            break
        hi += 5.0
    if not (residual(lo) > 0 > residual(hi)):
        raise ClosureError("could not bracket the detuning")

    log_delta, info = optimize.brentq(residual, lo, hi, xtol=1e-15, rtol=1e-15,
                                      maxiter=max_iter, full_output=True)
    delta = math.exp(log_delta)
    gamma = ratio * delta
    rel = abs(coupling(delta) / A_target - 1.0)
    if not info.converged or rel > rtol:
        raise ClosureError(f"closure residual {rel:.3e} exceeds {rtol:.1e}")
    return gamma, delta


def system_matrix(x, dp: DimensionlessParams) -> np.ndarray:
    """``M(x)``; scalar ``x`` gives shape (2, 2), an array gives (..., 2, 2)."""
    x = np.asarray(x, dtype=complex)
    out = np.empty(x.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = -x * x - 1j * x * dp.g + 2.0
    out[..., 0, 1] = dp.A
    out[..., 1, 0] = -dp.A + 1j * x * dp.alpha
    out[..., 1, 1] = -x * x
    return out


def characteristic_coefficients(dp: DimensionlessParams) -> np.ndarray:
    """Coefficients (highest power first) of ``det M(x)``.

    det M = x^4 + i g x^3 - 2 x^2 - i A alpha x + A^2
    """
    return np.array([1.0, 1j * dp.g, -2.0, -1j * dp.A * dp.alpha, dp.A**2], dtype=complex)


def characteristic_polynomial(x, dp: DimensionlessParams):
    return np.polyval(characteristic_coefficients(dp), x)


@dataclass(frozen=True)
class ClosedParams:
    """Detector data closed onto dimensionless targets."""

    physical: PhysicalParams
    dimensionless: DimensionlessParams
    notes: dict = field(default_factory=dict, compare=False)


def close_to_targets(arm_length, reduced_mass, power, wavelength, A_target, g_target,
                     alpha_target=0.0) -> ClosedParams:
    """Close (Gamma, Delta) and choose alpha_fb so that ``alpha == alpha_target``."""
    gamma, delta = close_parameters(arm_length, reduced_mass, power, wavelength,
                                    A_target, g_target)
    rate = math.hypot(gamma, delta)
    alpha_fb = alpha_target * rate / (2.0 * math.sqrt(reduced_mass * delta * gamma / HBAR))
    phys = PhysicalParams(arm_length, reduced_mass, power, wavelength, gamma, delta, alpha_fb)
    return ClosedParams(phys, to_dimensionless(phys))
