"""Time-domain Monte Carlo of the pumped cavity-mirror equations.

State ``(b1, db1/dt, z, dz/dt)`` with::

    b1'' = -g b1' - 2 b1 - A(t) z + nu1
    z''  = A(t) b1 + alpha b1' + nu2
    A(t) = A (1 + 2 |m| cos(2 p t + phase))

The vacuum inputs ``a1, a2`` are synthesized in the frequency domain as
band-limited Gaussian noise (PSD 1/2 below ``noise_cutoff``) on a half-step
grid, and the forcings use their exact time-domain form::

    nu1 = -(g/kappa) [(g/2) a1 + a1' + sqrt(2 - g^2/4) a2]
    nu2 = -(alpha / (2 kappa)) a2'

with derivatives taken spectrally.  The output is ``a2_out = -a2 - 2 kappa b1``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sfft

from .. import _core
from ..eigenmodes import ModeSet, compute_modes
from ..params import DimensionlessParams, ModulationParams
from ..spectral import coupled_matrix

BLOWUP_FACTOR = 1e6
RESOLUTION = 50


class BlowUpError(ArithmeticError):
    """The integrated state grew without bound."""


@dataclass(frozen=True)
class SimulationConfig:
    dp: DimensionlessParams
    mod: ModulationParams = field(default_factory=ModulationParams)
    dt: float = 0.04
    n_steps: int = 2**20
    n_runs: int = 1
    seed: int = 0
    noise_cutoff: float = 3.0
    noise: bool = True
    initial_state: tuple = (0.0, 0.0, 0.0, 0.0)
    discard: float | None = None  # default 10 / min(gamma_j)
    workers: int = 1

    def __post_init__(self):
        if self.dt <= 0 or self.n_steps < 2 or self.n_runs < 1:
            raise ValueError("dt, n_steps and n_runs must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.noise_cutoff <= 0:
            raise ValueError("noise_cutoff must be positive")

    @property
    def duration(self) -> float:
        return self.n_steps * self.dt

    def max_dt(self, modes: ModeSet) -> float:
        return 2 * math.pi / (RESOLUTION * max(modes[1].omega, self.noise_cutoff))

    def transient(self, modes: ModeSet) -> float:
        return 10.0 / min(modes.gammas) if self.discard is None else float(self.discard)


@dataclass
class SimulationRun:
    config: SimulationConfig
    run_index: int
    t: np.ndarray
    state: np.ndarray  # (n_steps + 1, 4)
    a2_in: np.ndarray  # input phase quadrature on the same grid

    @property
    def b1(self):
        return self.state[:, 0]

    @property
    def z(self):
        return self.state[:, 2]

    @property
    def output(self) -> np.ndarray:
        return -self.a2_in - 2.0 * self.config.dp.kappa * self.b1

    def stationary(self, modes: ModeSet | None = None):
        """``(t, a2_out)`` with the initial transient removed."""
        modes = compute_modes(self.config.dp) if modes is None else modes
        start = int(math.ceil(self.config.transient(modes) / self.config.dt))
        if start >= self.t.size - 1:
            raise ValueError("run is shorter than the transient to discard")
        return self.t[start:], self.output[start:]

    def dump(self, path) -> None:
        header = (f"seed={self.config.seed} run={self.run_index} dt={self.config.dt} "
                  f"A={self.config.dp.A} g={self.config.dp.g} alpha={self.config.dp.alpha} "
                  f"m={self.config.mod.depth} phase={self.config.mod.phase}\nt,b1,z")
        np.savetxt(path, np.column_stack([self.t, self.b1, self.z]), delimiter=",",
                   header=header, fmt="%.15g")


def synthesize_noise(config: SimulationConfig, rng: np.random.Generator):
    """``(nu1, nu2, a2)``: forcings on the half-step grid, ``a2`` on the step grid."""
    dp = config.dp
    n = 2 * config.n_steps
    h = 0.5 * config.dt
    white = rng.standard_normal((2, n)) * math.sqrt(1.0 / (2.0 * h))
    spec = sfft.rfft(white, axis=1)
    omega = 2 * math.pi * sfft.rfftfreq(n, h)
    spec[:, omega > config.noise_cutoff] = 0.0
    a1, a2 = sfft.irfft(spec, n, axis=1)
    da1, da2 = sfft.irfft(spec * (1j * omega), n, axis=1)
    root = math.sqrt(2.0 - dp.g**2 / 4.0)
    nu1 = -(dp.g / dp.kappa) * (0.5 * dp.g * a1 + da1 + root * a2)
    nu2 = -(dp.alpha / (2.0 * dp.kappa)) * da2
    # the synthesized record is periodic; close it for the last half step
    wrap = lambda u: np.append(u, u[0])  # noqa: E731
    return wrap(nu1), wrap(nu2), wrap(a2)[::2]


def _describe_instability(modes: ModeSet, mod: ModulationParams) -> str:
    if not modes.stable:
        bad = [f"s = {s:.6g}" for s in modes.roots if s.imag > 0 and s.real > 0]
        return "optomechanical mode unstable (" + ", ".join(bad) + ")"
    h = coupled_matrix(0.0, modes, mod)[0]
    vals, vecs = np.linalg.eig(h)
    k = int(np.argmin(vals.real))
    vec = vecs[:, k]
    j = int(np.argmax([np.linalg.norm(vec[0:2]), np.linalg.norm(vec[2:4])]))
    u, v = vec[2 * j], vec[2 * j + 1]
    quad = "+" if abs(u + v) >= abs(u - v) else "-"
    return (f"quadrature G_{j + 1}^({quad}) beyond parametric threshold "
            f"(slowest rate {vals[k].real:.3g})")


def simulate(config: SimulationConfig, run_index: int = 0, modes: ModeSet | None = None,
             seed_sequence: np.random.SeedSequence | None = None) -> SimulationRun:
    modes = compute_modes(config.dp) if modes is None else modes
    if config.dt > config.max_dt(modes) * (1 + 1e-12):
        raise ValueError(f"dt = {config.dt} exceeds the resolution guard {config.max_dt(modes):.6g}")
    if seed_sequence is None:
        seed_sequence = np.random.SeedSequence(config.seed).spawn(run_index + 1)[run_index]
    n = config.n_steps
    if config.noise:
        nu1, nu2, a2 = synthesize_noise(config, np.random.default_rng(seed_sequence))
    else:
        nu1 = nu2 = np.zeros(2 * n + 1)
        a2 = np.zeros(n + 1)
    y0 = np.asarray(config.initial_state, dtype=float)
    reference = max(float(np.linalg.norm(y0)), float(np.std(nu1) + np.std(nu2)), 1e-300)
    out = np.empty((n + 1, 4))
    p = modes.pump_half_frequency(config.mod)
    dp = config.dp
    done = _core.integrate(y0, 0.0, config.dt, n, dp.A, dp.g, dp.alpha, config.mod.depth,
                           2.0 * p, config.mod.phase, nu1, nu2, out, BLOWUP_FACTOR * reference)
    if done < n:
        raise BlowUpError(f"state norm exceeded {BLOWUP_FACTOR:.0e} x reference at "
                          f"t = {done * config.dt:.6g}: {_describe_instability(modes, config.mod)}")
    t = np.arange(n + 1) * config.dt
    return SimulationRun(config, run_index, t, out, a2)


def simulate_many(config: SimulationConfig, modes: ModeSet | None = None, consume=None):
    """Run ``config.n_runs`` independent realizations.

    ``consume(run)`` reduces each run as soon as it finishes (so the
    trajectories need not be kept); results come back in run order.
    """
    modes = compute_modes(config.dp) if modes is None else modes
    seeds = np.random.SeedSequence(config.seed).spawn(config.n_runs)
    consume = (lambda run: run) if consume is None else consume

    def one(i):
        return consume(simulate(config, i, modes, seeds[i]))

    if config.workers > 1:
        with ThreadPoolExecutor(config.workers) as pool:
            return list(pool.map(one, range(config.n_runs)))
    return [one(i) for i in range(config.n_runs)]


@dataclass(frozen=True)
class RingdownFit:
    omega: np.ndarray
    gamma: np.ndarray
    omega_ref: np.ndarray
    gamma_ref: np.ndarray

    @property
    def gamma_error(self) -> np.ndarray:
        return np.abs(self.gamma / self.gamma_ref - 1.0)

    @property
    def omega_error(self) -> np.ndarray:
        return np.abs(self.omega / self.omega_ref - 1.0)


def ringdown(dp: DimensionlessParams, duration=400.0, dt=0.02, width=0.1, margin=60.0,
             mod: ModulationParams | None = None) -> RingdownFit:
    """Free decay from ``b1 = 1``; fit the rate and frequency of each line.

    The record is mixed down by ``exp(i omega_j t)`` and smoothed with a
    Gaussian frequency-domain filter of width ``width``; log-envelope and
    phase are then fitted linearly away from the record ends.
    """
    modes = compute_modes(dp)
    n = int(round(duration / dt))
    config = SimulationConfig(dp, mod or ModulationParams(), dt=dt, n_steps=n, noise=False,
                              initial_state=(1.0, 0.0, 0.0, 0.0))
    run = simulate(config, modes=modes)
    t, b1 = run.t, run.b1
    keep = (t > margin) & (t < t[-1] - margin)
    freq = 2 * math.pi * np.fft.fftfreq(t.size, dt)
    omegas, gammas = [], []
    for mode in modes.modes:
        mixed = b1 * np.exp(1j * mode.omega * t)
        # numpy frequency +w corresponds to exp(+i w t); the mixed-down line sits near 0
        smooth = np.fft.ifft(np.fft.fft(mixed) * np.exp(-0.5 * (freq / width) ** 2))
        slope, _ = np.polyfit(t[keep], np.log(np.abs(smooth[keep])), 1)
        phase_slope, _ = np.polyfit(t[keep], np.unwrap(np.angle(smooth[keep])), 1)
        gammas.append(-slope)
        omegas.append(mode.omega - phase_slope)
    return RingdownFit(np.array(omegas), np.array(gammas), modes.omegas, modes.gammas)
