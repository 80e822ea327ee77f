"""Monte Carlo versus frequency-domain comparison of demodulated variances.

A row passes when ``|mc - analytic| <= max(3 sigma, 5 % of analytic)``.  The
analytic reference is the harmonic-balance chain evaluated with the same
input cutoff and the same brick-wall band as the simulation; the
slow-amplitude prediction is reported alongside for information.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..eigenmodes import compute_modes, critical_modulation
from ..params import DimensionlessParams, ModulationParams, BASELINE_PARAMS
from ..readout import band_variance
from .demod import DemodResult, demodulate
from .simulate import RingdownFit, SimulationConfig, ringdown, simulate_many

QUADRATURES = (("+", 0.0), ("-", math.pi / 2))


@dataclass(frozen=True)
class OracleConfig:
    dp: DimensionlessParams = BASELINE_PARAMS
    fractions: tuple = (0.0, 0.5, 0.7)
    seed: int = 20240601
    n_runs: int = 8
    n_steps: int = 2**20
    dt: float = 0.04
    noise_cutoff: float = 3.0
    band_factor: float = 6.0
    segment_factor: float = 50.0
    sigma: float = 3.0
    rel_tol: float = 0.05
    workers: int = 1
    corrupt_epsilon: bool = False
    ringdown_tol: float = 0.01

    def __post_init__(self):
        if not self.fractions:
            raise ValueError("at least one modulation depth is required")
        if any(not 0 <= f < 1 for f in self.fractions):
            raise ValueError("depth fractions must lie in [0, 1)")


@dataclass(frozen=True)
class OracleRow:
    fraction: float
    depth: float
    mode: int
    quadrature: str
    mc: float
    error: float
    analytic: float
    modal: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return abs(self.mc - self.analytic) <= self.tolerance

    @property
    def z_score(self) -> float:
        return (self.mc - self.analytic) / self.error


@dataclass
class OracleReport:
    config: OracleConfig
    rows: list = field(default_factory=list)
    ringdown: RingdownFit | None = None
    elapsed: float = 0.0

    @property
    def ringdown_passed(self) -> bool:
        if self.ringdown is None:
            return True
        return bool(np.all(self.ringdown.gamma_error <= self.config.ringdown_tol)
                    and np.all(self.ringdown.omega_error <= self.config.ringdown_tol))

    def ordering_ok(self) -> bool:
        """Mode-1 squeezed variance below the antisqueezed one at every nonzero depth."""
        for f in self.config.fractions:
            if f == 0:
                continue
            got = {r.quadrature: r.mc for r in self.rows if r.fraction == f and r.mode == 0}
            if not got["+"] < got["-"]:
                return False
        return True

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows) and self.ringdown_passed and self.ordering_ok()

    def format(self) -> str:
        c = self.config
        lines = [
            f"# oracle seed={c.seed} runs={c.n_runs} steps={c.n_steps} dt={c.dt} "
            f"cutoff={c.noise_cutoff} A={c.dp.A} g={c.dp.g} alpha={c.dp.alpha} "
            f"corrupt_epsilon={c.corrupt_epsilon}",
            f"{'m/m_c':>6} {'mode':>4} {'q':>2} {'monte carlo':>12} {'sigma':>10} "
            f"{'analytic':>12} {'slow-amp':>12} {'z':>7}  result",
        ]
        for r in self.rows:
            lines.append(f"{r.fraction:6.3f} {r.mode + 1:4d} {r.quadrature:>2} {r.mc:12.6g} "
                         f"{r.error:10.3g} {r.analytic:12.6g} {r.modal:12.6g} {r.z_score:7.2f}  "
                         f"{'PASS' if r.passed else 'FAIL'}")
        if self.ringdown is not None:
            for j in range(len(self.ringdown.gamma)):
                lines.append(f"ringdown mode {j + 1}: gamma {self.ringdown.gamma[j]:.6g} "
                             f"(ref {self.ringdown.gamma_ref[j]:.6g}), omega "
                             f"{self.ringdown.omega[j]:.6g} (ref {self.ringdown.omega_ref[j]:.6g})")
        lines.append(f"squeezing order: {'ok' if self.ordering_ok() else 'violated'}")
        lines.append(f"elapsed {self.elapsed:.1f} s")
        lines.append("ORACLE " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)


def _reduce(modes, config: OracleConfig):
    targets = [(j, q, ph) for j in range(len(modes)) for q, ph in QUADRATURES]

    def consume(run):
        t, y = run.stationary(modes)
        return [demodulate(t, y, modes[j].omega, ph, config.band_factor * modes[j].gamma,
                           config.segment_factor / modes[j].gamma, modes[j].gamma)
                for j, _, ph in targets]

    return targets, consume


def crosscheck(config: OracleConfig = OracleConfig(), with_ringdown=True, log=None) -> OracleReport:
    start = time.perf_counter()
    modes = compute_modes(config.dp)
    m_c = float(critical_modulation(modes)[0])
    phase = modes.squeezing_phase(0)
    report = OracleReport(config)
    targets, consume = _reduce(modes, config)
    for fraction in config.fractions:
        mod = ModulationParams(fraction * m_c, phase)
        sim = SimulationConfig(config.dp, mod, dt=config.dt, n_steps=config.n_steps,
                               n_runs=config.n_runs, seed=config.seed,
                               noise_cutoff=config.noise_cutoff, workers=config.workers)
        per_run = simulate_many(sim, modes, consume)
        for k, (j, quad, ph) in enumerate(targets):
            mc = DemodResult.from_segments(np.concatenate([r[k].segment_means for r in per_run]))
            band = config.band_factor * modes[j].gamma
            exact = band_variance(modes, mod, j, ph, band, "exact", config.noise_cutoff,
                                  corrupt_epsilon=config.corrupt_epsilon)
            modal = band_variance(modes, mod, j, ph, band, "modal", config.noise_cutoff,
                                  corrupt_epsilon=config.corrupt_epsilon)
            tol = max(config.sigma * mc.error, config.rel_tol * exact)
            row = OracleRow(fraction, mod.depth, j, quad, mc.variance, mc.error, exact, modal, tol)
            report.rows.append(row)
            if log is not None:
                log(f"m/m_c={fraction:.3f} mode {j + 1} {quad}: mc {mc.variance:.6g} "
                    f"+- {mc.error:.2g}, analytic {exact:.6g}")
    if with_ringdown:
        report.ringdown = ringdown(config.dp)
    report.elapsed = time.perf_counter() - start
    return report
