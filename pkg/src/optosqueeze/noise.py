"""Noise forcings, coating Brownian noise and detector presets.

Input channels are ``n = (a1_in, a2_in, z_th)``: the two vacuum quadratures
of the input light (symmetrized two-sided PSD 1/2 each) and an optional
thermal displacement of the mirror.  The forcings are ``nu = C(x) @ n`` with::

    nu1 = -(g/kappa) [a1 (g/2 - i x) + a2 sqrt(2 - g^2/4)]
    nu2 = (i x alpha / (2 kappa)) a2 - x^2 z_th

The thermal displacement is uncorrelated with the vacuum inputs, so it only
adds ``x^4 S_zth`` to the ``nu2`` auto-spectrum.
"""
from __future__ import annotations

import configparser
import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from importlib import resources
from pathlib import Path

import numpy as np

from .params import (
    HBAR,
    K_BOLTZMANN,
    BASELINE_PARAMS,
    ClosedParams,
    DimensionlessParams,
    close_to_targets,
)

VACUUM_PSD = 0.5
N_CHANNELS = 3


class BandwidthWarning(UserWarning):
    pass


class PresetError(KeyError):
    pass


def input_coupling(x, dp: DimensionlessParams) -> np.ndarray:
    """``C(x)`` mapping ``(a1, a2, z_th)`` onto ``(nu1, nu2)``; shape (..., 2, 3)."""
    x = np.asarray(x, dtype=float)
    c = np.zeros(x.shape + (2, 3), dtype=complex)
    root = math.sqrt(2.0 - dp.g**2 / 4.0)
    c[..., 0, 0] = -(dp.g / dp.kappa) * (dp.g / 2.0 - 1j * x)
    c[..., 0, 1] = -(dp.g / dp.kappa) * root
    c[..., 1, 1] = 1j * x * dp.alpha / (2.0 * dp.kappa)
    c[..., 1, 2] = -x * x
    return c


def input_psd(x, thermal=None, cutoff=None) -> np.ndarray:
    """Diagonal PSDs of ``(a1, a2, z_th)`` at dimensionless frequency ``x``.

    ``cutoff`` band-limits every input to ``|x| <= cutoff`` (used to mirror a
    band-limited simulation).
    """
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape + (N_CHANNELS,))
    out[..., 0] = VACUUM_PSD
    out[..., 1] = VACUUM_PSD
    if thermal is not None:
        out[..., 2] = thermal.psd(x)
    if cutoff is not None:
        out[np.abs(x) > cutoff] = 0.0
    return out


def forcing_cross_spectrum(x, dp: DimensionlessParams, thermal=None) -> np.ndarray:
    """Hermitian cross-spectral matrix of ``(nu1, nu2)``; shape (..., 2, 2)."""
    c = input_coupling(x, dp)
    s = input_psd(x, thermal)
    return np.einsum("...ik,...k,...jk->...ij", c, s, c.conj())


def modal_forcing_psd(modes, j: int, x, dp: DimensionlessParams, bandwidth=None, thermal=None):
    """PSD of the slow forcing ``f_j = i (Pi_j nu) e^{i omega_j t} / (2 omega_j)``.

    Evaluated at offset ``x`` from ``omega_j``; zero outside ``|x| <= bandwidth``.
    """
    mode = modes[j]
    bandwidth = default_bandwidth(modes, j) if bandwidth is None else float(bandwidth)
    check_bandwidth(modes, j, bandwidth)
    x = np.asarray(x, dtype=float)
    s_nu = forcing_cross_spectrum(mode.omega + x, dp, thermal)
    pi = mode.dual_vector
    psd = np.einsum("i,...ij,j->...", pi, s_nu, pi.conj()).real / (4.0 * mode.omega**2)
    return np.where(np.abs(x) <= bandwidth, psd, 0.0)


def default_bandwidth(modes, j: int) -> float:
    return 6.0 * modes[j].gamma


def check_bandwidth(modes, j: int, bandwidth: float) -> None:
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    if bandwidth < 3.0 * modes[j].gamma:
        warnings.warn(f"band {bandwidth:.3g} under-covers mode {j + 1} line "
                      f"(gamma = {modes[j].gamma:.3g})", BandwidthWarning, stacklevel=3)
    if bandwidth > modes.separation / 2.0:
        warnings.warn(f"band {bandwidth:.3g} exceeds half the mode separation "
                      f"({modes.separation / 2:.3g}); modal bands overlap",
                      BandwidthWarning, stacklevel=3)


# ---------------------------------------------------------------------------
# coating Brownian noise


@dataclass(frozen=True)
class CoatingParams:
    """Quarter-wave doublet coating on a substrate (layer 1 high-index)."""

    temperature: float = 290.0
    pairs: int = 20
    substrate_young: float = 72e9
    substrate_poisson: float = 0.17
    substrate_loss: float = 4e-10
    index_1: float = 2.035
    young_1: float = 140e9
    poisson_1: float = 0.23
    loss_1: float = 2e-4
    index_2: float = 1.45
    young_2: float = 72e9
    poisson_2: float = 0.17
    loss_2: float = 4e-5

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"coating {name} must be positive, got {value!r}")
        for name in ("substrate_poisson", "poisson_1", "poisson_2"):
            if not getattr(self, name) < 0.5:
                raise ValueError(f"{name} must be < 0.5")

    def thicknesses(self, wavelength: float):
        return (self.pairs * wavelength / (4.0 * self.index_1),
                self.pairs * wavelength / (4.0 * self.index_2))

    def replace(self, **changes) -> "CoatingParams":
        values = dict(self.__dict__)
        values.update(changes)
        return CoatingParams(**values)


def coating_loss_angles(coating: CoatingParams, beam_radius: float, wavelength: float):
    """Parallel and perpendicular effective loss angles ``(phi_par, phi_perp)``."""
    Y, s = coating.substrate_young, coating.substrate_poisson
    Y1, s1, p1 = coating.young_1, coating.poisson_1, coating.loss_1
    Y2, s2, p2 = coating.young_2, coating.poisson_2, coating.loss_2
    d1, d2 = coating.thicknesses(wavelength)
    w = beam_radius
    root_pi = math.sqrt(math.pi)
    phi_par = ((1 + s) * (1 - 2 * s**2) / (root_pi * w * Y * (1 - s))
               * (Y1 * d1 * p1 / (1 - s1**2) + Y2 * d2 * p2 / (1 - s2**2)))
    phi_perp = (Y / (root_pi * w * (1 - s**2))
                * ((1 + s1) * (1 - 2 * s1) * d1 * p1 / (Y1 * (1 - s1))
                   + (1 + s2) * (1 - 2 * s2) * d2 * p2 / (Y2 * (1 - s2))))
    return phi_par, phi_perp


def coating_displacement_psd(f, coating: CoatingParams, beam_radius: float, wavelength: float,
                             temperature: float | None = None):
    """Mirror displacement PSD (m^2/Hz) from coating Brownian noise."""
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    T = coating.temperature if temperature is None else temperature
    phi_par, phi_perp = coating_loss_angles(coating, beam_radius, wavelength)
    s = coating.substrate_poisson
    return (2.0 * K_BOLTZMANN * T * (1 - s**2)
            / (math.pi**1.5 * f * beam_radius * coating.substrate_young)) * (phi_par + phi_perp)


@dataclass(frozen=True)
class DetectorPreset:
    name: str
    arm_length: float
    reduced_mass: float
    beam_radius: float
    arm_power: float
    wavelength: float
    temperature: float | None = None
    reference_xi: float | None = field(default=None, compare=False)

    def __post_init__(self):
        for key in ("arm_length", "reduced_mass", "beam_radius", "arm_power", "wavelength"):
            v = getattr(self, key)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"preset {self.name}: {key} must be positive, got {v!r}")
        if self.temperature is not None and not self.temperature > 0:
            raise ValueError(f"preset {self.name}: temperature must be positive")

    @property
    def equivalent_power(self) -> float:
        """Circulating power of the equivalent cavity (twice the per-arm power)."""
        return 2.0 * self.arm_power

    def close(self, dp: DimensionlessParams = BASELINE_PARAMS) -> ClosedParams:
        return close_to_targets(self.arm_length, self.reduced_mass, self.equivalent_power,
                                self.wavelength, dp.A, dp.g, dp.alpha)

    def replace(self, **changes) -> "DetectorPreset":
        values = dict(self.__dict__)
        values.update(changes)
        return DetectorPreset(**values)


@dataclass(frozen=True)
class ThermalForce:
    """Coating Brownian forcing expressed on the dimensionless frequency axis."""

    preset: DetectorPreset
    coating: CoatingParams
    closed: ClosedParams

    @cached_property
    def _psd_times_f(self) -> float:
        return float(thermal_psd(1.0, self.preset, self.coating, self.closed))

    def hertz(self, x):
        """Dimensionless frequency -> Hz, via ``x = sqrt(2) Omega / sqrt(Gamma^2 + Delta^2)``."""
        return np.abs(np.asarray(x, dtype=float)) * self.closed.physical.frequency_scale / (2 * math.pi)

    def psd(self, x):
        f = self.hertz(x)
        with np.errstate(divide="ignore"):
            out = np.where(f > 0, self._psd_times_f / np.where(f > 0, f, 1.0), 0.0)
        return out


def thermal_psd(f, preset: DetectorPreset, coating: CoatingParams | None = None,
                closed: ClosedParams | None = None, dp: DimensionlessParams = BASELINE_PARAMS):
    """Dimensionless thermal displacement PSD ``S_zth`` at ``f`` Hz.

    ``S_zth = (mu Delta / (2 hbar tau)) * S_y(f)``; ``Delta`` comes from closing
    the preset onto ``dp`` unless ``closed`` is supplied.
    """
    coating = CoatingParams() if coating is None else coating
    closed = preset.close(dp) if closed is None else closed
    phys = closed.physical
    scale = phys.reduced_mass * phys.detuning / (2.0 * HBAR * phys.one_way_time)
    return scale * coating_displacement_psd(f, coating, preset.beam_radius, preset.wavelength,
                                            preset.temperature)


def thermal_force(preset: DetectorPreset, coating: CoatingParams | None = None,
                  dp: DimensionlessParams = BASELINE_PARAMS) -> ThermalForce:
    coating = CoatingParams() if coating is None else coating
    return ThermalForce(preset, coating, preset.close(dp))


@dataclass(frozen=True)
class XiResult:
    preset: str
    xi: float
    thermal_psd: float
    quantum_psd: float
    mode_frequency_hz: float
    closed: ClosedParams
    reference: float | None = None

    @property
    def deviation(self) -> float | None:
        if self.reference is None:
            return None
        return self.xi / self.reference - 1.0


def xi_factor(preset: DetectorPreset, coating: CoatingParams | None = None,
              dp: DimensionlessParams = BASELINE_PARAMS) -> XiResult:
    """Square-rooted thermal/quantum ratio of the mode-1 output quadrature PSD at m = 0."""
    from .eigenmodes import compute_modes
    from .params import ModulationParams
    from .readout import modal_output_forms

    thermal = thermal_force(preset, coating, dp)
    phys_dp = thermal.closed.dimensionless
    modes = compute_modes(phys_dp)
    plus, _ = modal_output_forms(np.zeros(1), modes, ModulationParams(0.0), 0)
    quantum = plus.psd(lambda X: input_psd(X) * np.array([1.0, 1.0, 0.0]))[0]
    thermal_only = plus.psd(lambda X: input_psd(X, thermal) * np.array([0.0, 0.0, 1.0]))[0]
    return XiResult(
        preset=preset.name,
        xi=math.sqrt(thermal_only / quantum),
        thermal_psd=float(thermal_only),
        quantum_psd=float(quantum),
        mode_frequency_hz=float(thermal.hertz(modes[0].omega)),
        closed=thermal.closed,
        reference=preset.reference_xi,
    )


# ---------------------------------------------------------------------------
# preset files

_COATING_KEYS = {f.name for f in CoatingParams.__dataclass_fields__.values()}


def _parse(parser: configparser.ConfigParser, source: str):
    coating = None
    if parser.has_section("coating"):
        values = {}
        for key, raw in parser.items("coating"):
            if key not in _COATING_KEYS:
                raise PresetError(f"{source}: unknown coating key {key!r}")
            values[key] = int(raw) if key == "pairs" else float(raw)
        coating = CoatingParams(**values)
    presets = {}
    for section in parser.sections():
        if not section.startswith("detector:"):
            if section != "coating":
                raise PresetError(f"{source}: unknown section [{section}]")
            continue
        name = section.split(":", 1)[1].strip()
        items = dict(parser.items(section))
        try:
            presets[name] = DetectorPreset(
                name=name,
                arm_length=float(items.pop("arm_length")),
                reduced_mass=float(items.pop("reduced_mass")),
                beam_radius=float(items.pop("beam_radius")),
                arm_power=float(items.pop("arm_power")),
                wavelength=float(items.pop("wavelength")),
                temperature=float(items.pop("temperature")) if "temperature" in items else None,
                reference_xi=float(items.pop("reference_xi")) if "reference_xi" in items else None,
            )
        except KeyError as exc:
            raise PresetError(f"{source}: [{section}] missing key {exc.args[0]!r}") from None
        if items:
            raise PresetError(f"{source}: [{section}] unknown keys {sorted(items)}")
    return presets, coating


def load_presets(path: str | Path | None = None):
    """Read ``(presets, coating)`` from an INI file; built-ins when ``path`` is None."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    if path is None:
        text = resources.files("optosqueeze").joinpath("data/presets.ini").read_text()
        parser.read_string(text, source="presets.ini")
        source = "built-in presets"
    else:
        with open(path) as fh:
            parser.read_file(fh)
        source = str(path)
    presets, coating = _parse(parser, source)
    if coating is None:
        coating = builtin_coating()
    return presets, coating


_BUILTIN = None


def _builtin():
    global _BUILTIN
    if _BUILTIN is None:
        _BUILTIN = load_presets()  # the built-in file always has [coating]
    return _BUILTIN


def builtin_presets() -> dict:
    return dict(_builtin()[0])


def builtin_coating() -> CoatingParams:
    return _builtin()[1]


def get_preset(name: str) -> DetectorPreset:
    presets = builtin_presets()
    try:
        return presets[name]
    except KeyError:
        raise PresetError(f"unknown preset {name!r}; available: {', '.join(presets)}") from None


__all__ = [
    "VACUUM_PSD", "BandwidthWarning", "PresetError", "CoatingParams", "DetectorPreset",
    "ThermalForce", "XiResult", "input_coupling", "input_psd", "forcing_cross_spectrum",
    "modal_forcing_psd", "default_bandwidth", "coating_loss_angles",
    "coating_displacement_psd", "thermal_psd", "thermal_force", "xi_factor", "load_presets",
    "builtin_presets", "builtin_coating", "get_preset",
]
