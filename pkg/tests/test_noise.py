import math

import numpy as np
import pytest

from optosqueeze.noise import (
    BandwidthWarning,
    CoatingParams,
    PresetError,
    builtin_coating,
    builtin_presets,
    coating_displacement_psd,
    forcing_cross_spectrum,
    get_preset,
    input_coupling,
    input_psd,
    load_presets,
    modal_forcing_psd,
    thermal_force,
    thermal_psd,
    xi_factor,
)
from optosqueeze.params import BASELINE_PARAMS


def test_coupling_reality(rng):
    x = rng.normal(size=7)
    np.testing.assert_allclose(input_coupling(-x, BASELINE_PARAMS),
                               np.conj(input_coupling(x, BASELINE_PARAMS)), atol=1e-15)


def test_forcing_spectrum_closed_form():
    g, a, k, x = 0.1, 0.1, 1.0, 0.7
    s = forcing_cross_spectrum(x, BASELINE_PARAMS)
    s11 = 0.5 * (g / k) ** 2 * ((g / 2) ** 2 + x**2 + 2 - g**2 / 4)
    assert s[0, 0].real == pytest.approx(s11, rel=1e-14)
    assert s[1, 1].real == pytest.approx(0.5 * (x * a / (2 * k)) ** 2, rel=1e-14)
    # correlated through a2: 0.5 * (-(g/k) sqrt(2 - g^2/4)) * conj(i x a / 2k)
    s12 = 0.5 * (-(g / k) * math.sqrt(2 - g * g / 4)) * np.conj(1j * x * a / (2 * k))
    assert s[0, 1] == pytest.approx(s12, rel=1e-14)
    np.testing.assert_allclose(s, s.conj().T, atol=1e-16)


def test_modal_forcing_is_quadratic_form(modes):
    x = np.array([-0.05, 0.0, 0.03])
    pi = modes[0].dual_vector
    ref = []
    for xi in x:
        s = forcing_cross_spectrum(modes[0].omega + xi, BASELINE_PARAMS)
        ref.append((pi @ s @ pi.conj()).real / (4 * modes[0].omega ** 2))
    np.testing.assert_allclose(modal_forcing_psd(modes, 0, x, BASELINE_PARAMS), ref, rtol=1e-13)


def test_modal_forcing_band_gate(modes):
    g1 = modes[0].gamma
    out = modal_forcing_psd(modes, 0, np.array([0.0, 5.9 * g1, 6.1 * g1]), BASELINE_PARAMS)
    assert out[0] > 0 and out[1] > 0 and out[2] == 0


def test_bandwidth_warnings(modes):
    with pytest.warns(BandwidthWarning):
        modal_forcing_psd(modes, 0, 0.0, BASELINE_PARAMS, bandwidth=modes[0].gamma)
    with pytest.warns(BandwidthWarning):
        modal_forcing_psd(modes, 0, 0.0, BASELINE_PARAMS, bandwidth=modes.separation)


def test_input_psd_cutoff():
    s = input_psd(np.array([0.5, 3.5]), cutoff=3.0)
    np.testing.assert_array_equal(s, [[0.5, 0.5, 0.0], [0.0, 0.0, 0.0]])


def test_presets_table():
    presets = builtin_presets()
    assert list(presets) == ["aLIGO", "ET", "GP", "AEI", "Gingin"]
    assert presets["aLIGO"].equivalent_power == 2 * presets["aLIGO"].arm_power
    assert presets["ET"].temperature == 10.0
    assert builtin_coating() == CoatingParams()
    with pytest.raises(PresetError, match="available"):
        get_preset("LISA")


def test_custom_preset_file(tmp_path):
    path = tmp_path / "p.ini"
    path.write_text("[detector:Mine]\narm_length = 100\nreduced_mass = 1\nbeam_radius = 0.02\n"
                    "arm_power = 1000\nwavelength = 1.064e-6\n")
    presets, coating = load_presets(path)
    assert presets["Mine"].reference_xi is None
    assert coating == builtin_coating()
    path.write_text("[detector:Bad]\narm_length = 100\n")
    with pytest.raises(PresetError, match="missing"):
        load_presets(path)
    path.write_text("[weird]\nx = 1\n")
    with pytest.raises(PresetError, match="unknown section"):
        load_presets(path)


def test_thermal_linear_in_temperature():
    preset = get_preset("aLIGO")
    c = CoatingParams()
    s1 = thermal_psd(10.0, preset, c.replace(temperature=100.0))
    s2 = thermal_psd(10.0, preset, c.replace(temperature=300.0))
    assert s2 / s1 == pytest.approx(3.0, rel=1e-14)


def test_thermal_one_over_f():
    preset = get_preset("GP")
    f = np.array([1.0, 10.0, 100.0])
    s = thermal_psd(f, preset)
    np.testing.assert_allclose(s * f, s[0], rtol=1e-14)
    with pytest.raises(ValueError):
        coating_displacement_psd(0.0, CoatingParams(), 0.05, 1.064e-6)


def test_thermal_only_in_mirror_channel():
    force = thermal_force(get_preset("aLIGO"))
    x = np.array([0.3, 0.75])
    quiet = forcing_cross_spectrum(x, BASELINE_PARAMS)
    hot = forcing_cross_spectrum(x, BASELINE_PARAMS, force)
    diff = hot - quiet
    np.testing.assert_array_equal(diff[:, 0, :], 0)
    np.testing.assert_array_equal(diff[:, :, 0], 0)
    np.testing.assert_allclose(diff[:, 1, 1].real, x**4 * force.psd(x), rtol=1e-14)


def test_thermal_frequency_bridge():
    force = thermal_force(get_preset("aLIGO"))
    phys = force.closed.physical
    x = 0.75
    assert force.hertz(x) == pytest.approx(
        x * math.hypot(phys.relaxation_rate, phys.detuning) / math.sqrt(2) / (2 * math.pi))
    assert force.psd(0.0) == 0.0


def test_xi_frozen_and_ordered():
    # values under the documented closure (A = 0.9, g = 0.1, alpha = 0.1, P = 2 x arm power)
    frozen = {"aLIGO": 1.40999, "ET": 0.299636, "GP": 4.62775, "AEI": 2.91530, "Gingin": 6.58645}
    got = {n: xi_factor(p).xi for n, p in builtin_presets().items()}
    for name, value in frozen.items():
        assert got[name] == pytest.approx(value, rel=1e-4)
    assert got["Gingin"] > got["GP"] > got["AEI"] > got["aLIGO"] > got["ET"]


def test_xi_monotone_in_temperature_and_beam():
    preset = get_preset("aLIGO")
    xs = [xi_factor(preset.replace(temperature=t)).xi for t in (100.0, 200.0, 300.0)]
    assert xs[0] < xs[1] < xs[2]
    # xi^2 is linear in T
    assert (xs[2] / xs[0]) ** 2 == pytest.approx(3.0, rel=1e-12)
    ws = [xi_factor(preset.replace(beam_radius=w)).xi for w in (0.02, 0.05, 0.1)]
    assert ws[0] > ws[1] > ws[2]


def test_coating_validation():
    with pytest.raises(ValueError):
        CoatingParams(poisson_1=0.6)
    with pytest.raises(ValueError):
        CoatingParams(loss_1=-1.0)
