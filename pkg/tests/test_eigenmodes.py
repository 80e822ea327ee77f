import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optosqueeze.eigenmodes import (
    DegenerateRootsWarning,
    ModeNormalizationWarning,
    NearCollinearError,
    NotARootError,
    characteristic_roots,
    companion_matrix,
    compute_modes,
    critical_modulation,
    dual_basis,
    epsilon_matrix,
    mode_vector,
)
from optosqueeze.params import BASELINE_PARAMS, DimensionlessParams, ModulationParams, system_matrix

# frozen roots at A = 0.9, g = 0.1, alpha = 0.1
S1 = 0.7518498224 - 0.01929691001j
S2 = 1.196259543 - 0.03070308999j


def test_companion_eigenvalues():
    coeffs = np.poly([1.0, 2.0, 3.0 + 1j])
    np.testing.assert_allclose(np.sort_complex(np.linalg.eigvals(companion_matrix(coeffs))),
                               np.sort_complex([1.0, 2.0, 3.0 + 1j]), atol=1e-12)


def test_baseline_roots(modes):
    assert modes[0].root == pytest.approx(S1, abs=1e-9)
    assert modes[1].root == pytest.approx(S2, abs=1e-9)
    assert modes.stable


def test_root_pair_symmetry(modes):
    roots = modes.roots
    for s in roots:
        assert np.min(np.abs(roots + np.conj(s))) < 1e-10


def test_mode_vectors(modes):
    dp = modes.params
    for m in modes.modes:
        assert np.linalg.norm(system_matrix(m.root, dp) @ m.mode_vector) < 1e-10
        assert np.linalg.norm(m.mode_vector) == pytest.approx(1.0)
        assert m.mode_vector[0].imag == 0 and m.mode_vector[0].real > 0
    # unconjugated biorthogonality
    gram = np.array([[modes[j].dual_vector @ modes[i].mode_vector for i in range(2)]
                     for j in range(2)])
    np.testing.assert_allclose(gram, np.eye(2), atol=1e-10)


def test_alpha_zero_unstable():
    modes = compute_modes(BASELINE_PARAMS.replace(alpha=0.0))
    assert not modes.stable
    assert modes[0].gamma < 0


@settings(max_examples=50, deadline=None)
@given(A=st.floats(0.05, 1.2), g=st.floats(0.01, 1.0))
def test_single_pump_always_unstable(A, g):
    # any positive coupling without feedback leaves one mode anti-damped
    assert not compute_modes(DimensionlessParams(A, g, 0.0)).stable


def test_not_a_root():
    with pytest.raises(NotARootError):
        mode_vector(0.5 + 0j, BASELINE_PARAMS)


def test_zero_optical_component_warns():
    # A = 0, alpha = 0: the mirror root x = 0 has a purely mechanical null vector
    dp = DimensionlessParams(0.0, 0.1, 0.0)
    s = np.roots([1, 0.1j, -2])[0]
    with pytest.warns(ModeNormalizationWarning):
        mode_vector(0j, dp)
    # while the free optical root has no mechanical part
    v = mode_vector(s, dp)
    assert abs(v[1]) < 1e-12


def test_collinear_error():
    with pytest.raises(NearCollinearError):
        dual_basis([1.0, 0.0], [1.0, 1e-12])


def test_degenerate_roots_warn():
    # at A = 0 the mechanical double root x = 0 is degenerate
    with pytest.warns(DegenerateRootsWarning):
        characteristic_roots(DimensionlessParams(0.0, 0.1, 0.1))


def test_critical_modulation(modes, phase):
    m_c = critical_modulation(modes)
    assert m_c[0] == pytest.approx(0.0154696481509, rel=1e-9)
    eps = epsilon_matrix(modes, ModulationParams(m_c[0], phase))
    assert eps[0, 0].real == pytest.approx(modes[0].gamma, rel=1e-12)
    assert abs(eps[0, 0].imag) < 1e-15


def test_epsilon_linear_in_depth(modes):
    e1 = epsilon_matrix(modes, ModulationParams(0.01, 0.3))
    e2 = epsilon_matrix(modes, ModulationParams(0.02, 0.3))
    np.testing.assert_allclose(e2, 2 * e1, rtol=1e-14)
    e3 = epsilon_matrix(modes, ModulationParams(0.01, 0.3 + np.pi))
    np.testing.assert_allclose(e3, -e1, atol=1e-15)


def test_quality_factor(modes):
    for m in modes.modes:
        assert m.quality == pytest.approx(m.omega / (2 * m.gamma))


def test_no_warnings_at_baseline_point():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        compute_modes(BASELINE_PARAMS)
