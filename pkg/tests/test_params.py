import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from optosqueeze.params import (
    G_MAX,
    HBAR,
    BASELINE_PARAMS,
    SPEED_OF_LIGHT,
    ClosureError,
    DimensionlessParams,
    ModulationParams,
    ParameterError,
    PhysicalParams,
    characteristic_coefficients,
    characteristic_polynomial,
    close_parameters,
    close_to_targets,
    system_matrix,
    to_dimensionless,
)


def closed_form_detuning(L, mu, P, lam, A, g):
    # with Gamma = Delta q / sqrt(1 - q^2):  A = 2 (1 - q^2) sqrt(2 P w0 / (mu L c)) Delta^(-3/2)
    q = g / G_MAX
    w0 = 2 * math.pi * SPEED_OF_LIGHT / lam
    delta = (2 * (1 - q * q) * math.sqrt(2 * P * w0 / (mu * L * SPEED_OF_LIGHT)) / A) ** (2 / 3)
    return q / math.sqrt(1 - q * q) * delta, delta


def test_baseline_params():
    assert (BASELINE_PARAMS.A, BASELINE_PARAMS.g, BASELINE_PARAMS.alpha) == (0.9, 0.1, 0.1)


@pytest.mark.parametrize("kw", [dict(A=-0.1), dict(g=0.0), dict(g=G_MAX), dict(alpha=-1e-3),
                                dict(kappa=0.0), dict(A=float("nan"))])
def test_dimensionless_validation(kw):
    base = dict(A=0.9, g=0.1, alpha=0.1)
    base.update(kw)
    with pytest.raises(ParameterError):
        DimensionlessParams(**base)


def test_zero_coupling_allowed():
    assert DimensionlessParams(0.0, 0.1, 0.1).A == 0.0


def test_physical_validation():
    with pytest.raises(ParameterError, match="detuning"):
        PhysicalParams(4e3, 10, 1e4, 1.064e-6, 100.0, -5.0)
    with pytest.raises(ParameterError):
        PhysicalParams(4e3, -10, 1e4, 1.064e-6, 100.0, 5.0)
    with pytest.raises(ParameterError):
        ModulationParams(depth=-0.1)


def test_determinant_matches_polynomial(rng):
    dp = BASELINE_PARAMS.replace(A=0.7, g=0.3, alpha=0.05)
    x = rng.normal(size=20) + 1j * rng.normal(size=20)
    m = system_matrix(x, dp)
    det = m[:, 0, 0] * m[:, 1, 1] - m[:, 0, 1] * m[:, 1, 0]
    np.testing.assert_allclose(det, characteristic_polynomial(x, dp), rtol=1e-13, atol=1e-13)


def test_coefficients_frozen():
    np.testing.assert_allclose(characteristic_coefficients(BASELINE_PARAMS),
                               [1, 0.1j, -2, -0.09j, 0.81], rtol=1e-15)


def test_frequency_scale():
    phys = PhysicalParams(4e3, 10, 1e4, 1.064e-6, 3.0, 4.0)
    assert phys.frequency_scale == pytest.approx(5 / math.sqrt(2))


def test_closure_matches_closed_form():
    args = (4e3, 10.0, 1e4, 1.064e-6)
    gamma, delta = close_parameters(*args, 0.9, 0.1)
    g_ref, d_ref = closed_form_detuning(*args, 0.9, 0.1)
    assert delta == pytest.approx(d_ref, rel=1e-12)
    assert gamma == pytest.approx(g_ref, rel=1e-12)


def test_closure_frozen_aligo():
    # aLIGO equivalent cavity (2 x 5 kW): Gamma = 8.636 s^-1, Delta = 244.1 s^-1
    gamma, delta = close_parameters(4e3, 10.0, 1e4, 1.064e-6, 0.9, 0.1)
    assert gamma == pytest.approx(8.636, rel=1e-3)
    assert delta == pytest.approx(244.1, rel=1e-3)


@settings(max_examples=40, deadline=None)
@given(A=st.floats(0.05, 3.0), g=st.floats(0.01, 2.5),
       L=st.floats(1.0, 1e4), mu=st.floats(1e-3, 100.0), P=st.floats(1.0, 1e5))
def test_closure_round_trip(A, g, L, mu, P):
    gamma, delta = close_parameters(L, mu, P, 1.064e-6, A, g)
    dp = to_dimensionless(PhysicalParams(L, mu, P, 1.064e-6, gamma, delta))
    assert dp.A == pytest.approx(A, rel=1e-9)
    assert dp.g == pytest.approx(g, rel=1e-9)


def test_closure_errors():
    with pytest.raises(ParameterError):
        close_parameters(4e3, 10, 1e4, 1.064e-6, 0.9, 3.0)
    with pytest.raises(ParameterError):
        close_parameters(4e3, 10, 1e4, 1.064e-6, -1.0, 0.1)
    with pytest.raises(ClosureError):
        close_parameters(4e3, 10, 1e4, 1.064e-6, 0.9, 0.1, max_iter=0)


def test_feedback_gain_closure():
    closed = close_to_targets(4e3, 10.0, 1e4, 1.064e-6, 0.9, 0.1, 0.1)
    assert closed.dimensionless.alpha == pytest.approx(0.1, rel=1e-12)
    phys = closed.physical
    assert closed.dimensionless.kappa == pytest.approx(
        math.sqrt(phys.relaxation_rate * phys.arm_length / SPEED_OF_LIGHT))
    assert HBAR > 0
