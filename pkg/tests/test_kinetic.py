import numpy as np
import pytest
from hypothesis import given, strategies as st

from align_kinetics.errors import EquilibriumMismatchError, InvalidInputError, StabilityError
from align_kinetics.kinetic import (
    AxisymState,
    discrete_critical_density,
    discrete_equilibrium_kappa,
    dissipation,
    flux,
    perturbed_uniform,
    relax_and_fit,
    step,
    weighted_distance,
)
from align_kinetics.quadrature import ThetaGrid, order_parameter
from align_kinetics.spectrum import RateKind

N = 200


def test_uniform_has_zero_flux():
    assert abs(flux(AxisymState.uniform(3, N))) < 1e-15


def test_vmf_flux_is_order_parameter():
    assert flux(AxisymState.vmf(3, 2.0, 800)) == pytest.approx(order_parameter(2.0, 3), abs=1e-5)


def test_narrow_peak_flux_tends_to_one():
    widths = (0.3, 0.1, 0.03)
    J = [flux(AxisymState.from_function(3, lambda t, w=w: np.exp(-(t / w) ** 2), 2000)) for w in widths]
    assert J[0] < J[1] < J[2] and J[2] > 0.999


def test_uniform_is_stationary_below_threshold():
    s = AxisymState.uniform(3, N)
    for _ in range(50):
        s = step(s, 2.0, 0.01)
    assert np.max(np.abs(s.g_values - 1.0)) < 1e-12


def test_discrete_vmf_is_stationary():
    grid = ThetaGrid(3, N)
    k = discrete_equilibrium_kappa(4.0, grid)
    s0 = AxisymState.vmf(3, k, N)
    s = s0
    for _ in range(1000):
        s = step(s, 4.0, 1e-3)
    assert weighted_distance(s, s0.g_values) < 1e-10


def test_single_step_contracts_at_linear_rate():
    s0 = perturbed_uniform(3, 1e-4, 400)
    dt = 1e-3
    s1 = step(s0, 2.0, dt)
    assert flux(s1) / flux(s0) == pytest.approx(1 - 2 / 3 * dt, abs=1e-5)


@given(
    st.integers(2, 5),
    st.floats(min_value=0.0, max_value=12.0),
    st.lists(st.floats(min_value=-0.5, max_value=0.5), min_size=3, max_size=3),
)
def test_mass_conserved_and_dissipation_nonpositive(n, rho, coef):
    a, b, c = coef
    s = AxisymState.from_function(n, lambda t: 1 + a * np.cos(t) + b * np.cos(2 * t) + c * np.sin(3 * t) ** 2, 80)
    assert dissipation(s, rho) <= 1e-14
    dt = min(1e-2, 0.9 / max(rho, 1.0))
    s1 = s
    for _ in range(5):
        s1 = step(s1, rho, dt)
    assert s1.mass == pytest.approx(s.mass, abs=1e-13)
    assert np.all(s1.g_values >= 0)


def test_stability_limit():
    with pytest.raises(StabilityError) as info:
        step(AxisymState.uniform(3, N), 4.0, 0.5)
    assert info.value.max_dt == pytest.approx(0.25)


def test_negative_state_rejected():
    g = ThetaGrid(3, 10)
    with pytest.raises(InvalidInputError):
        AxisymState(g, -np.ones(10))


def test_discrete_critical_density_close_to_n():
    rc = discrete_critical_density(ThetaGrid(3, 400))
    assert abs(rc - 3) < 1e-4
    assert abs(discrete_critical_density(ThetaGrid(3, 800)) - 3) < abs(rc - 3)


def test_disordered_relaxation_rate():
    r = relax_and_fit(3, 2.0, perturbed_uniform(3, 0.1, N), 4.0, 1e-3, record_every=20)
    assert r.kind is RateKind.EXPONENTIAL_GLOBAL
    assert r.value == pytest.approx(2 / 3, rel=0.02)
    assert r.mass_drift < 1e-13
    assert np.all(r.dissipation <= 0)


def test_zero_flux_relaxation():
    r = relax_and_fit(3, 2.0, perturbed_uniform(3, 0.1, N, degree=2), 1.5, 1e-3, record_every=10)
    assert r.kind is RateKind.HEAT_MODE
    assert r.value == pytest.approx(6.0, rel=0.02)


def test_mismatched_reference_raises():
    # the reference points along +axis; negative initial flux grows toward
    # the mirrored equilibrium, so the distance to the reference increases
    s = AxisymState.from_function(3, lambda t: 1 - 1e-3 * np.cos(t), N)
    with pytest.raises(EquilibriumMismatchError):
        relax_and_fit(3, 4.0, s, 4.0, 1e-2, window=(0.0, 1.0))


def test_rows_match_columns():
    r = relax_and_fit(3, 2.0, perturbed_uniform(3, 0.1, 60), 0.2, 1e-2)
    assert len(r.rows()[0]) == 4
    assert len(r.rows()) == r.times.size
