import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from align_kinetics.asymptotics import theta_c_large_limit
from align_kinetics.errors import HyperbolicityLossError, InvalidInputError, ValidityLossError
from align_kinetics.gci import closure_coefficients
from align_kinetics.macro import (
    CoefficientTable,
    DiffusionState1D,
    HydroState1D,
    Region,
    characteristic_speeds,
    classify_point,
    correction_field,
    diffusion_mode_rate,
    diffusion_step,
    hydro_step_1d,
    max_hydro_dt,
    quasilinear_matrix,
    region_map,
    run_hydro,
    tangent_criterion,
)


@pytest.fixture(scope="module")
def table3():
    return CoefficientTable(3, rho_min=3.2, rho_max=12.0, points=300, N=1500)


# ---------------------------------------------------------------- diffusion


def _periodic_state(cells, rho_fn, n=3, eps=1.0, L=2 * math.pi):
    x = (np.arange(cells) + 0.5) * L / cells
    return DiffusionState1D(rho_fn(x), L / cells, n, eps)


def test_constant_density_is_stationary():
    s = _periodic_state(32, lambda x: np.full_like(x, 1.5))
    for _ in range(10):
        s = diffusion_step(s, 0.1)
    assert np.max(np.abs(s.rho - 1.5)) < 1e-14


def test_diffusion_conserves_mass():
    s = _periodic_state(64, lambda x: 1 + 0.5 * np.sin(x) + 0.2 * np.cos(3 * x))
    m0 = s.mass
    for _ in range(1000):
        s = diffusion_step(s, 1e-2)
    assert abs(s.mass - m0) <= 1e-12


def test_mode_decay_rate():
    s = _periodic_state(128, lambda x: 1 + 1e-4 * np.cos(x))
    dt, T = 1e-3, 1.0
    amp0 = np.max(s.rho) - 1
    for _ in range(int(T / dt)):
        s = diffusion_step(s, dt)
    measured = -math.log((np.max(s.rho) - 1) / amp0) / T
    assert measured == pytest.approx(diffusion_mode_rate(3, 1.0, 1.0), rel=0.05)
    assert diffusion_mode_rate(3, 1.0, 1.0) == pytest.approx(0.25)


def _manufactured_error(cells, n=3, eps=1.0):
    a = 0.4
    rho = lambda x: 1 + a * np.sin(x)
    rx = lambda x: a * np.cos(x)
    rxx = lambda x: -a * np.sin(x)
    # steady exact solution of rho_t = (eps/(n-1)) (rho_x/(n-rho))_x + s
    src = lambda x, t: -eps / (n - 1) * (rxx(x) / (n - rho(x)) + rx(x) ** 2 / (n - rho(x)) ** 2)
    s = _periodic_state(cells, lambda x: np.ones_like(x), n, eps)
    for _ in range(400):
        s = diffusion_step(s, 0.5, source=src)
    return math.sqrt(np.mean((s.rho - rho(s.x)) ** 2))


def test_manufactured_second_order():
    e1, e2 = _manufactured_error(32), _manufactured_error(64)
    assert e1 / e2 == pytest.approx(4.0, abs=0.4)


def test_validity_loss_near_threshold():
    s = _periodic_state(16, lambda x: np.full_like(x, 2.9))
    with pytest.raises(ValidityLossError):
        diffusion_step(s, 0.01)


def test_correction_vanishes_for_constant():
    s = _periodic_state(16, lambda x: np.full_like(x, 1.0))
    assert np.all(correction_field(s) == 0)


# ---------------------------------------------------------------- hyperbolicity


def test_speeds_along_axis():
    co = closure_coefficients(3, 4.0)
    sp = characteristic_speeds(co, 0.0)
    assert sorted(sp.speeds) == pytest.approx(sorted([co.gamma, co.c_tilde]), abs=1e-12)
    A = quasilinear_matrix(co, 0.0)
    assert A[1, 0] == pytest.approx(0.0, abs=1e-15)


def test_perpendicular_direction_is_not_hyperbolic():
    co = closure_coefficients(3, 4.0)
    sp = characteristic_speeds(co, math.pi / 2)
    assert not sp.hyperbolic
    assert sp.discriminant == pytest.approx(4 * co.lam * co.c, rel=1e-12)


@given(st.floats(min_value=2.2, max_value=20.0), st.floats(min_value=0.0, max_value=math.pi / 2))
def test_discriminant_sign_matches_tangent_rule(rho, theta):
    co = closure_coefficients(2, rho, N=1000)
    sp = characteristic_speeds(co, theta)
    if abs(sp.discriminant) > 1e-6:
        assert (sp.discriminant > 0) == tangent_criterion(co, theta)


def test_speeds_are_matrix_eigenvalues():
    co = closure_coefficients(3, 6.0)
    sp = characteristic_speeds(co, 0.4)
    ev = np.sort(np.linalg.eigvals(quasilinear_matrix(co, 0.4)).real)
    assert np.allclose(np.sort(sp.speeds), ev, atol=1e-12)


# ---------------------------------------------------------------- region map


def test_region_examples():
    m = region_map(2, (10.0, 10.0), (0.0, 0.0), rho_cells=1, theta_cells=1)
    assert m.labels[0, 0] is Region.ORDERED_HYPERBOLIC
    m = region_map(2, (10.0, 10.0), (math.pi / 2, math.pi / 2), rho_cells=1, theta_cells=1)
    assert m.labels[0, 0] is Region.ORDERED_NON_HYPERBOLIC
    assert classify_point(2, 1.0, 0.3, math.inf, 0.01) is Region.DISORDERED_DIFFUSION
    assert classify_point(2, 2.005, 0.3, 1.0, 0.01) is Region.BUFFER


def test_region_map_wedge():
    m = region_map(2, (0.0, 40.0), rho_cells=40, theta_cells=90)
    ordered = m.rho > 2 + m.buffer
    edges = []
    for i in np.flatnonzero(ordered):
        hyp = np.array([lab is Region.ORDERED_HYPERBOLIC for lab in m.labels[i]])
        # a single wedge: hyperbolic cells come first, then none
        k = int(np.argmin(hyp)) if not hyp.all() else hyp.size
        assert hyp[:k].all() and not hyp[k:].any()
        edges.append(m.theta[k - 1])
    edges = np.array(edges)
    r = m.rho[ordered]
    # the critical angle falls from pi/2, dips slightly under its large-density
    # limit near rho = 8 and then creeps back up to it
    assert np.all(np.diff(edges[r < 6]) <= 1e-12)
    assert np.all(np.abs(edges[r > 10] - theta_c_large_limit(2)) < 0.03)
    assert all(lab is Region.DISORDERED_DIFFUSION for lab in m.labels[0])
    assert len(m.rows()) == 40 * 90


def test_region_map_rejects_empty_range():
    with pytest.raises(InvalidInputError):
        region_map(2, (5.0, 1.0))


# ---------------------------------------------------------------- table and hydro


def test_table_matches_direct_solve(table3):
    co = closure_coefficients(3, 5.37, N=1500)
    v = table3(5.37)
    assert float(v["lam"]) == pytest.approx(co.lam, rel=1e-6)
    assert float(v["c_tilde"]) == pytest.approx(co.c_tilde, rel=1e-7)


def test_table_range(table3):
    with pytest.raises(HyperbolicityLossError):
        table3(3.1)


def test_uniform_hydro_state_is_stationary(table3):
    s = HydroState1D.uniform(3, 50, 10.0, 5.0, 0.0)
    for _ in range(20):
        s = hydro_step_1d(s, table3, 0.5 * max_hydro_dt(s, table3))
    assert np.max(np.abs(s.rho - 5.0)) < 1e-13
    assert np.max(np.abs(s.u - 1.0)) < 1e-13


def test_hydro_refuses_non_hyperbolic_cell(table3):
    s = HydroState1D.uniform(3, 20, 10.0, 6.0, 0.3)
    u = s.u.copy()
    u[7] = math.cos(1.45)
    bad = HydroState1D(s.rho, u, s.v, s.dx)
    with pytest.raises(HyperbolicityLossError) as info:
        hydro_step_1d(bad, table3, 1e-3)
    assert 7 in info.value.cells


def test_hydro_conserves_mass(table3):
    s = HydroState1D.uniform(3, 100, 10.0, 6.0, 0.2)
    s = HydroState1D(s.rho + 0.1 * np.exp(-((s.x - 5) ** 2)), s.u, s.v, s.dx)
    m0 = s.mass
    s = run_hydro(s, table3, 1.0)
    assert s.mass == pytest.approx(m0, rel=1e-13)


def test_transverse_direction_advects(table3):
    rho0, theta0, L, cells = 6.0, 0.3, 20.0, 800
    s = HydroState1D.uniform(3, cells, L, rho0, theta0)
    phi = 0.05 * np.exp(-0.5 * ((s.x - 5.0) / 0.8) ** 2)
    s = HydroState1D(s.rho, s.u, np.stack([np.cos(phi), np.sin(phi)], axis=1), s.dx)
    centroid = lambda st: float(np.sum(st.x * np.arctan2(st.v[:, 1], st.v[:, 0])) / np.sum(np.arctan2(st.v[:, 1], st.v[:, 0])))
    x0 = centroid(s)
    s = run_hydro(s, table3, 4.0)
    speed = (centroid(s) - x0) / s.time
    co = table3.coefficients(rho0)
    assert speed == pytest.approx(co.c_tilde * math.cos(theta0), rel=0.05)
