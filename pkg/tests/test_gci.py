import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from align_kinetics.errors import InvalidInputError
from align_kinetics.gci import (
    assemble_matrix_A,
    c_tilde,
    closure_coefficients,
    closure_coefficients_at_kappa,
    gamma_finite_difference,
    lambda_from_dkappa,
    solve_gci,
    theta_c_both_forms,
)
from align_kinetics.quadrature import ThetaGrid


@pytest.mark.parametrize("n", [2, 3, 5])
def test_zero_concentration_entries(n):
    N = 60
    A = assemble_matrix_A(n, 0.0, N)
    th = ThetaGrid(n, N).nodes[1:-1]
    s = N**2 / math.pi**2
    assert np.allclose(A.upper, -s)
    assert np.allclose(A.lower, -s)
    ref = (n - 2) / (2 * np.sin(th) ** 2) * (1 + (n - 2) / 2 * np.cos(th) ** 2) + 2 * s
    assert np.allclose(A.diag, ref, rtol=1e-13)


def test_two_dimensional_diagonal():
    N, k = 40, 1.3
    A = assemble_matrix_A(2, k, N)
    g = ThetaGrid(2, N)
    th = g.nodes[1:-1]
    e = lambda t: np.exp(k * np.cos(t))
    h = g.h
    ref = (e(th - h / 2) + e(th + h / 2)) / e(th) * N**2 / math.pi**2
    # the potential term vanishes at n = 2; the drift contribution is -(n-2)/2 kappa cos = 0
    assert np.allclose(A.diag, ref, rtol=1e-12)


@given(st.integers(2, 6), st.floats(min_value=0.0, max_value=20.0))
def test_symmetrizable(n, k):
    A = assemble_matrix_A(n, k, 80)
    assert A.symmetry_defect() < 1e-10


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("k", [0.5, 1.0, 5.0])
def test_solution_positive_and_matches_dense(n, k):
    sol = solve_gci(n, k, 200)
    assert np.all(sol.f_values > 0)
    A = assemble_matrix_A(n, k, 200)
    rhs = np.sin(sol.grid.nodes[1:-1]) ** (n / 2)
    assert np.allclose(sol.f_values, np.linalg.solve(A.to_dense(), rhs), rtol=1e-10)
    full = sol.full_values
    assert full[0] == 0.0 and full[-1] == 0.0


def test_second_order_in_theta():
    # values at a fixed node theta = pi/2 on nested grids
    vals = [solve_gci(3, 1.0, N).f_values[N // 2 - 1] for N in (100, 200, 400)]
    ratio = (vals[0] - vals[1]) / (vals[1] - vals[2])
    assert ratio == pytest.approx(4.0, abs=0.3)


def test_kappa_must_be_positive():
    with pytest.raises(InvalidInputError):
        solve_gci(3, 0.0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_c_tilde_small_kappa(n):
    k = 0.05
    ref = (2 * n - 1) * k / (2 * n * (n + 2))
    assert c_tilde(k, n) == pytest.approx(ref, rel=0.01)


def test_c_tilde_vectorized():
    ks = np.array([0.5, 2.0, 8.0])
    assert np.allclose(c_tilde(ks, 3), [c_tilde(float(k), 3) for k in ks], rtol=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_near_threshold_coefficients(n):
    d = 1e-4
    co = closure_coefficients(n, n + d)
    assert co.c_tilde == pytest.approx((2 * n - 1) / (2 * n * math.sqrt(n + 2)) * math.sqrt(d), rel=0.05)
    assert co.lam == pytest.approx(-1 / (4 * math.sqrt(n + 2) * math.sqrt(d)), rel=0.05)
    assert abs(co.theta_c - math.pi / 2) < 0.02


def test_gamma_identity_matches_finite_difference():
    co = closure_coefficients(3, 5.0)
    assert co.gamma == pytest.approx(gamma_finite_difference(3, 5.0), rel=1e-5)


def test_lambda_identity_matches_kappa_derivative_form():
    co = closure_coefficients(3, 5.0)
    assert co.lam == pytest.approx(lambda_from_dkappa(3, 5.0), rel=1e-4)


def test_theta_c_forms_agree():
    forms = theta_c_both_forms(3, 6.0)
    assert forms["closed_form"] == pytest.approx(forms["finite_difference"], rel=1e-5)


@given(st.integers(2, 4), st.floats(min_value=1.1, max_value=10.0))
def test_lambda_negative_and_compatible(n, factor):
    co = closure_coefficients(n, n * factor, N=1000)
    assert co.lam < 0
    assert co.compatibility_residual < 1e-9
    assert 0 < co.theta_c < math.pi / 2


def test_parametrizations_agree():
    co = closure_coefficients(3, 4.0)
    alt = closure_coefficients_at_kappa(3, co.kappa)
    assert alt.rho == pytest.approx(4.0, rel=1e-10)
    assert alt.lam == pytest.approx(co.lam, rel=1e-8)


def test_subcritical_rejected():
    with pytest.raises(InvalidInputError):
        closure_coefficients(3, 2.5)
