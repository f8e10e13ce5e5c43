import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import eigvalsh_tridiagonal

from align_kinetics.errors import InvalidInputError
from align_kinetics.gci import assemble_matrix_A
from align_kinetics.spectrum import (
    RateKind,
    assemble_matrix_B,
    convergence_rate,
    poincare_constant,
    sign_changes,
    smallest_eigenvalue,
    spectral_diagnostics,
)
from align_kinetics.tridiag import TridiagonalSystem


@given(st.integers(2, 6), st.floats(min_value=0.0, max_value=30.0))
def test_constants_in_kernel(n, k):
    B = assemble_matrix_B(n, k, 100)
    scale = np.max(np.abs(B.diag))
    assert np.max(np.abs(B.matvec(np.ones(100)))) <= 1e-13 * scale


@given(st.integers(2, 6), st.floats(min_value=0.0, max_value=15.0))
def test_neumann_symmetrizable(n, k):
    assert assemble_matrix_B(n, k, 100).symmetry_defect() < 1e-10


def test_symmetrized_spectrum_matches_dense():
    B = assemble_matrix_B(3, 2.0, 100)
    d, off = B.symmetrized()
    dense = np.sort(np.linalg.eigvals(B.to_dense()).real)
    assert np.allclose(eigvalsh_tridiagonal(d, off), dense, atol=1e-8 * np.max(np.abs(dense)))


def test_neumann_gap_at_zero_concentration():
    vals = [smallest_eigenvalue(assemble_matrix_B(3, 0.0, N), exclude_null=True)[0] for N in (150, 300)]
    assert vals[1] == pytest.approx(2.0, abs=1e-3)
    assert abs(vals[1] - 2) < abs(vals[0] - 2)


def test_dirichlet_laplacian():
    # n = 2, kappa = 0: -g'' on (0, pi) with Dirichlet data
    lam, vec = smallest_eigenvalue(assemble_matrix_A(2, 0.0, 300))
    assert lam == pytest.approx(1.0, abs=1e-4)
    th = np.linspace(0, math.pi, 301)[1:-1]
    ref = np.sin(th) / np.linalg.norm(np.sin(th))
    assert np.allclose(vec / np.linalg.norm(vec), ref, atol=1e-8)


def test_identity_like():
    s = TridiagonalSystem(np.full(5, 3.0), np.zeros(4), np.zeros(4))
    lam, vec = smallest_eigenvalue(s)
    assert lam == pytest.approx(3.0)
    assert np.count_nonzero(np.abs(vec) > 1e-12) >= 1


def test_bad_weights_rejected():
    B = assemble_matrix_B(3, 1.0, 50)
    with pytest.raises(InvalidInputError):
        smallest_eigenvalue(B, weights=np.ones(50))


def test_poincare_at_zero():
    assert poincare_constant(3, 0.0).poincare == pytest.approx(2.0, abs=1e-3)


@pytest.mark.parametrize("k", [0.5, 1.0, 2.0, 5.0])
def test_two_dimensional_modes_coincide(k):
    s = poincare_constant(2, k)
    assert s.lambda_0 == pytest.approx(s.lambda_1, rel=1e-3)
    assert spectral_diagnostics(s).transform_residual < 1e-6


def test_strong_alignment_scaling():
    s = poincare_constant(3, 20.0)
    assert 0.8 <= s.lambda_1 / 20.0 <= 1.2


def test_lower_bound():
    for k in (0.5, 2.0, 6.0):
        s = poincare_constant(3, k, 200)
        assert s.poincare >= s.lower_bound


def test_eigenvector_shapes():
    s = poincare_constant(3, 1.0)
    diag = spectral_diagnostics(s)
    assert diag.dirichlet_sign_changes == 0
    assert np.all(s.eigvec_dirichlet > 0)
    assert diag.neumann_sign_changes == 1


def test_sign_changes_helper():
    assert sign_changes([1, 2, -1, -3, 4]) == 2
    assert sign_changes([1e-20, 1, 1]) == 0


def test_rate_below_threshold():
    r = convergence_rate(3, 2.0)
    assert r.kind is RateKind.EXPONENTIAL_GLOBAL
    assert r.rate == pytest.approx(2 / 3, abs=1e-15)


def test_rate_zero_flux():
    r = convergence_rate(3, 2.0, zero_flux_initial=True)
    assert r.kind is RateKind.HEAT_MODE and r.rate == 6.0


def test_rate_threshold_and_above():
    assert convergence_rate(3, 3.0).kind is RateKind.ALGEBRAIC_HALF
    assert convergence_rate(3, 3.0).rate == 0.0
    rho = 3 + 1e-3
    r = convergence_rate(3, rho)
    assert r.kind is RateKind.EXPONENTIAL_ASYMPTOTIC
    assert r.rate == pytest.approx(2 * 2 * (rho / 3 - 1), rel=0.1)


def test_rate_scales_with_eps():
    assert convergence_rate(3, 5.0, eps=0.5).rate == pytest.approx(2 * convergence_rate(3, 5.0).rate)


def test_rate_input_validation():
    with pytest.raises(InvalidInputError):
        convergence_rate(3, -1.0)
    with pytest.raises(InvalidInputError):
        convergence_rate(3, 1.0, eps=0.0)
