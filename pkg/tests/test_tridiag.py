import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp
from scipy.linalg import eigvalsh_tridiagonal

from align_kinetics.tridiag import (
    TridiagonalSystem,
    bisect_eigenvalue,
    inverse_iteration,
    solve_cyclic,
    sturm_count,
    thomas_solve,
)

sizes = st.integers(min_value=3, max_value=40)


def _dominant(rng, m):
    lo = rng.uniform(-1, 1, m - 1)
    up = rng.uniform(-1, 1, m - 1)
    d = 3.0 + rng.uniform(0, 1, m)
    return lo, d, up


@given(sizes, st.integers(0, 2**32 - 1))
def test_thomas_matches_dense(m, seed):
    rng = np.random.default_rng(seed)
    lo, d, up = _dominant(rng, m)
    rhs = rng.standard_normal(m)
    dense = np.diag(d) + np.diag(up, 1) + np.diag(lo, -1)
    assert np.allclose(thomas_solve(lo, d, up, rhs), np.linalg.solve(dense, rhs), atol=1e-12)


def test_thomas_batched():
    rng = np.random.default_rng(1)
    m, b = 12, 5
    # batch axes trail the system axis
    lo, d, up = (np.stack(x, axis=1) for x in zip(*[_dominant(rng, m) for _ in range(b)]))
    rhs = rng.standard_normal((m, b))
    out = thomas_solve(lo, d, up, rhs)
    for k in range(b):
        dense = np.diag(d[:, k]) + np.diag(up[:, k], 1) + np.diag(lo[:, k], -1)
        assert np.allclose(out[:, k], np.linalg.solve(dense, rhs[:, k]))


@given(sizes, st.integers(0, 2**32 - 1))
def test_cyclic_matches_dense(m, seed):
    rng = np.random.default_rng(seed)
    lo, d, up = _dominant(rng, m)
    clo, chi = rng.uniform(-1, 1, 2)
    rhs = rng.standard_normal(m)
    dense = np.diag(d) + np.diag(up, 1) + np.diag(lo, -1)
    dense[-1, 0] = clo
    dense[0, -1] = chi
    assert np.allclose(solve_cyclic(lo, d, up, clo, chi, rhs), np.linalg.solve(dense, rhs), atol=1e-11)


@given(hnp.arrays(float, st.integers(2, 30), elements=st.floats(-5, 5)), st.integers(0, 2**32 - 1))
def test_bisection_matches_lapack(d, seed):
    off = np.random.default_rng(seed).uniform(-2, 2, d.size - 1)
    ref = eigvalsh_tridiagonal(d, off)
    for k in (0, d.size // 2, d.size - 1):
        assert bisect_eigenvalue(d, off, k) == pytest.approx(ref[k], abs=1e-10)


def test_sturm_count_brackets():
    d = np.array([1.0, 2.0, 3.0])
    off = np.zeros(2)
    assert sturm_count(d, off**2, 2.5) == 2
    assert sturm_count(d, off**2, 0.0) == 0


def test_identity_like_system():
    d = np.full(6, 2.5)
    off = np.zeros(5)
    assert bisect_eigenvalue(d, off, 0) == pytest.approx(2.5)


def test_inverse_iteration_vector():
    m = 50
    d = np.full(m, 2.0)
    off = np.full(m - 1, -1.0)
    lam = bisect_eigenvalue(d, off, 0)
    x = inverse_iteration(d, off, lam)
    T = np.diag(d) + np.diag(off, 1) + np.diag(off, -1)
    assert np.linalg.norm(T @ x - lam * x) < 1e-9 * np.linalg.norm(x)


def test_system_symmetrization():
    rng = np.random.default_rng(3)
    w = rng.uniform(0.5, 2.0, 8)
    b = rng.uniform(0.1, 1.0, 7)  # symmetric part
    up = b / w[:-1]
    lo = b / w[1:]
    s = TridiagonalSystem(rng.uniform(1, 2, 8), up, lo, weights=w)
    assert s.symmetry_defect() < 1e-14
    d, off = s.symmetrized()
    assert np.allclose(np.sort(np.linalg.eigvals(s.to_dense()).real), eigvalsh_tridiagonal(d, off))
