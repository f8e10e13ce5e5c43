"""Tridiagonal linear algebra: Thomas elimination, Sturm-sequence bisection,
inverse iteration, and a periodic (cyclic) solver for the 1-D PDE steppers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .errors import InvalidInputError, NumericalBreakdownError


@dataclass
class TridiagonalSystem:
    """Square tridiagonal matrix.

    ``upper[i]`` is entry (i, i+1) and ``lower[i]`` is entry (i+1, i).  When
    the matrix is diagonally similar to a symmetric one, ``weights`` holds
    positive w with ``upper[i] * w[i] == lower[i] * w[i+1]``.
    """

    diag: np.ndarray
    upper: np.ndarray
    lower: np.ndarray
    weights: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        self.diag = np.asarray(self.diag, dtype=float)
        self.upper = np.asarray(self.upper, dtype=float)
        self.lower = np.asarray(self.lower, dtype=float)
        if self.diag.shape[0] < 2:
            raise InvalidInputError("tridiagonal system needs size >= 2")
        if self.upper.shape[0] != self.size - 1 or self.lower.shape[0] != self.size - 1:
            raise InvalidInputError("off-diagonals must have size-1 entries")

    @property
    def size(self) -> int:
        return self.diag.shape[0]

    def matvec(self, x):
        x = np.asarray(x, dtype=float)
        y = self.diag * x
        y[:-1] += self.upper * x[1:]
        y[1:] += self.lower * x[:-1]
        return y

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.upper, 1) + np.diag(self.lower, -1)

    def solve(self, rhs):
        return thomas_solve(self.lower, self.diag, self.upper, rhs)

    def symmetry_defect(self, weights=None) -> float:
        """Max relative mismatch of ``upper*w[:-1]`` against ``lower*w[1:]``."""
        w = self.weights if weights is None else np.asarray(weights, dtype=float)
        if w is None:
            raise InvalidInputError("no symmetrizing weights available")
        a = self.upper * w[:-1]
        b = self.lower * w[1:]
        scale = np.maximum(np.abs(a), np.abs(b))
        scale[scale == 0] = 1.0
        return float(np.max(np.abs(a - b) / scale))

    def symmetrized(self, weights=None) -> tuple[np.ndarray, np.ndarray]:
        """Diagonal and off-diagonal of W^{1/2} A W^{-1/2}."""
        w = self.weights if weights is None else np.asarray(weights, dtype=float)
        if w is None:
            prod = self.upper * self.lower
            if np.any(prod < 0):
                raise InvalidInputError("matrix is not diagonally similar to a symmetric one")
            off = np.sign(self.upper) * np.sqrt(prod)
        else:
            if np.any(w <= 0):
                raise InvalidInputError("symmetrizing weights must be positive")
            off = self.upper * np.sqrt(w[:-1] / w[1:])
        return self.diag.copy(), off


def thomas_solve(lower, diag, upper, rhs):
    """Forward elimination / back substitution for a tridiagonal system.

    ``lower`` and ``upper`` have one entry fewer than ``diag`` along axis 0.
    Trailing axes are batch axes: all arrays broadcast against each other,
    so many systems of the same size can be solved in one pass.
    """
    lower = np.asarray(lower, dtype=float)
    diag = np.asarray(diag, dtype=float)
    upper = np.asarray(upper, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    m = diag.shape[0]
    batch = np.broadcast_shapes(lower.shape[1:], diag.shape[1:], upper.shape[1:], rhs.shape[1:])
    cp = np.empty((m - 1,) + batch)
    dp = np.empty((m,) + batch)
    piv = np.broadcast_to(diag[0], batch)
    if np.any(piv == 0):
        raise NumericalBreakdownError("zero pivot in row 0")
    cp[0] = upper[0] / piv
    dp[0] = rhs[0] / piv
    for i in range(1, m):
        piv = diag[i] - lower[i - 1] * cp[i - 1]
        if np.any(piv == 0):
            raise NumericalBreakdownError(f"zero pivot in row {i}")
        if i < m - 1:
            cp[i] = upper[i] / piv
        dp[i] = (rhs[i] - lower[i - 1] * dp[i - 1]) / piv
    x = dp
    for i in range(m - 2, -1, -1):
        x[i] = x[i] - cp[i] * x[i + 1]
    return x


def banded_solve(lower, diag, upper, rhs):
    """LAPACK banded solve with partial pivoting (used inside time steppers)."""
    m = len(diag)
    ab = np.zeros((3, m))
    ab[0, 1:] = upper
    ab[1] = diag
    ab[2, :-1] = lower
    return solve_banded((1, 1), ab, rhs, check_finite=False)


def solve_cyclic(lower, diag, upper, corner_lo, corner_hi, rhs):
    """Solve a periodic tridiagonal system by Sherman-Morrison.

    ``corner_hi`` is entry (0, m-1) and ``corner_lo`` entry (m-1, 0).
    """
    diag = np.asarray(diag, dtype=float).copy()
    m = len(diag)
    gamma = -diag[0]
    diag[0] -= gamma
    diag[-1] -= corner_lo * corner_hi / gamma
    u = np.zeros(m)
    u[0] = gamma
    u[-1] = corner_lo
    rhs2 = np.column_stack([rhs, u])
    sol = banded_solve(lower, diag, upper, rhs2)
    y, z = sol[:, 0], sol[:, 1]
    vy = y[0] + corner_hi / gamma * y[-1]
    vz = z[0] + corner_hi / gamma * z[-1]
    return y - z * (vy / (1.0 + vz))


def sturm_count(d, e2, x: float) -> int:
    """Number of eigenvalues strictly below x of the symmetric tridiagonal
    matrix with diagonal d and squared off-diagonal e2."""
    count = 0
    q = d[0] - x
    tiny = 1e-300
    if q < 0:
        count += 1
    for i in range(1, len(d)):
        if q == 0.0:
            q = tiny
        q = d[i] - x - e2[i - 1] / q
        if q < 0:
            count += 1
    return count


def bisect_eigenvalue(d, off, index: int, tol: float = 1e-13) -> float:
    """Eigenvalue number ``index`` (0-based, ascending) by Sturm bisection."""
    d = [float(v) for v in d]
    off = np.asarray(off, dtype=float)
    e2 = [float(v) for v in off * off]
    m = len(d)
    if not 0 <= index < m:
        raise InvalidInputError(f"eigenvalue index {index} out of range for size {m}")
    a = np.abs(np.concatenate([[0.0], off]))
    b = np.abs(np.concatenate([off, [0.0]]))
    radius = a + b
    lo = float(np.min(np.asarray(d) - radius))
    hi = float(np.max(np.asarray(d) + radius))
    span = hi - lo
    lo -= 1e-12 * span + 1e-300
    hi += 1e-12 * span + 1e-300
    for _ in range(400):
        mid = 0.5 * (lo + hi)
        if sturm_count(d, e2, mid) > index:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * max(abs(lo), abs(hi)) or hi - lo <= 1e-15 * span:
            break
    return 0.5 * (lo + hi)


def inverse_iteration(d, off, shift: float, deflate=None, max_iter: int = 60, tol: float = 1e-11):
    """Eigenvector of a symmetric tridiagonal matrix near ``shift``.

    ``deflate`` is an optional unit vector projected out at every iteration.
    """
    d = np.asarray(d, dtype=float)
    off = np.asarray(off, dtype=float)
    m = len(d)
    scale = max(float(np.max(np.abs(d))), 1.0)
    sigma = shift + 1e-10 * scale
    rng = np.random.default_rng(12345)
    x = rng.standard_normal(m)
    if deflate is not None:
        x -= deflate * np.dot(deflate, x)
    x /= np.linalg.norm(x)
    for it in range(max_iter):
        y = banded_solve(off, d - sigma, off, x)
        if deflate is not None:
            y -= deflate * np.dot(deflate, y)
        norm = np.linalg.norm(y)
        if not math.isfinite(norm) or norm == 0:
            raise NumericalBreakdownError("inverse iteration produced a degenerate vector")
        y /= norm
        if np.dot(y, x) < 0:
            y = -y
        change = float(np.linalg.norm(y - x))
        x = y
        if change < tol:
            return x
    raise NumericalBreakdownError(
        f"inverse iteration did not converge in {max_iter} iterations "
        f"(shift={shift:.6e}, last change={change:.3e})"
    )
