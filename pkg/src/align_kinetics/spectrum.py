"""Poincare constant of the VMF-weighted Laplacian and relaxation rates.

The constant is the smaller of two Sturm-Liouville ground eigenvalues:
lambda_0 from the Neumann problem for axisymmetric modes (matrix B on the
half-nodes) and lambda_1 from the Dirichlet problem for degree-one modes
(matrix A on the interior nodes, shared with the GCI solver).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import kappa_roots
from .errors import InvalidInputError
from .gci import assemble_matrix_A
from .quadrature import ThetaGrid, check_dimension, order_parameter
from .tridiag import TridiagonalSystem, bisect_eigenvalue, inverse_iteration

SPECTRAL_N = 300


def _m(n: int, kappa: float, theta: np.ndarray) -> np.ndarray:
    # shifted by e^{-kappa}; B only involves ratios of m
    return np.sin(theta) ** (n - 2) * np.exp(kappa * (np.cos(theta) - 1.0))


def assemble_matrix_B(n: int, kappa: float, N: int = SPECTRAL_N) -> TridiagonalSystem:
    """N x N Neumann matrix on the half-nodes theta_{i+1/2}, i = 0 .. N-1.

    Row sums vanish, so constants are an exact null vector.  Symmetrizing
    weights are m(theta_{i+1/2}) = sin^{n-2} e^{kappa cos}.
    """
    n = check_dimension(n)
    if kappa < 0:
        raise InvalidInputError("kappa must be >= 0")
    grid = ThetaGrid(n, N)
    scale = N**2 / math.pi**2
    m_node = _m(n, kappa, grid.nodes[1:-1])  # m^1 .. m^{N-1}
    m_half = _m(n, kappa, grid.half_nodes)  # m^{1/2} .. m^{N-1/2}
    up = -scale * m_node / m_half[:-1]  # row i -> i+1 uses m^{i+1}
    lo = -scale * m_node / m_half[1:]  # row i+1 -> i uses m^{i+1}
    diag = np.zeros(N)
    diag[:-1] -= up
    diag[1:] -= lo
    return TridiagonalSystem(diag, up, lo, weights=m_half)


def smallest_eigenvalue(
    system: TridiagonalSystem,
    weights=None,
    exclude_null: bool = False,
    tol: float = 1e-13,
) -> tuple[float, np.ndarray]:
    """Smallest (or smallest nonzero) eigenvalue and eigenvector.

    The matrix is symmetrized with ``weights``, the eigenvalue located by
    Sturm bisection and the vector refined by inverse iteration.  With
    ``exclude_null`` the operator is assumed to annihilate constants; the
    second eigenvalue is returned and the constant mode deflated.  The vector
    is normalized to ``sum(w * x**2) = 1`` with a positive first entry.
    """
    if tol <= 0:
        raise InvalidInputError("tol must be > 0")
    w = system.weights if weights is None else np.asarray(weights, dtype=float)
    if w is None:
        w = np.ones(system.size)
    defect = system.symmetry_defect(w)
    if defect > 1e-10:
        raise InvalidInputError(f"weights do not symmetrize the matrix (defect {defect:.2e})")
    d, off = system.symmetrized(w)
    index = 1 if exclude_null else 0
    value = bisect_eigenvalue(d, off, index, tol)
    sw = np.sqrt(w)
    deflate = sw / np.linalg.norm(sw) if exclude_null else None
    y = inverse_iteration(d, off, value, deflate=deflate)
    x = y / sw
    x /= math.sqrt(float(np.sum(w * x * x)))
    first = x[np.flatnonzero(np.abs(x) > 1e-12 * np.max(np.abs(x)))[0]]
    if first < 0:
        x = -x
    return value, x


@dataclass(frozen=True)
class SpectralResult:
    kappa: float
    n: int
    N: int
    lambda_0: float  # Neumann, axisymmetric modes
    lambda_1: float  # Dirichlet, degree-one modes
    eigvec_neumann: np.ndarray = field(repr=False)  # half-nodes
    eigvec_dirichlet: np.ndarray = field(repr=False)  # interior nodes

    @property
    def poincare(self) -> float:
        return min(self.lambda_0, self.lambda_1)

    @property
    def lower_bound(self) -> float:
        """(n-1) min M / max M = (n-1) e^{-2 kappa}."""
        return (self.n - 1) * math.exp(-2.0 * self.kappa)


def poincare_constant(n: int, kappa: float, N: int = SPECTRAL_N) -> SpectralResult:
    n = check_dimension(n)
    B = assemble_matrix_B(n, kappa, N)
    A = assemble_matrix_A(n, kappa, N)
    l0, v0 = smallest_eigenvalue(B, exclude_null=True)
    l1, v1 = smallest_eigenvalue(A)
    return SpectralResult(float(kappa), n, N, l0, l1, v0, v1)


class RateKind(enum.Enum):
    EXPONENTIAL_GLOBAL = "ExponentialGlobal"
    EXPONENTIAL_ASYMPTOTIC = "ExponentialAsymptotic"
    ALGEBRAIC_HALF = "AlgebraicHalf"
    HEAT_MODE = "HeatMode"


@dataclass(frozen=True)
class RateResult:
    rho: float
    eps: float
    kind: RateKind
    rate: float
    kappa: float = 0.0
    poincare: float = math.nan


def convergence_rate(
    n: int,
    rho: float,
    eps: float = 1.0,
    zero_flux_initial: bool = False,
    N: int = SPECTRAL_N,
) -> RateResult:
    """Relaxation rate of the homogeneous kinetic equation toward equilibrium.

    Below the threshold the decay is global and exponential; at rho = n it is
    algebraic with exponent 1/2 (``rate`` is then 0); above it the rate uses
    the Poincare constant at kappa(rho).  Data with zero flux decay at the
    heat-equation rate.
    """
    n = check_dimension(n)
    if not (math.isfinite(rho) and rho >= 0):
        raise InvalidInputError("rho must be finite and >= 0")
    if not eps > 0:
        raise InvalidInputError("eps must be > 0")
    if zero_flux_initial:
        return RateResult(rho, eps, RateKind.HEAT_MODE, 2.0 * n / eps)
    if rho < n:
        return RateResult(rho, eps, RateKind.EXPONENTIAL_GLOBAL, (n - 1) * (n - rho) / (n * eps))
    kappa = float(kappa_roots(rho, n)[0])
    if rho == n or kappa == 0.0:
        return RateResult(rho, eps, RateKind.ALGEBRAIC_HALF, 0.0)
    c = order_parameter(kappa, n)
    spec = poincare_constant(n, kappa, N)
    rate = (rho * c * c + n - rho) * spec.poincare / eps
    return RateResult(rho, eps, RateKind.EXPONENTIAL_ASYMPTOTIC, rate, kappa, spec.poincare)


def sign_changes(v, rel: float = 1e-8) -> int:
    """Sign changes of v, ignoring entries below rel * max|v|."""
    v = np.asarray(v, dtype=float)
    keep = v[np.abs(v) > rel * np.max(np.abs(v))]
    return int(np.count_nonzero(np.signbit(keep[1:]) != np.signbit(keep[:-1])))


@dataclass(frozen=True)
class SpectralDiagnostics:
    neumann_sign_changes: int
    dirichlet_sign_changes: int
    transform_integral: float  # normalized; positive would imply lambda_0 > lambda_1
    dirichlet_below_neumann: bool
    transform_residual: float  # distance of the transformed Neumann mode to the Dirichlet mode

    @property
    def transform_integral_sign(self) -> int:
        return int(np.sign(self.transform_integral))


def transformed_neumann_mode(result: SpectralResult) -> np.ndarray:
    """e^{-kappa cos theta} g'(pi - theta) at interior nodes, g the Neumann mode.

    The derivative at node j is the centered difference of the two adjacent
    half-node values; reversing the node order realizes theta -> pi - theta.
    """
    grid = ThetaGrid(result.n, result.N)
    g = result.eigvec_neumann
    dg = np.diff(g) / grid.h  # nodes 1 .. N-1
    cos = np.cos(grid.nodes[1:-1])
    # cos(pi - theta) = -cos(theta); scale by e^{-kappa} so nothing overflows
    return np.exp(-result.kappa * (cos + 1.0)) * dg[::-1]


def spectral_diagnostics(result: SpectralResult) -> SpectralDiagnostics:
    grid = ThetaGrid(result.n, result.N)
    ft = transformed_neumann_mode(result)
    th = grid.nodes[1:-1]
    cos = np.cos(th)
    w = np.sin(th) ** (result.n - 2) * np.exp(result.kappa * (cos - 1.0))
    mass = float(np.sum(ft * ft * w))
    integral = float(np.sum(cos * ft * ft * w)) / mass
    # compare directions in the unweighted l2 sense; dimension 2 makes them equal
    a = ft / np.linalg.norm(ft)
    b = result.eigvec_dirichlet / np.linalg.norm(result.eigvec_dirichlet)
    residual = float(min(np.max(np.abs(a - b)), np.max(np.abs(a + b))))
    return SpectralDiagnostics(
        neumann_sign_changes=sign_changes(result.eigvec_neumann),
        dirichlet_sign_changes=sign_changes(result.eigvec_dirichlet),
        transform_integral=integral,
        dirichlet_below_neumann=result.lambda_1 < result.lambda_0,
        transform_residual=residual,
    )


def poincare_sweep(n: int, kappas, N: int = SPECTRAL_N) -> list[SpectralResult]:
    return [poincare_constant(n, float(k), N) for k in kappas]
