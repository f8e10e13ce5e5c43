"""Generalized collisional invariant (GCI) and ordered-phase closure coefficients.

The GCI profile g solves a singular Sturm-Liouville problem on (0, pi).  With
the change of unknown f = sin(theta)**(n/2 - 1) g it becomes

    -e^{-k cos}(e^{k cos} f')' + V(theta) f = sin(theta)**(n/2),
    V = (n-2)/(2 sin^2)(1 + (n-2)/2 cos^2) - k (n-2)/2 cos,

with f(0) = f(pi) = 0, discretized by centered differences on the nodes.
The drift part of V carries the factor (n-2)/2: it is what the substitution
produces, and it is what makes the Dirichlet and Neumann spectra coincide in
dimension 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .equilibria import kappa_roots
from .errors import InvalidInputError
from .quadrature import ThetaGrid, check_dimension, default_grid, order_parameter
from .tridiag import TridiagonalSystem, thomas_solve

DEFAULT_MARGIN = 1e-6


def _grid_for(n, N):
    return default_grid(n, N) if N is not None else default_grid(n)


def _a_entries(n: int, kappa, grid: ThetaGrid):
    """Diagonal, upper and lower entries of A, shape (N-1,) + kappa.shape.

    Exponentials are evaluated relative to the node value e^{k cos(theta_i)},
    so every ratio is bounded by e^{k h}.
    """
    k = np.asarray(kappa, dtype=float)
    kk = k[None, ...]
    i = np.arange(1, grid.N)
    th = grid.nodes[i]
    s = np.sin(th)
    cos = np.cos(th)
    cm = np.cos(grid.half_nodes[i - 1])
    cp = np.cos(grid.half_nodes[i])
    expand = (slice(None),) + (None,) * k.ndim
    scale = grid.N**2 / math.pi**2
    rp = np.exp(kk * (cp - cos)[expand])
    rm = np.exp(kk * (cm - cos)[expand])
    potential = (n - 2) / (2 * s**2) * (1 + (n - 2) / 2 * cos**2)
    drift = (n - 2) / 2 * cos
    diag = potential[expand] - kk * drift[expand] + scale * (rp + rm)
    upper = -scale * rp[:-1]
    lower = -scale * rm[1:]
    return diag, upper, lower


def assemble_matrix_A(n: int, kappa: float, N: int = 3000) -> TridiagonalSystem:
    """(N-1)x(N-1) finite-difference matrix of the transformed GCI operator.

    Interior nodes theta_1 .. theta_{N-1}; symmetrizing weights are
    e^{kappa (cos theta_i - 1)}.
    """
    n = check_dimension(n)
    if kappa < 0:
        raise InvalidInputError("kappa must be >= 0")
    grid = ThetaGrid(n, N)
    d, u, lo = _a_entries(n, float(kappa), grid)
    w = np.exp(kappa * (np.cos(grid.nodes[1:-1]) - 1.0))
    return TridiagonalSystem(d, u, lo, weights=w)


@dataclass(frozen=True)
class GciSolution:
    kappa: float
    n: int
    grid: ThetaGrid
    f_values: np.ndarray  # interior nodes 1 .. N-1
    residual: float

    @property
    def full_values(self) -> np.ndarray:
        """f on all nodes, including the Dirichlet zeros at both ends."""
        return np.concatenate([[0.0], self.f_values, [0.0]])

    @property
    def h_values(self) -> np.ndarray:
        """h_kappa(cos theta) = f / sin(theta)**(n/2) at interior nodes."""
        return self.f_values / np.sin(self.grid.nodes[1:-1]) ** (self.n / 2)


def solve_gci(n: int, kappa: float, N: int = 3000) -> GciSolution:
    n = check_dimension(n)
    if not kappa > 0:
        raise InvalidInputError("the GCI problem needs kappa > 0")
    grid = ThetaGrid(n, N)
    A = assemble_matrix_A(n, kappa, N)
    S = np.sin(grid.nodes[1:-1]) ** (n / 2)
    f = A.solve(S)
    res = float(np.max(np.abs(A.matvec(f) - S)) / np.max(np.abs(S)))
    return GciSolution(float(kappa), n, grid, f, res)


def _c_tilde_batch(n: int, kappa: np.ndarray, grid: ThetaGrid) -> np.ndarray:
    d, u, lo = _a_entries(n, kappa, grid)
    s = np.sin(grid.nodes[1:-1])
    rhs = (s ** (n / 2))[:, None]
    f = thomas_solve(lo, d, u, np.broadcast_to(rhs, d.shape))
    cos = np.cos(grid.nodes[1:-1])
    # trapezoid rule: endpoints drop out since f vanishes there
    w = f * (s ** (n / 2))[:, None] * np.exp(kappa[None, :] * (cos[:, None] - 1.0))
    return (cos @ w) / w.sum(axis=0)


def c_tilde(kappa, n: int, N: int = 3000):
    """Convection speed of the orientation, c_tilde(kappa), for kappa > 0."""
    n = check_dimension(n)
    k = np.atleast_1d(np.asarray(kappa, dtype=float))
    if np.any(k <= 0):
        raise InvalidInputError("c_tilde needs kappa > 0")
    grid = _grid_for(n, N)
    out = np.concatenate([_c_tilde_batch(n, k[j : j + 256], grid) for j in range(0, k.size, 256)])
    return float(out[0]) if np.ndim(kappa) == 0 else out.reshape(np.shape(kappa))


@dataclass(frozen=True)
class ClosureCoefficients:
    n: int
    kappa: float
    rho: float
    c: float
    c_tilde: float
    lam: float
    gamma: float
    theta_c: float  # nan when lam >= 0
    hyperbolic_everywhere: bool = False

    @property
    def compatibility_residual(self) -> float:
        return abs(self.rho * self.c - self.kappa)

    @property
    def tan_theta_c(self) -> float:
        return math.inf if self.theta_c == math.pi / 2 else math.tan(self.theta_c)


def _theta_c(c, ct, lam, gamma):
    lam = np.asarray(lam, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        th = np.arctan(np.abs(ct - gamma) / (2.0 * np.sqrt(-lam * c)))
    return np.where(lam < 0, th, np.nan)


def _assemble(n, kappa, rho, c, ct):
    denom = n - rho + kappa * c
    lam = (n - rho + kappa * ct) / (kappa * denom)
    gamma = c / denom
    th = _theta_c(c, ct, lam, gamma)
    return lam, gamma, th


def coefficient_arrays(n: int, rho, N: int = 3000, margin: float = DEFAULT_MARGIN) -> dict:
    """Vectorized closure coefficients over an array of densities rho > n."""
    n = check_dimension(n)
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(rho <= n + margin):
        raise InvalidInputError(f"closure coefficients need rho > n + {margin:g}")
    grid = _grid_for(n, N)
    kappa = kappa_roots(rho, n, grid=grid)
    c = np.asarray(order_parameter(kappa, n, grid))
    ct = np.asarray(c_tilde(kappa, n, N))
    lam, gamma, th = _assemble(n, kappa, rho, c, ct)
    return dict(rho=rho, kappa=kappa, c=c, c_tilde=ct, lam=lam, gamma=gamma, theta_c=th)


def _pack(n, kappa, rho, c, ct) -> ClosureCoefficients:
    lam, gamma, th = _assemble(n, kappa, rho, c, ct)
    lam, gamma, th = float(lam), float(gamma), float(th)
    return ClosureCoefficients(
        n, float(kappa), float(rho), float(c), float(ct), lam, gamma, th,
        hyperbolic_everywhere=not lam < 0,
    )


def closure_coefficients(n: int, rho: float, N: int = 3000, margin: float = DEFAULT_MARGIN) -> ClosureCoefficients:
    n = check_dimension(n)
    if not rho > n + margin:
        raise InvalidInputError(f"closure coefficients need rho > n + {margin:g}, got {rho}")
    grid = _grid_for(n, N)
    kappa = float(kappa_roots(rho, n, grid=grid)[0])
    if kappa == 0.0:
        raise InvalidInputError(f"rho={rho} is within quadrature error of the threshold")
    c = order_parameter(kappa, n, grid)
    return _pack(n, kappa, rho, c, c_tilde(kappa, n, N))


def closure_coefficients_at_kappa(n: int, kappa: float, N: int = 3000) -> ClosureCoefficients:
    """Same coefficients parametrized by the concentration (rho = kappa/c)."""
    n = check_dimension(n)
    if not kappa > 0:
        raise InvalidInputError("kappa must be > 0")
    grid = _grid_for(n, N)
    c = order_parameter(kappa, n, grid)
    return _pack(n, kappa, kappa / c, c, c_tilde(kappa, n, N))


def gamma_finite_difference(n: int, rho: float, h: float = 1e-4, N: int = 3000) -> float:
    """d(rho c)/drho by centered differences of rho -> rho c(kappa(rho))."""
    grid = _grid_for(n, N)
    r = np.array([rho - h, rho + h])
    k = kappa_roots(r, n, grid=grid)
    flux = r * np.asarray(order_parameter(k, n, grid))
    return float((flux[1] - flux[0]) / (2 * h))


def lambda_from_dkappa(n: int, rho: float, h: float = 1e-4, N: int = 3000) -> float:
    """lambda = 1/k + (rho/k)(dk/drho)(c_tilde - c) with dk/drho by differences."""
    grid = _grid_for(n, N)
    r = np.array([rho - h, rho, rho + h])
    k = kappa_roots(r, n, grid=grid)
    dk = (k[2] - k[0]) / (2 * h)
    c = order_parameter(k[1], n, grid)
    ct = c_tilde(k[1], n, N)
    return float(1.0 / k[1] + rho / k[1] * dk * (ct - c))


def theta_c_both_forms(n: int, rho: float, N: int = 3000) -> dict:
    """Critical angle with gamma from the closed form and from differences."""
    co = closure_coefficients(n, rho, N)
    g_fd = gamma_finite_difference(n, rho, N=N)
    alt = float(_theta_c(co.c, co.c_tilde, co.lam, g_fd))
    return {"closed_form": co.theta_c, "finite_difference": alt, "gamma": co.gamma, "gamma_fd": g_fd}
