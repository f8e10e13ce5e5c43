"""Compatibility condition rho c(kappa) = kappa and equilibrium classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalBreakdownError
from .quadrature import ThetaGrid, c_over_kappa, check_dimension, order_parameter

DEFAULT_TOL = 1e-10
_MAX_BISECTIONS = 400


class EquilibriumKind(enum.Enum):
    UNIFORM_ONLY = "UniformOnly"
    UNIFORM_PLUS_VMF = "UniformPlusVmfManifold"


@dataclass(frozen=True)
class EquilibriumClass:
    kind: EquilibriumKind
    kappa: float
    residual: float = 0.0


def kappa_roots(rho, n: int, tol: float = DEFAULT_TOL, grid: ThetaGrid | None = None) -> np.ndarray:
    """Vectorized positive roots of rho c(kappa) = kappa (0 where none exists).

    Bisection on ``rho c(kappa)/kappa - 1``, which is decreasing in kappa,
    over the bracket ``[max(tol, eps), rho]``.  Iterates to machine precision
    rather than stopping at ``tol``; ``tol`` only bounds the final residual.
    """
    n = check_dimension(n)
    rho = np.atleast_1d(np.asarray(rho, dtype=float))
    if np.any(~np.isfinite(rho)) or np.any(rho < 0):
        raise InvalidInputError("density must be finite and >= 0")
    if tol <= 0:
        raise InvalidInputError("tol must be > 0")

    out = np.zeros_like(rho)
    lo_val = max(tol, np.finfo(float).eps)
    active = rho > n
    if active.any():
        r = rho[active]
        lo = np.full_like(r, lo_val)
        hi = r.copy()
        # densities within quadrature error of n may have no discrete root
        has_root = r * c_over_kappa(lo, n, grid) > 1.0
        for _ in range(_MAX_BISECTIONS):
            mid = 0.5 * (lo + hi)
            above = r * c_over_kappa(mid, n, grid) > 1.0
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
            if np.all(hi - lo <= 4 * np.finfo(float).eps * hi):
                break
        k = np.where(has_root, 0.5 * (lo + hi), 0.0)
        resid = np.abs(r * np.asarray(order_parameter(k, n, grid)) - k)
        if np.any(resid > tol):
            raise NumericalBreakdownError(
                f"compatibility residual {resid.max():.3e} exceeds tol {tol:.1e}"
            )
        out[active] = k
    return out


def kappa_of_rho(
    rho: float, n: int, tol: float = DEFAULT_TOL, grid: ThetaGrid | None = None
) -> EquilibriumClass:
    k = float(kappa_roots(rho, n, tol, grid)[0])
    if k == 0.0:
        return EquilibriumClass(EquilibriumKind.UNIFORM_ONLY, 0.0, 0.0)
    residual = abs(rho * order_parameter(k, n, grid) - k)
    return EquilibriumClass(EquilibriumKind.UNIFORM_PLUS_VMF, k, residual)


def rho_of_kappa(kappa, n: int, grid: ThetaGrid | None = None):
    """Density kappa / c(kappa) of the VMF equilibrium (n at kappa = 0)."""
    out = 1.0 / np.asarray(c_over_kappa(kappa, n, grid), dtype=float)
    return float(out) if out.ndim == 0 else out
