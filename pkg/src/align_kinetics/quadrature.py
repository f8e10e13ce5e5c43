"""Polar-angle grids and Von-Mises-Fisher averages on the sphere S^{n-1}.

Every average over an axisymmetric function reduces to a one-dimensional
integral in the polar angle theta with weight ``sin(theta)**(n-2)``.  All
integrals here use the composite trapezoid rule on the uniform node grid
``theta_i = i*pi/N``.  Exponential weights are shifted by ``exp(-kappa)`` so
that nothing overflows for large concentrations; only ratios are returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable

import numpy as np

from .errors import InvalidInputError

DEFAULT_N = 3000


def check_dimension(n: int) -> int:
    if int(n) != n or n < 2:
        raise InvalidInputError(f"dimension n must be an integer >= 2, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class ThetaGrid:
    """Uniform discretization of (0, pi) into ``N`` intervals."""

    n: int
    N: int = DEFAULT_N

    def __post_init__(self):
        check_dimension(self.n)
        if int(self.N) != self.N or self.N < 8:
            raise InvalidInputError(f"grid needs N >= 8 intervals, got {self.N!r}")

    @property
    def h(self) -> float:
        return np.pi / self.N

    @cached_property
    def nodes(self) -> np.ndarray:
        return np.arange(self.N + 1) * self.h

    @cached_property
    def half_nodes(self) -> np.ndarray:
        return (np.arange(self.N) + 0.5) * self.h

    @cached_property
    def node_weights(self) -> np.ndarray:
        """Trapezoid weights times ``sin(theta)**(n-2)`` at the nodes."""
        w = np.full(self.N + 1, self.h)
        w[0] = w[-1] = 0.5 * self.h
        if self.n > 2:
            s = np.sin(self.nodes)
            s[0] = s[-1] = 0.0
            w = w * s ** (self.n - 2)
        return w

    @cached_property
    def cell_weights(self) -> np.ndarray:
        """Midpoint weights times ``sin(theta)**(n-2)`` at the half-nodes."""
        return self.h * np.sin(self.half_nodes) ** (self.n - 2)


@lru_cache(maxsize=32)
def default_grid(n: int, N: int = DEFAULT_N) -> ThetaGrid:
    return ThetaGrid(n, N)


def _grid(n, grid):
    if grid is None:
        return default_grid(check_dimension(n))
    if grid.n != n:
        raise InvalidInputError(f"grid built for n={grid.n}, asked for n={n}")
    return grid


def _check_kappa(kappa):
    k = np.asarray(kappa, dtype=float)
    if not np.all(np.isfinite(k)) or np.any(k < 0):
        raise InvalidInputError("concentration kappa must be finite and >= 0")
    return k


def vmf_average(
    gamma: Callable[[np.ndarray], np.ndarray],
    kappa: float,
    n: int,
    grid: ThetaGrid | None = None,
) -> float:
    """Average of ``gamma(cos(theta))`` under the VMF law of concentration kappa.

    ``gamma`` is called once on the array of node cosines and must return an
    array of the same shape (or a scalar).
    """
    grid = _grid(n, grid)
    k = float(_check_kappa(kappa))
    cos = np.cos(grid.nodes)
    values = np.broadcast_to(np.asarray(gamma(cos), dtype=float), cos.shape)
    if not np.all(np.isfinite(values)):
        raise InvalidInputError("gamma returned non-finite values on [-1, 1]")
    m = grid.node_weights * np.exp(k * (cos - 1.0))
    return float(np.dot(m, values) / m.sum())


def order_parameter(kappa, n: int, grid: ThetaGrid | None = None):
    """Order parameter c(kappa) = <cos theta> under the VMF distribution.

    Accepts a scalar or an array of concentrations.  Nodes are paired under
    theta -> pi - theta so the odd part ``2 sinh(kappa cos)`` is formed
    analytically; this keeps c/kappa accurate down to kappa ~ 1e-300.
    """
    grid = _grid(n, grid)
    k = _check_kappa(kappa)
    half = grid.N // 2
    if grid.N % 2 == 0:
        idx = np.arange(half)  # middle node theta = pi/2 has cos = 0
    else:
        idx = np.arange(half + 1)
    cos = np.cos(grid.nodes[idx])
    w = grid.node_weights[idx]
    kk = k[..., None]
    left = np.exp(kk * (cos - 1.0))
    odd = -left * np.expm1(-2.0 * kk * cos)  # e^{-k}(e^{k cos} - e^{-k cos})
    even = left + np.exp(-kk * (cos + 1.0))
    num = odd @ (w * cos)
    den = even @ w
    if grid.N % 2 == 0:
        den = den + grid.node_weights[half] * np.exp(-k)
    c = num / den
    return float(c) if c.ndim == 0 else c


def c_over_kappa(kappa, n: int, grid: ThetaGrid | None = None):
    """c(kappa)/kappa with its kappa -> 0 limit 1/n."""
    k = _check_kappa(kappa)
    c = np.asarray(order_parameter(k, n, grid), dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(k > 0, c / np.where(k > 0, k, 1.0), 1.0 / n)
    return float(out) if out.ndim == 0 else out


def dc_dkappa(kappa, n: int, grid: ThetaGrid | None = None):
    """dc/dkappa from the identity ``1 - (n-1) c/kappa - c**2`` (1/n at 0)."""
    c = np.asarray(order_parameter(kappa, n, grid), dtype=float)
    out = 1.0 - (n - 1) * np.asarray(c_over_kappa(kappa, n, grid)) - c**2
    return float(out) if out.ndim == 0 else out
