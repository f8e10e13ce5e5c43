"""Macroscopic limits: nonlinear diffusion in the disordered phase and the
ordered-phase hydrodynamics, with hyperbolicity analysis and region maps.

The 1-D hydrodynamic system along the z axis, with u = cos(theta), is

    rho_t + (rho c u)_z = 0,
    u_t + c_tilde u u_z + lambda (1 - u^2) / rho * rho_z = 0,
    v_t + c_tilde u v_z = 0,

whose quasilinear matrix in (rho, u) is [[gamma u, rho c], [lambda (1-u^2)/rho, c_tilde u]].
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import (
    HyperbolicityLossError,
    InvalidInputError,
    StabilityError,
    ValidityLossError,
)
from .gci import ClosureCoefficients, coefficient_arrays
from .quadrature import check_dimension
from .tridiag import solve_cyclic

# ---------------------------------------------------------------- diffusion


@dataclass
class DiffusionState1D:
    rho: np.ndarray
    dx: float
    n: int
    eps: float = 1.0
    time: float = 0.0

    def __post_init__(self):
        self.n = check_dimension(self.n)
        self.rho = np.asarray(self.rho, dtype=float)
        if self.rho.ndim != 1 or self.rho.size < 3:
            raise InvalidInputError("need at least 3 periodic cells")
        if np.any(self.rho < 0) or not np.all(np.isfinite(self.rho)):
            raise InvalidInputError("density must be finite and >= 0")
        if not (self.dx > 0 and self.eps > 0):
            raise InvalidInputError("dx and eps must be > 0")

    @property
    def mass(self) -> float:
        return float(self.rho.sum() * self.dx)

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.rho.size) + 0.5) * self.dx


def diffusivity(rho, n: int, eps: float):
    return eps / ((n - 1) * (n - np.asarray(rho, dtype=float)))


def _check_validity(rho, n, margin):
    top = float(np.max(rho))
    if top >= n - margin:
        raise ValidityLossError(
            f"density {top:.6g} reached the threshold band n - margin = {n - margin:.6g}"
        )


def diffusion_step(
    state: DiffusionState1D,
    dt: float,
    source=None,
    margin: float | None = None,
) -> DiffusionState1D:
    """Backward Euler step of rho_t = (eps/(n-1)) (rho_x / (n - rho))_x.

    Face diffusivities are arithmetic means of the lagged cell values; the
    periodic system is symmetric with zero row sums, so mass is conserved to
    round-off.  ``source`` is an optional callable s(x, t) evaluated at the
    new time.
    """
    if not dt > 0:
        raise InvalidInputError("dt must be > 0")
    n = state.n
    margin = 0.05 * n if margin is None else margin
    _check_validity(state.rho, n, margin)
    D = diffusivity(state.rho, n, state.eps)
    Df = 0.5 * (D + np.roll(D, -1))  # face j+1/2
    r = dt / state.dx**2
    off = -r * Df  # coupling j <-> j+1
    diag = 1.0 + r * (Df + np.roll(Df, 1))
    rhs = state.rho.copy()
    if source is not None:
        rhs = rhs + dt * np.asarray(source(state.x, state.time + dt), dtype=float)
    new = solve_cyclic(off[:-1], diag, off[:-1], off[-1], off[-1], rhs)
    _check_validity(new, n, margin)
    return DiffusionState1D(new, state.dx, n, state.eps, state.time + dt)


def correction_field(state: DiffusionState1D) -> np.ndarray:
    """Coefficient -eps n rho_x / ((n-1)(n-rho)) of the first-order correction."""
    drho = (np.roll(state.rho, -1) - np.roll(state.rho, 1)) / (2 * state.dx)
    n = state.n
    return -state.eps * n * drho / ((n - 1) * (n - state.rho))


def diffusion_mode_rate(n: int, rho0: float, k: float, eps: float = 1.0) -> float:
    """Decay rate of a small Fourier mode of wavenumber k about rho0."""
    return eps * k * k / ((n - 1) * (n - rho0))


# ---------------------------------------------------------------- hyperbolicity


@dataclass(frozen=True)
class CharacteristicSpeeds:
    speeds: tuple[float, float] | None  # None for a complex pair
    real_parts: tuple[float, float]
    discriminant: float
    passive: float

    @property
    def hyperbolic(self) -> bool:
        return self.speeds is not None


def _speeds(c, ct, lam, gamma, u):
    trace = (gamma + ct) * u
    disc = (gamma - ct) ** 2 * u * u + 4.0 * lam * c * (1.0 - u * u)
    return trace, disc


def characteristic_speeds(coeffs: ClosureCoefficients, theta: float) -> CharacteristicSpeeds:
    u = math.cos(theta)
    trace, disc = _speeds(coeffs.c, coeffs.c_tilde, coeffs.lam, coeffs.gamma, u)
    if disc >= 0:
        root = math.sqrt(disc)
        pair = (0.5 * (trace - root), 0.5 * (trace + root))
        return CharacteristicSpeeds(pair, pair, disc, coeffs.c_tilde * u)
    half = 0.5 * trace
    return CharacteristicSpeeds(None, (half, half), disc, coeffs.c_tilde * u)


def quasilinear_matrix(coeffs: ClosureCoefficients, theta: float) -> np.ndarray:
    u = math.cos(theta)
    return np.array(
        [
            [coeffs.gamma * u, coeffs.rho * coeffs.c],
            [coeffs.lam * (1 - u * u) / coeffs.rho, coeffs.c_tilde * u],
        ]
    )


def tangent_criterion(coeffs: ClosureCoefficients, theta: float) -> bool:
    """|tan theta| < tan theta_c; always true when lambda >= 0."""
    if not coeffs.lam < 0:
        return True
    return abs(math.tan(theta)) < coeffs.tan_theta_c


# ---------------------------------------------------------------- coefficient table


class CoefficientTable:
    """Cubic-spline interpolation of the closure coefficients over rho."""

    def __init__(self, n: int, rho_min: float | None = None, rho_max: float | None = None, points: int = 2000, N: int = 3000):
        self.n = check_dimension(n)
        self.rho_min = n + 0.01 if rho_min is None else float(rho_min)
        self.rho_max = 20.0 * n if rho_max is None else float(rho_max)
        if not (n < self.rho_min < self.rho_max) or points < 4:
            raise InvalidInputError("table needs n < rho_min < rho_max and >= 4 points")
        data = _table_data(self.n, self.rho_min, self.rho_max, int(points), int(N))
        self.rho = data["rho"]
        self._splines = {k: CubicSpline(self.rho, data[k]) for k in ("kappa", "c", "c_tilde", "lam", "gamma")}

    def _check(self, rho):
        r = np.asarray(rho, dtype=float)
        if np.any(r < self.rho_min) or np.any(r > self.rho_max):
            raise HyperbolicityLossError(
                f"density outside the tabulated ordered range [{self.rho_min:g}, {self.rho_max:g}]",
                cells=np.flatnonzero((np.atleast_1d(r) < self.rho_min) | (np.atleast_1d(r) > self.rho_max)),
            )
        return r

    def __call__(self, rho) -> dict:
        r = self._check(rho)
        out = {k: s(r) for k, s in self._splines.items()}
        out["rho"] = r
        return out

    def tan_theta_c(self, rho):
        v = self(rho)
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.abs(v["c_tilde"] - v["gamma"]) / (2.0 * np.sqrt(-v["lam"] * v["c"]))
        return np.where(v["lam"] < 0, t, np.inf)

    def coefficients(self, rho: float) -> ClosureCoefficients:
        v = self(float(rho))
        tan_c = float(self.tan_theta_c(float(rho)))
        lam = float(v["lam"])
        return ClosureCoefficients(
            self.n, float(v["kappa"]), float(rho), float(v["c"]), float(v["c_tilde"]), lam,
            float(v["gamma"]), math.atan(tan_c) if lam < 0 else math.nan, not lam < 0,
        )


@lru_cache(maxsize=16)
def _table_data(n, rho_min, rho_max, points, N):
    return coefficient_arrays(n, np.linspace(rho_min, rho_max, points), N)


# ---------------------------------------------------------------- region map


class Region(enum.Enum):
    DISORDERED_DIFFUSION = "DisorderedDiffusion"
    ORDERED_HYPERBOLIC = "OrderedHyperbolic"
    ORDERED_NON_HYPERBOLIC = "OrderedNonHyperbolic"
    BUFFER = "Buffer"


@dataclass
class RegionMap:
    n: int
    rho: np.ndarray  # cell centers
    theta: np.ndarray
    labels: np.ndarray  # (len(rho), len(theta)) of Region
    buffer: float

    def rows(self):
        return [
            (float(r), float(t), self.labels[i, j].value)
            for i, r in enumerate(self.rho)
            for j, t in enumerate(self.theta)
        ]

    def label_at(self, rho: float, theta: float) -> Region:
        i = int(np.argmin(np.abs(self.rho - rho)))
        j = int(np.argmin(np.abs(self.theta - theta)))
        return self.labels[i, j]


def classify_point(n: int, rho: float, theta: float, tan_theta_c: float, buffer: float) -> Region:
    if rho < n - buffer:
        return Region.DISORDERED_DIFFUSION
    if rho <= n + buffer:
        return Region.BUFFER
    if abs(math.tan(theta)) < tan_theta_c:
        return Region.ORDERED_HYPERBOLIC
    return Region.ORDERED_NON_HYPERBOLIC


def region_map(
    n: int,
    rho_range: tuple[float, float],
    theta_range: tuple[float, float] = (0.0, math.pi / 2),
    eps: float = 1e-3,
    rho_cells: int = 50,
    theta_cells: int = 50,
    buffer_factor: float = 10.0,
    N: int = 3000,
) -> RegionMap:
    """Label (rho, theta) cell centers by the macroscopic model that applies.

    With ``rho_cells = 1`` or ``theta_cells = 1`` the range endpoints
    themselves are used, so single points can be queried.
    """
    n = check_dimension(n)
    r0, r1 = map(float, rho_range)
    t0, t1 = map(float, theta_range)
    if not (r1 >= r0 >= 0 and t1 >= t0) or rho_cells < 1 or theta_cells < 1:
        raise InvalidInputError("ranges must be non-empty and ordered")
    rho = _centers(r0, r1, rho_cells)
    theta = _centers(t0, t1, theta_cells)
    dr = (r1 - r0) / rho_cells
    buffer = max(eps * buffer_factor, dr)
    ordered = rho > n + buffer
    tan_c = np.full(rho.size, np.inf)
    if ordered.any():
        data = coefficient_arrays(n, rho[ordered], N)
        with np.errstate(invalid="ignore", divide="ignore"):
            t = np.abs(data["c_tilde"] - data["gamma"]) / (2.0 * np.sqrt(-data["lam"] * data["c"]))
        tan_c[ordered] = np.where(data["lam"] < 0, t, np.inf)
    labels = np.empty((rho.size, theta.size), dtype=object)
    for i, r in enumerate(rho):
        for j, t in enumerate(theta):
            labels[i, j] = classify_point(n, float(r), float(t), float(tan_c[i]), buffer)
    return RegionMap(n, rho, theta, labels, buffer)


def _centers(a, b, m):
    if m == 1:
        return np.array([a])
    return a + (np.arange(m) + 0.5) * (b - a) / m


# ---------------------------------------------------------------- hydrodynamics


@dataclass
class HydroState1D:
    rho: np.ndarray
    u: np.ndarray  # cos(theta)
    v: np.ndarray  # (cells, n-1) unit vectors orthogonal to the axis
    dx: float
    time: float = 0.0

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        v = np.asarray(self.v, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        self.v = v
        m = self.rho.size
        if self.u.shape != (m,) or v.shape[0] != m or m < 3:
            raise InvalidInputError("rho, u, v must share the (>= 3) cell count")
        if np.any(np.abs(self.u) > 1.0 + 1e-12):
            raise InvalidInputError("u = cos(theta) must lie in [-1, 1]")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-9):
            raise InvalidInputError("v must be unit vectors")

    @property
    def mass(self) -> float:
        return float(self.rho.sum() * self.dx)

    @property
    def x(self) -> np.ndarray:
        return (np.arange(self.rho.size) + 0.5) * self.dx

    @classmethod
    def uniform(cls, n: int, cells: int, length: float, rho0: float, theta0: float):
        v = np.zeros((cells, max(n - 1, 1)))
        v[:, 0] = 1.0
        return cls(np.full(cells, rho0), np.full(cells, math.cos(theta0)), v, length / cells)


DEFAULT_SAFETY = 0.1
DEFAULT_CFL = 0.9


def _local_speed(coef, u):
    trace, disc = _speeds(coef["c"], coef["c_tilde"], coef["lam"], coef["gamma"], u)
    return 0.5 * (np.abs(trace) + np.sqrt(np.maximum(disc, 0.0)))


def check_hyperbolic(state: HydroState1D, table: CoefficientTable, safety: float = DEFAULT_SAFETY):
    """Raise unless every cell has |tan theta| <= (1 - safety) tan theta_c."""
    coef = table(state.rho) if _in_table(state.rho, table) else None
    if coef is None:
        bad = np.flatnonzero((state.rho < table.rho_min) | (state.rho > table.rho_max))
        raise HyperbolicityLossError(
            f"{bad.size} cells outside the ordered range covered by the table",
            cells=bad,
        )
    u = state.u
    with np.errstate(divide="ignore"):
        tan = np.where(u == 0, np.inf, np.sqrt(np.maximum(1 - u * u, 0.0)) / np.abs(u))
    limit = (1.0 - safety) * table.tan_theta_c(state.rho)
    bad = np.flatnonzero(tan > limit)
    if bad.size:
        j = int(bad[0])
        raise HyperbolicityLossError(
            f"{bad.size} cells outside the hyperbolic safety region; first cell {j}: "
            f"rho={state.rho[j]:.6g}, theta={math.acos(np.clip(u[j], -1, 1)):.6g}, "
            f"|tan theta|={tan[j]:.4g} > {limit[j]:.4g}",
            cells=bad,
        )
    return coef


def _in_table(rho, table):
    return bool(np.all(rho >= table.rho_min) and np.all(rho <= table.rho_max))


def max_hydro_dt(state: HydroState1D, table: CoefficientTable, cfl: float = DEFAULT_CFL) -> float:
    coef = table(state.rho)
    a = float(np.max(_local_speed(coef, state.u)))
    return math.inf if a == 0 else cfl * state.dx / a


def hydro_step_1d(
    state: HydroState1D,
    table: CoefficientTable,
    dt: float,
    safety: float = DEFAULT_SAFETY,
    cfl: float = DEFAULT_CFL,
) -> HydroState1D:
    """First-order step: Rusanov flux for rho, centered differences with
    local Lax-Friedrichs dissipation for u, upwinding for v."""
    if not dt > 0:
        raise InvalidInputError("dt must be > 0")
    coef = check_hyperbolic(state, table, safety)
    rho, u, dx = state.rho, state.u, state.dx
    a_cell = _local_speed(coef, u)
    a_max = float(np.max(a_cell))
    if a_max * dt > cfl * dx:
        raise StabilityError(
            f"CFL number {a_max * dt / dx:.3f} exceeds {cfl}", max_dt=cfl * dx / a_max
        )
    a_face = np.maximum(a_cell, np.roll(a_cell, -1))  # face j+1/2

    f = rho * coef["c"] * u
    F = 0.5 * (f + np.roll(f, -1)) - 0.5 * a_face * (np.roll(rho, -1) - rho)
    rho_new = rho - dt / dx * (F - np.roll(F, 1))

    du = np.roll(u, -1) - np.roll(u, 1)
    drho = np.roll(rho, -1) - np.roll(rho, 1)
    visc = a_face * (np.roll(u, -1) - u) - np.roll(a_face, 1) * (u - np.roll(u, 1))
    u_new = u - dt / (2 * dx) * (coef["c_tilde"] * u * du + coef["lam"] * (1 - u * u) / rho * drho) + dt / (2 * dx) * visc
    u_new = np.clip(u_new, -1.0, 1.0)

    s = coef["c_tilde"] * u
    v = state.v
    back = v - np.roll(v, 1, axis=0)
    fwd = np.roll(v, -1, axis=0) - v
    v_new = v - dt / dx * (np.maximum(s, 0)[:, None] * back + np.minimum(s, 0)[:, None] * fwd)
    norms = np.linalg.norm(v_new, axis=1, keepdims=True)
    v_new = np.where(norms > 0, v_new / np.where(norms > 0, norms, 1.0), v)
    return HydroState1D(rho_new, u_new, v_new, dx, state.time + dt)


def run_hydro(state: HydroState1D, table: CoefficientTable, T: float, cfl: float = 0.5, safety: float = DEFAULT_SAFETY):
    """Advance to time T with steps at the given CFL number."""
    s = state
    while s.time < T - 1e-12:
        dt = min(max_hydro_dt(s, table, cfl), T - s.time)
        s = hydro_step_1d(s, table, dt, safety)
    return s


def eigen_decomposition(coeffs: ClosureCoefficients, theta: float):
    """Real eigenvalues with right and left eigenvectors (rows of the inverse)."""
    A = quasilinear_matrix(coeffs, theta)
    vals, R = np.linalg.eig(A)
    if np.any(np.abs(vals.imag) > 0):
        raise HyperbolicityLossError("complex characteristic speeds")
    order = np.argsort(vals.real)
    vals, R = vals.real[order], R.real[:, order]
    return vals, R, np.linalg.inv(R)


def measure_wave_speed(
    table: CoefficientTable,
    rho0: float,
    theta0: float,
    family: int,
    cells: int = 1600,
    length: float = 40.0,
    amplitude: float = 1e-4,
    width: float = 1.0,
    T: float = 5.0,
    sign: float = 1.0,
) -> tuple[float, float]:
    """Centroid speed of a small Gaussian pulse along one characteristic family.

    Returns (measured, predicted).  The pulse is injected along the right
    eigenvector and tracked through the matching left eigenvector.
    """
    co = table.coefficients(rho0)
    vals, R, Linv = eigen_decomposition(co, theta0)
    s0 = HydroState1D.uniform(table.n, cells, length, rho0, theta0)
    x = s0.x
    x0 = 0.5 * length - 0.25 * length * np.sign(vals[family])
    bump = amplitude * np.exp(-0.5 * ((x - x0) / width) ** 2)
    r = sign * R[:, family]
    if s0.u[0] + amplitude * r[1] > 1.0:
        r = -r  # a pulse pushing u above 1 would be clipped away
    s = HydroState1D(s0.rho + r[0] * bump, np.clip(s0.u + r[1] * bump, -1, 1), s0.v, s0.dx)

    def centroid(st):
        w = Linv[family, 0] * (st.rho - rho0) + Linv[family, 1] * (st.u - s0.u)
        return float(np.sum(x * w) / np.sum(w))

    start = centroid(s)
    end_state = run_hydro(s, table, T)
    return (centroid(end_state) - start) / end_state.time, float(vals[family])
