"""Space-homogeneous kinetic relaxation for axisymmetric distributions.

For g = g(theta, t) the homogeneous equation reads

    d_t g = sin^{2-n} d_theta[ sin^{n-2} (d_theta g + kappa sin(theta) g) ],
    kappa = rho J[g],   J[g] = <cos theta>_g,

which is the divergence form d_theta[ sin^{n-2} M d_theta(g/M) ] with
M = e^{kappa cos theta}.  The state lives on the half-nodes (cell centers)
and fluxes on the nodes, so mass is conserved exactly and the discrete VMF
profile is an exact steady state.  Each step is backward Euler in the linear
operator with kappa frozen at the start of the step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import (
    EquilibriumMismatchError,
    InvalidInputError,
    NumericalBreakdownError,
    StabilityError,
)
from .quadrature import ThetaGrid
from .spectrum import RateKind
from .tridiag import banded_solve

KINETIC_N = 400


@dataclass(frozen=True)
class AxisymState:
    grid: ThetaGrid
    g_values: np.ndarray  # half-nodes
    time: float = 0.0

    def __post_init__(self):
        g = np.asarray(self.g_values, dtype=float)
        if g.shape != (self.grid.N,):
            raise InvalidInputError(f"expected {self.grid.N} cell values, got {g.shape}")
        if not np.all(np.isfinite(g)) or np.any(g < 0):
            raise InvalidInputError("distribution must be finite and nonnegative")
        object.__setattr__(self, "g_values", g)

    @property
    def weights(self) -> np.ndarray:
        return cell_weights(self.grid)

    @property
    def mass(self) -> float:
        return float(self.weights @ self.g_values)

    @classmethod
    def from_function(cls, n: int, func, N: int = KINETIC_N) -> "AxisymState":
        """Sample ``func(theta)`` at the cell centers and normalize its mass."""
        grid = ThetaGrid(n, N)
        g = np.broadcast_to(np.asarray(func(grid.half_nodes), dtype=float), (N,)).copy()
        w = cell_weights(grid)
        return cls(grid, g / (w @ g))

    @classmethod
    def uniform(cls, n: int, N: int = KINETIC_N) -> "AxisymState":
        return cls.from_function(n, lambda th: np.ones_like(th), N)

    @classmethod
    def vmf(cls, n: int, kappa: float, N: int = KINETIC_N) -> "AxisymState":
        return cls.from_function(n, lambda th: np.exp(kappa * (np.cos(th) - 1.0)), N)


def cell_weights(grid: ThetaGrid) -> np.ndarray:
    w = grid.cell_weights
    return w / w.sum()


def flux(state: AxisymState) -> float:
    """Axial mean velocity <cos theta>_g of the state."""
    return float(state.weights @ (np.cos(state.grid.half_nodes) * state.g_values))


def discrete_order_parameter(kappa: float, grid: ThetaGrid) -> float:
    """c(kappa) under the cell-center quadrature used by the relaxation solver."""
    w = cell_weights(grid)
    cos = np.cos(grid.half_nodes)
    m = w * np.exp(kappa * (cos - 1.0))
    return float(m @ cos / m.sum())


def discrete_equilibrium_kappa(rho: float, grid: ThetaGrid) -> float:
    """Positive root of rho c(kappa) = kappa under the cell quadrature, or 0."""
    f = lambda k: rho * discrete_order_parameter(k, grid) / k - 1.0
    lo = 1e-8
    if rho <= 0 or f(lo) <= 0:
        return 0.0
    return float(brentq(f, lo, rho, xtol=1e-14, rtol=4 * np.finfo(float).eps))


def discrete_critical_density(grid: ThetaGrid) -> float:
    """Density at which the linearization about the uniform state is neutral.

    The linearized operator is L_0 + rho b l^T with b = d_kappa L_kappa 1 and
    l the flux functional, so the threshold solves rho l^T (-L_0)^{-1} b = 1.
    It differs from n by O(h^2) because of the cell quadrature.
    """
    lower, diag, upper = operator_bands(grid, 0.0)
    L0 = np.diag(diag) + np.diag(upper, 1) + np.diag(lower, -1)
    one = AxisymState(grid, np.ones(grid.N))
    dk = 1e-5
    b = (apply_operator(one, dk) - apply_operator(one, -dk)) / (2 * dk)
    x = np.linalg.lstsq(-L0, b, rcond=None)[0]
    x -= cell_weights(grid) @ x
    return float(1.0 / (cell_weights(grid) @ (np.cos(grid.half_nodes) * x)))


def _face_coefficients(grid: ThetaGrid, kappa: float):
    """a_i = sin^{n-2} M(theta_i) / h at the interior faces, and the cell M values."""
    n = grid.n
    faces = grid.nodes[1:-1]
    m_face = np.exp(kappa * (np.cos(faces) - 1.0))
    m_cell = np.exp(kappa * (np.cos(grid.half_nodes) - 1.0))
    a = np.sin(faces) ** (n - 2) * m_face / grid.h
    return a, m_cell


def operator_bands(grid: ThetaGrid, kappa: float):
    """Bands (lower, diag, upper) of the linear operator L_kappa acting on g."""
    a, m = _face_coefficients(grid, kappa)
    vol = grid.cell_weights  # h sin^{n-2} at the cells
    # face i sits between cells i and i+1: F_i = a_i (g_{i+1}/m_{i+1} - g_i/m_i)
    upper = a / (vol[:-1] * m[1:])
    lower = a / (vol[1:] * m[:-1])
    diag = np.zeros(grid.N)
    diag[:-1] -= a / (vol[:-1] * m[:-1])
    diag[1:] -= a / (vol[1:] * m[1:])
    return lower, diag, upper


def apply_operator(state: AxisymState, kappa: float) -> np.ndarray:
    lower, diag, upper = operator_bands(state.grid, kappa)
    g = state.g_values
    out = diag * g
    out[:-1] += upper * g[1:]
    out[1:] += lower * g[:-1]
    return out


def dissipation(state: AxisymState, rho: float) -> float:
    """Discrete <Q(g) g / M> with M the VMF of concentration rho J[g].

    Equals minus a sum of squares of face differences of g/M, so it is never
    positive.  M is normalized to unit mass so the value is scale free.
    """
    grid = state.grid
    kappa = rho * flux(state)
    a, m = _face_coefficients(grid, kappa)
    w = cell_weights(grid)
    z = float(w @ m)
    u = state.g_values / (m / z)
    return float(-np.sum(a / z * np.diff(u) ** 2) / grid.cell_weights.sum())


def max_stable_dt(rho: float) -> float:
    """Largest step for which the frozen-kappa coupling stays accurate."""
    return 1.0 / max(rho, 1.0)


def step(state: AxisymState, rho: float, dt: float) -> AxisymState:
    if not dt > 0:
        raise InvalidInputError("dt must be > 0")
    limit = max_stable_dt(rho)
    if dt > limit:
        raise StabilityError(f"dt={dt:g} exceeds the admissible step {limit:g} at rho={rho:g}", max_dt=limit)
    kappa = rho * flux(state)
    lower, diag, upper = operator_bands(state.grid, kappa)
    g = banded_solve(-dt * lower, 1.0 - dt * diag, -dt * upper, state.g_values)
    if not np.all(np.isfinite(g)):
        raise NumericalBreakdownError("non-finite values after a kinetic step")
    # the implicit matrix is an M-matrix; clip round-off negatives only
    g = np.maximum(g, 0.0)
    return AxisymState(state.grid, g, state.time + dt)


def weighted_distance(state: AxisymState, reference: np.ndarray) -> float:
    d = state.g_values - reference
    return math.sqrt(float(state.weights @ (d * d)))


@dataclass
class RelaxationResult:
    kind: RateKind
    value: float  # decay rate, or log-log slope for the algebraic case
    rho: float
    kappa_equilibrium: float
    kappa_final: float
    times: np.ndarray = field(repr=False)
    J: np.ndarray = field(repr=False)
    distance: np.ndarray = field(repr=False)
    dissipation: np.ndarray = field(repr=False)
    mass_drift: float = 0.0

    def rows(self):
        return list(zip(self.times, self.J, self.distance, self.dissipation))


CSV_COLUMNS = ("time", "J", "L2_distance", "dissipation")


def _classify(n: int, rho: float, J0: float) -> RateKind:
    if abs(J0) < 1e-13:
        return RateKind.HEAT_MODE
    if rho < n:
        return RateKind.EXPONENTIAL_GLOBAL
    if rho == n:
        return RateKind.ALGEBRAIC_HALF
    return RateKind.EXPONENTIAL_ASYMPTOTIC


def relax_and_fit(
    n: int,
    rho: float,
    g0: AxisymState,
    T: float,
    dt: float = 1e-3,
    record_every: int = 1,
    window: tuple[float, float] = (0.5, 1.0),
    kind: RateKind | None = None,
) -> RelaxationResult:
    """Integrate to time T and fit the late-time decay toward equilibrium.

    The reference equilibrium is the uniform state when rho <= n or the
    initial flux vanishes, and otherwise the discrete VMF profile at the
    discrete root of the compatibility condition.  The fit is the slope of
    log(distance) against t, or against log(t) when rho = n, over the
    fraction ``window`` of [0, T].  ``kind`` overrides the classification,
    e.g. to treat a run at the discrete critical density as algebraic.
    """
    if g0.grid.n != n:
        raise InvalidInputError("initial state built for another dimension")
    if not T > 0:
        raise InvalidInputError("T must be > 0")
    grid = g0.grid
    J0 = flux(g0)
    if kind is None:
        kind = _classify(n, rho, J0)
    if kind is RateKind.EXPONENTIAL_ASYMPTOTIC:
        k_eq = discrete_equilibrium_kappa(rho, grid)
        ref = AxisymState.vmf(n, k_eq, grid.N).g_values
    else:
        k_eq = 0.0
        ref = np.ones(grid.N)

    steps = int(math.ceil(T / dt - 1e-9))
    state = g0
    m0 = state.mass
    times, Js, dist, diss = [], [], [], []

    def record(s):
        d = dissipation(s, rho)
        if d > 1e-12 * max(1.0, abs(d)):
            raise NumericalBreakdownError(f"positive dissipation {d:.3e} at t={s.time:g}")
        times.append(s.time)
        Js.append(flux(s))
        dist.append(weighted_distance(s, ref))
        diss.append(d)

    record(state)
    for k in range(1, steps + 1):
        state = step(state, rho, dt)
        if k % record_every == 0 or k == steps:
            record(state)
    times_a, dist_a = np.array(times), np.array(dist)

    lo, hi = window[0] * T, window[1] * T
    sel = (times_a >= lo - 1e-12) & (times_a <= hi + 1e-12) & (times_a > 0)
    if np.count_nonzero(sel) < 3:
        raise InvalidInputError("fit window holds fewer than 3 samples")
    late = dist_a[sel]
    if np.any(late <= 0) or np.any(np.diff(late) > 1e-10 * late[:-1]):
        raise EquilibriumMismatchError(
            f"distance to the reference equilibrium is not decreasing on [{lo:g}, {hi:g}]"
        )
    y = np.log(late)
    if kind is RateKind.ALGEBRAIC_HALF:
        value = float(np.polyfit(np.log(times_a[sel]), y, 1)[0])
    else:
        value = -float(np.polyfit(times_a[sel], y, 1)[0])
    return RelaxationResult(
        kind=kind,
        value=value,
        rho=rho,
        kappa_equilibrium=k_eq,
        kappa_final=rho * flux(state),
        times=times_a,
        J=np.array(Js),
        distance=dist_a,
        dissipation=np.array(diss),
        mass_drift=abs(state.mass - m0),
    )


def perturbed_uniform(n: int, amplitude: float = 0.1, N: int = KINETIC_N, degree: int = 1) -> AxisymState:
    """1 + a cos(theta) (degree 1) or 1 + a (cos^2 - 1/n) (degree 2, zero flux)."""
    if degree == 1:
        return AxisymState.from_function(n, lambda th: 1.0 + amplitude * np.cos(th), N)
    if degree == 2:
        return AxisymState.from_function(n, lambda th: 1.0 + amplitude * (np.cos(th) ** 2 - 1.0 / n), N)
    raise InvalidInputError("degree must be 1 or 2")
