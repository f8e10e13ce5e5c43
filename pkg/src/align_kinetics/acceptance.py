"""Acceptance checks shared by the test suite and ``align-kinetics validate``.

Each check returns a :class:`CriterionResult` whose ``lines`` record the
measured quantities next to their targets, so a failure is self-explaining.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics as asy
from .errors import HyperbolicityLossError
from .gci import c_tilde, closure_coefficients, closure_coefficients_at_kappa, coefficient_arrays
from .kinetic import AxisymState, discrete_critical_density, perturbed_uniform, relax_and_fit
from .macro import (
    CoefficientTable,
    DiffusionState1D,
    HydroState1D,
    _speeds,
    diffusion_mode_rate,
    diffusion_step,
    hydro_step_1d,
    measure_wave_speed,
    run_hydro,
)
from .equilibria import kappa_of_rho
from .particles import run_homogeneous
from .quadrature import ThetaGrid, order_parameter
from .spectrum import RateKind, convergence_rate, poincare_constant

DIMENSIONS = (2, 3, 4)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool = True
    lines: list[str] = field(default_factory=list)

    def check(self, ok: bool, text: str) -> None:
        self.passed &= bool(ok)
        self.lines.append(("ok   " if ok else "FAIL ") + text)

    def summary(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.title}"


def _rel(a, b):
    return abs(a - b) / abs(b)


def small_kappa_asymptotics() -> CriterionResult:
    res = CriterionResult(1, "small-kappa asymptotics of c and c_tilde")
    k = 0.05
    for n in DIMENSIONS:
        c = order_parameter(k, n)
        ref_c = k / n
        res.check(abs(c - ref_c) <= 0.02 * ref_c, f"n={n}: c={c:.8g}, kappa/n={ref_c:.8g}, rel {_rel(c, ref_c):.2e} <= 2e-2")
        ct = c_tilde(k, n)
        ref_t = (2 * n - 1) * k / (2 * n * (n + 2))
        res.check(abs(ct - ref_t) <= 0.05 * ref_t, f"n={n}: c_tilde={ct:.8g}, ref={ref_t:.8g}, rel {_rel(ct, ref_t):.2e} <= 5e-2")
    return res


def large_kappa_asymptotics() -> CriterionResult:
    res = CriterionResult(2, "large-kappa asymptotics of c, c_tilde, lambda")
    k = 50.0
    for n in DIMENSIONS:
        co = closure_coefficients_at_kappa(n, k)
        ref_c = 1 - (n - 1) / (2 * k)
        ref_t = 1 - (n + 1) / (2 * k)
        ref_l = -(n + 1) / (6 * k * k)
        res.check(_rel(co.c, ref_c) <= 5e-3, f"n={n}: c={co.c:.8g} vs {ref_c:.8g}, rel {_rel(co.c, ref_c):.2e} <= 5e-3")
        res.check(_rel(co.c_tilde, ref_t) <= 5e-3, f"n={n}: c_tilde={co.c_tilde:.8g} vs {ref_t:.8g}, rel {_rel(co.c_tilde, ref_t):.2e} <= 5e-3")
        res.check(_rel(co.lam, ref_l) <= 5e-2, f"n={n}: lambda={co.lam:.6e} vs {ref_l:.6e}, rel {_rel(co.lam, ref_l):.2e} <= 5e-2")
    return res


def theta_c_limits() -> CriterionResult:
    res = CriterionResult(3, "critical angle limits")
    for n in DIMENSIONS:
        near = closure_coefficients(n, n + 1e-4).theta_c
        res.check(abs(near - math.pi / 2) <= 0.02, f"n={n}: theta_c(n+1e-4)={near:.6f}, |. - pi/2|={abs(near - math.pi / 2):.2e} <= 0.02")
        far = closure_coefficients(n, 100.0 * n).theta_c
        ref = asy.theta_c_large_limit(n)
        res.check(_rel(far, ref) <= 0.01, f"n={n}: theta_c(100n)={far:.6f} vs {ref:.6f}, rel {_rel(far, ref):.2e} <= 1e-2")
    return res


def lambda_negativity() -> CriterionResult:
    res = CriterionResult(4, "lambda < 0 on (n, 10n]")
    for n in DIMENSIONS:
        rho = n + 9.0 * n * np.arange(1, 201) / 200
        lam = coefficient_arrays(n, rho)["lam"]
        res.check(bool(np.all(lam < 0)), f"n={n}: max lambda over 200 points = {lam.max():.4e} < 0")
    return res


def rate_formulas() -> CriterionResult:
    res = CriterionResult(5, "relaxation rate formulas")
    for n in DIMENSIONS:
        below = [convergence_rate(n, r).rate for r in np.linspace(0, n, 7)[:-1]]
        exact = [(n - 1) * (n - r) / n for r in np.linspace(0, n, 7)[:-1]]
        res.check(below == exact, f"n={n}: rho<n branch equals (n-1)(n-rho)/n")
        rho = n * (1 + 1e-3)
        r = convergence_rate(n, rho).rate
        ref = 2 * (n - 1) * (rho / n - 1)
        res.check(_rel(r, ref) <= 0.1, f"n={n}: r(n(1+1e-3))={r:.6e} vs {ref:.6e}, rel {_rel(r, ref):.2e} <= 0.1")
        lo = convergence_rate(n, n - 1e-5).rate
        hi = convergence_rate(n, n + 1e-5).rate
        at = convergence_rate(n, float(n)).rate
        res.check(max(lo, hi, at) <= 1e-3, f"n={n}: r(n-1e-5)={lo:.2e}, r(n)={at:.1e}, r(n+1e-5)={hi:.2e} <= 1e-3")
        grid = np.linspace(n + 0.5, 10 * n, 50)
        rates = np.array([convergence_rate(n, float(g)).rate for g in grid])
        res.check(bool(np.all(np.diff(rates) > 0)), f"n={n}: r increasing on [n+0.5, 10n] (min step {np.diff(rates).min():.3e})")
    return res


def spectral_anchors() -> CriterionResult:
    res = CriterionResult(6, "spectral anchors of the Poincare constant")
    for n in DIMENSIONS:
        p = poincare_constant(n, 0.0, 300)
        res.check(abs(p.poincare - (n - 1)) <= 1e-3, f"n={n}: Lambda_0={p.poincare:.8f} vs {n - 1}, err {abs(p.poincare - (n - 1)):.2e} <= 1e-3")
    for k in (0.5, 1.0, 2.0, 5.0):
        p = poincare_constant(2, k)
        res.check(_rel(p.lambda_0, p.lambda_1) <= 1e-3, f"n=2, kappa={k}: lambda_0={p.lambda_0:.10f}, lambda_1={p.lambda_1:.10f}")
    # at kappa = 0 the bound is attained, so the discrete value may sit below
    # it by the grid error; the same 1e-3 tolerance as the anchor above applies
    worst, slack = math.inf, math.inf
    for n in DIMENSIONS:
        for k in np.linspace(0.0, 10.0, 21):
            p = poincare_constant(n, float(k))
            slack = min(slack, p.poincare - p.lower_bound)
            if k > 0:
                worst = min(worst, p.poincare / p.lower_bound)
    res.check(slack >= -1e-3, f"Lambda_kappa - (n-1) e^(-2 kappa) >= -1e-3 on [0, 10], min {slack:.3e}")
    res.check(worst > 1.0, f"Lambda_kappa / ((n-1) e^(-2 kappa)) > 1 for kappa in (0, 10], min ratio {worst:.4g}")
    p = poincare_constant(3, 20.0)
    ratio = p.lambda_1 / 20.0
    res.check(0.8 <= ratio <= 1.2, f"n=3, kappa=20: lambda_1/kappa={ratio:.5f} in [0.8, 1.2]")
    return res


# settings for the four kinetic runs (n = 3, N = 400)
KINETIC_RUNS = {
    "disordered": dict(rho=2.0, T=8.0, dt=1e-3),
    "ordered": dict(rho=4.0, T=12.0, dt=1e-3),
    "threshold": dict(rho=None, T=12000.0, dt=0.1),  # discrete critical density
    "zero_flux": dict(rho=2.0, T=2.5, dt=1e-3),
}


def kinetic_relaxation() -> CriterionResult:
    res = CriterionResult(7, "kinetic relaxation rates (n = 3)")
    n, N = 3, 400
    cfg = KINETIC_RUNS["disordered"]
    r = relax_and_fit(n, cfg["rho"], perturbed_uniform(n, 0.1, N), cfg["T"], cfg["dt"], record_every=10)
    res.check(_rel(r.value, 2 / 3) <= 0.05, f"rho=2: rate {r.value:.5f} vs 2/3, rel {_rel(r.value, 2 / 3):.2e} <= 5e-2")

    cfg = KINETIC_RUNS["ordered"]
    r = relax_and_fit(n, cfg["rho"], AxisymState.vmf(n, 1.0, N), cfg["T"], cfg["dt"], record_every=10)
    pred = convergence_rate(n, cfg["rho"]).rate
    res.check(r.value >= 0.85 * pred, f"rho=4: rate {r.value:.5f} vs predicted bound {pred:.5f}, ratio {r.value / pred:.3f} >= 0.85")
    k_ref = kappa_of_rho(cfg["rho"], n).kappa
    res.check(_rel(r.kappa_final, k_ref) <= 0.02, f"rho=4: final rho*J={r.kappa_final:.5f} vs kappa(4)={k_ref:.5f}")

    cfg = KINETIC_RUNS["threshold"]
    g0 = perturbed_uniform(n, 0.1, N)
    rho_c = discrete_critical_density(g0.grid)
    r = relax_and_fit(n, rho_c, g0, cfg["T"], cfg["dt"], record_every=50, kind=RateKind.ALGEBRAIC_HALF)
    res.check(abs(r.value + 0.5) <= 0.1, f"rho=n (discrete {rho_c:.8f}): log-log slope {r.value:.4f} vs -0.5 +- 0.1")

    cfg = KINETIC_RUNS["zero_flux"]
    r = relax_and_fit(n, cfg["rho"], perturbed_uniform(n, 0.1, N, degree=2), cfg["T"], cfg["dt"], record_every=10)
    res.check(_rel(r.value, 6.0) <= 0.05, f"J=0: rate {r.value:.5f} vs 2n=6, rel {_rel(r.value, 6.0):.2e} <= 5e-2")
    res.check(float(np.max(np.abs(r.J))) < 1e-12, f"J=0: max |J(t)| = {np.max(np.abs(r.J)):.1e}")
    return res


PARTICLE_RUN = dict(Np=20000, T=40.0, dt=0.005, burn_in=20.0, seed=7)


def particle_agreement() -> CriterionResult:
    res = CriterionResult(8, "particle order parameter vs kinetic prediction (n = 3)")
    n = 3
    cfg = PARTICLE_RUN
    for rho in (4.0, 6.0):
        run = run_homogeneous(n, cfg["Np"], rho, cfg["T"], cfg["dt"], cfg["seed"], cfg["burn_in"])
        ref = kappa_of_rho(rho, n).kappa / rho
        res.check(_rel(run.stationary_order, ref) <= 0.05, f"rho={rho:g}: order {run.stationary_order:.5f} vs c(kappa(rho))={ref:.5f}, rel {_rel(run.stationary_order, ref):.2e} <= 5e-2")
    run = run_homogeneous(n, cfg["Np"], 2.0, cfg["T"], cfg["dt"], cfg["seed"], cfg["burn_in"])
    bound = 3.0 / math.sqrt(cfg["Np"])
    res.check(run.stationary_order <= bound, f"rho=2: order {run.stationary_order:.5f} <= 3 Np^(-1/2) = {bound:.5f}")
    return res


def hyperbolicity_equivalence() -> CriterionResult:
    res = CriterionResult(9, "discriminant sign vs tangent criterion on a 50x50 grid")
    for n in DIMENSIONS:
        rho = np.linspace(n + 0.05, 10 * n, 50)
        theta = np.linspace(0.0, math.pi, 50)
        d = coefficient_arrays(n, rho)
        u = np.cos(theta)[None, :]
        _, disc = _speeds(d["c"][:, None], d["c_tilde"][:, None], d["lam"][:, None], d["gamma"][:, None], u)
        tan_c = np.abs(d["c_tilde"] - d["gamma"]) / (2 * np.sqrt(-d["lam"] * d["c"]))
        tan = np.abs(np.tan(theta))[None, :]
        crit = tan < tan_c[:, None]
        mask = np.abs(disc) > 1e-6
        agree = (disc > 0) == crit
        frac = agree[mask].mean()
        res.check(frac == 1.0, f"n={n}: agreement {100 * frac:.1f}% on {mask.sum()} non-borderline cells")
    return res


def macroscopic_solvers() -> CriterionResult:
    res = CriterionResult(10, "diffusion and hydrodynamic solvers")
    n, rho0, eps = 3, 1.5, 1.0
    m, L = 128, 2 * math.pi
    dx = L / m
    x = (np.arange(m) + 0.5) * dx
    s = DiffusionState1D(rho0 + 0.01 * np.cos(x), dx, n, eps)
    m0 = s.mass
    for _ in range(1000):
        s = diffusion_step(s, 1e-3)
    drift = abs(s.mass - m0) / m0
    res.check(drift <= 1e-12, f"diffusion: relative mass drift over 1000 steps {drift:.2e} <= 1e-12")
    amp = 2.0 / m * abs(float(np.sum((s.rho - rho0) * np.cos(x))))
    rate = -math.log(amp / 0.01) / s.time
    ref = diffusion_mode_rate(n, rho0, 1.0, eps)
    res.check(_rel(rate, ref) <= 0.05, f"diffusion: mode decay {rate:.5f} vs {ref:.5f}, rel {_rel(rate, ref):.2e} <= 5e-2")

    table = CoefficientTable(3, 3.2, 15.0, 300)
    for rho_h, th in ((4.0, 0.0), (4.0, 0.4), (8.0, 0.3)):
        for fam in (0, 1):
            got, want = measure_wave_speed(table, rho_h, th, fam)
            res.check(_rel(got, want) <= 0.05, f"hydro rho={rho_h:g}, theta={th}: family {fam} speed {got:.5f} vs {want:.5f}")
    bad = HydroState1D.uniform(3, 32, 10.0, 4.0, 1.4)
    try:
        hydro_step_1d(bad, table, 1e-3)
        res.check(False, "hydro accepted a non-hyperbolic state")
    except HyperbolicityLossError as exc:
        res.check(len(exc.cells) == 32, f"hydro refused theta=1.4 at rho=4 ({len(exc.cells)} cells flagged)")
    return res


def _richardson(values):
    v = np.asarray(values, dtype=float)
    return (v[0] - v[1]) / (v[1] - v[2])


def hydro_self_convergence(cells=(200, 400, 800, 1600), T: float = 2.0):
    table = CoefficientTable(3, 3.2, 15.0, 300)
    L = 20.0
    sols = []
    for m in cells:
        s0 = HydroState1D.uniform(3, m, L, 5.0, 0.4)
        x = s0.x
        s = HydroState1D(5.0 + 0.3 * np.sin(2 * np.pi * x / L), np.cos(0.4 + 0.05 * np.cos(2 * np.pi * x / L)), s0.v, s0.dx)
        sols.append(run_hydro(s, table, T, cfl=0.5))
    errs = []
    for a, b in zip(sols[:-1], sols[1:]):
        fine = b.rho.reshape(-1, 2).mean(axis=1)
        errs.append(math.sqrt(float(np.mean((a.rho - fine) ** 2))))
    orders = [math.log2(errs[i] / errs[i + 1]) for i in range(len(errs) - 1)]
    return errs, orders


def scheme_orders() -> CriterionResult:
    res = CriterionResult(11, "grid convergence orders")
    n, k = 3, 1.0
    Ns = (150, 300, 600)
    c = [order_parameter(k, n, ThetaGrid(n, N)) for N in Ns]
    ct = [c_tilde(k, n, N) for N in Ns]
    spectra = [poincare_constant(n, k, N) for N in Ns]
    for name, vals in (
        ("c", c),
        ("c_tilde", ct),
        ("lambda_0", [p.lambda_0 for p in spectra]),
        ("lambda_1", [p.lambda_1 for p in spectra]),
    ):
        ratio = _richardson(vals)
        res.check(abs(ratio - 4.0) <= 0.5, f"n=3, kappa=1: Richardson ratio of {name} = {ratio:.4f} (4 +- 0.5)")
    errs, orders = hydro_self_convergence()
    res.check(all(0.8 <= p <= 1.2 for p in orders), f"hydro self-convergence orders {', '.join(f'{p:.3f}' for p in orders)} in [0.8, 1.2]")
    return res


CRITERIA = {
    1: small_kappa_asymptotics,
    2: large_kappa_asymptotics,
    3: theta_c_limits,
    4: lambda_negativity,
    5: rate_formulas,
    6: spectral_anchors,
    7: kinetic_relaxation,
    8: particle_agreement,
    9: hyperbolicity_equivalence,
    10: macroscopic_solvers,
    11: scheme_orders,
}


def run_criteria(numbers=None) -> list[CriterionResult]:
    numbers = sorted(CRITERIA) if numbers is None else list(numbers)
    return [CRITERIA[k]() for k in numbers]
