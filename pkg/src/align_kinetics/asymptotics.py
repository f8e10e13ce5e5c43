"""Truncated asymptotic expansions of the closure coefficients.

These serve as oracles independent of the quadrature and GCI solvers.  Each
quantity is available as a function of the concentration kappa or of the
density rho, near the threshold (kappa -> 0, rho -> n) or for large
argument (kappa, rho -> infinity).

Two notes on the large-density forms:

* The rho**-2 coefficient of c is ``-(n-1)(n+1)/8``.  This follows from the
  exact relation c = kappa/rho together with the inverted expansion
  ``kappa = rho - (n-1)/2 - (n-1)(n+1)/(8 rho)``; for n = 3, where
  c = coth(kappa) - 1/kappa, it gives c = 1 - 1/rho - 1/rho**2.
* The rho**-2 coefficient of c_tilde, ``-(n+1)(3n+1)/24``, is what one gets
  by substituting kappa(rho) into the kappa-form ``(n+1)(3n-7)/24``; the two
  forms are consistent.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import AsymptoticRangeError
from .quadrature import check_dimension


class Quantity(enum.Enum):
    C = "c"
    C_TILDE = "c_tilde"
    LAMBDA = "lambda"
    THETA_C = "theta_c"
    RHO_OF_KAPPA = "rho_of_kappa"
    KAPPA_OF_RHO = "kappa_of_rho"


class Regime(enum.Enum):
    NEAR_THRESHOLD = "NearThreshold"
    LARGE_ARGUMENT = "LargeArgument"


class Variable(enum.Enum):
    KAPPA = "kappa"
    RHO = "rho"


# acceptance windows for each regime; outside them truncation error exceeds
# the tolerances the expansions are used with
NEAR_RHO_FRACTION = 0.1
NEAR_KAPPA_MAX = 0.3
LARGE_KAPPA_MIN = 20.0
LARGE_RHO_FACTOR = 20.0


@dataclass(frozen=True)
class ExpansionQuery:
    quantity: Quantity
    regime: Regime
    n: int
    x: float
    variable: Variable | None = None

    def resolved_variable(self) -> Variable:
        if self.variable is not None:
            return self.variable
        if self.quantity is Quantity.RHO_OF_KAPPA:
            return Variable.KAPPA
        if self.quantity is Quantity.KAPPA_OF_RHO:
            return Variable.RHO
        return self.variable or Variable.RHO


def _check_range(q: ExpansionQuery, var: Variable) -> None:
    n, x = q.n, q.x
    if var is Variable.KAPPA:
        if q.regime is Regime.NEAR_THRESHOLD:
            ok = 0 < x <= NEAR_KAPPA_MAX
        else:
            ok = x >= LARGE_KAPPA_MIN
    else:
        if q.regime is Regime.NEAR_THRESHOLD:
            ok = 0 < x - n <= NEAR_RHO_FRACTION * n
        else:
            ok = x >= LARGE_RHO_FACTOR * n
    if not ok:
        raise AsymptoticRangeError(
            f"{q.quantity.value} ({var.value}={x}) outside the accepted "
            f"{q.regime.value} range for n={n}"
        )


def _near_kappa(quantity: Quantity, n: int, k: float) -> float:
    if quantity is Quantity.C:
        return k / n - k**3 / (n**2 * (n + 2))
    if quantity is Quantity.C_TILDE:
        return (2 * n - 1) * k / (2 * n * (n + 2))
    if quantity is Quantity.LAMBDA:
        return -1.0 / (4.0 * k)
    if quantity is Quantity.THETA_C:
        return math.pi / 2 - 2.0 * k / ((n + 2) * math.sqrt(n))
    if quantity is Quantity.RHO_OF_KAPPA:
        return n + k**2 / (n + 2)
    raise AssertionError(quantity)


def _large_kappa(quantity: Quantity, n: int, k: float) -> float:
    if quantity is Quantity.C:
        return 1 - (n - 1) / (2 * k) + (n - 1) * (n - 3) / (8 * k**2)
    if quantity is Quantity.C_TILDE:
        return 1 - (n + 1) / (2 * k) + (n + 1) * (3 * n - 7) / (24 * k**2)
    if quantity is Quantity.LAMBDA:
        return -(n + 1) / (6 * k**2)
    if quantity is Quantity.THETA_C:
        return theta_c_large_limit(n)
    if quantity is Quantity.RHO_OF_KAPPA:
        return k + (n - 1) / 2 + (n - 1) * (n + 1) / (8 * k)
    raise AssertionError(quantity)


def _near_rho(quantity: Quantity, n: int, rho: float) -> float:
    d = math.sqrt(rho - n)
    if quantity is Quantity.C:
        return math.sqrt(n + 2) / n * d
    if quantity is Quantity.C_TILDE:
        return (2 * n - 1) / (2 * n * math.sqrt(n + 2)) * d
    if quantity is Quantity.LAMBDA:
        return -1.0 / (4 * math.sqrt(n + 2) * d)
    if quantity is Quantity.THETA_C:
        return math.pi / 2 - 2.0 / (math.sqrt(n + 2) * math.sqrt(n)) * d
    if quantity is Quantity.KAPPA_OF_RHO:
        return math.sqrt(n + 2) * d
    raise AssertionError(quantity)


def _large_rho(quantity: Quantity, n: int, rho: float) -> float:
    if quantity is Quantity.C:
        return 1 - (n - 1) / (2 * rho) - (n - 1) * (n + 1) / (8 * rho**2)
    if quantity is Quantity.C_TILDE:
        return 1 - (n + 1) / (2 * rho) - (n + 1) * (3 * n + 1) / (24 * rho**2)
    if quantity is Quantity.LAMBDA:
        return -(n + 1) / (6 * rho**2)
    if quantity is Quantity.THETA_C:
        return theta_c_large_limit(n)
    if quantity is Quantity.KAPPA_OF_RHO:
        return rho - (n - 1) / 2 - (n - 1) * (n + 1) / (8 * rho)
    raise AssertionError(quantity)


def theta_c_large_limit(n: int) -> float:
    """Limit of the critical angle as the density goes to infinity."""
    return math.atan(math.sqrt(n + 1) * math.sqrt(6) / 4)


def asymptotic_value(q: ExpansionQuery) -> float:
    n = check_dimension(q.n)
    var = q.resolved_variable()
    if q.quantity is Quantity.RHO_OF_KAPPA and var is not Variable.KAPPA:
        raise AsymptoticRangeError("rho_of_kappa takes a concentration")
    if q.quantity is Quantity.KAPPA_OF_RHO and var is not Variable.RHO:
        raise AsymptoticRangeError("kappa_of_rho takes a density")
    _check_range(q, var)
    if var is Variable.KAPPA:
        table = _near_kappa if q.regime is Regime.NEAR_THRESHOLD else _large_kappa
    else:
        table = _near_rho if q.regime is Regime.NEAR_THRESHOLD else _large_rho
    return table(q.quantity, n, float(q.x))


def expansion(quantity: str, regime: str, n: int, x: float, variable: str | None = None) -> float:
    """String-keyed shortcut around :func:`asymptotic_value`."""
    return asymptotic_value(
        ExpansionQuery(
            Quantity(quantity),
            Regime(regime),
            n,
            x,
            Variable(variable) if variable else None,
        )
    )
