import math

import pytest

from align_kinetics.asymptotics import (
    ExpansionQuery,
    Quantity,
    Regime,
    Variable,
    asymptotic_value,
    expansion,
    theta_c_large_limit,
)
from align_kinetics.errors import AsymptoticRangeError
from align_kinetics.quadrature import order_parameter


def test_theta_c_limit_n2():
    assert theta_c_large_limit(2) == pytest.approx(math.atan(math.sqrt(18) / 4))
    assert expansion("theta_c", "LargeArgument", 2, 1e3) == pytest.approx(0.81483, abs=1e-5)


def test_lambda_near_threshold():
    n, d = 3, 1e-4
    ref = -1.0 / (4 * math.sqrt(n + 2) * math.sqrt(d))
    assert expansion("lambda", "NearThreshold", n, n + d) == pytest.approx(ref, rel=1e-9)


def test_c_large_density_three_terms():
    # the second-order term carries a minus sign; it matches the exact c better
    v = expansion("c", "LargeArgument", 3, 100.0)
    assert v == pytest.approx(0.9899, abs=1e-12)
    from align_kinetics.equilibria import kappa_of_rho

    exact = order_parameter(kappa_of_rho(100.0, 3).kappa, 3)
    assert abs(v - exact) < abs(0.9901 - exact)


def test_kappa_variable():
    q = ExpansionQuery(Quantity.C, Regime.NEAR_THRESHOLD, 3, 0.05, Variable.KAPPA)
    assert asymptotic_value(q) == pytest.approx(0.05 / 3 - 0.05**3 / 45)


def test_rho_of_kappa_large():
    assert expansion("rho_of_kappa", "LargeArgument", 3, 100.0) == pytest.approx(101.01)


@pytest.mark.parametrize(
    "quantity,regime,x,variable",
    [
        ("c", "NearThreshold", 10.0, None),
        ("c", "LargeArgument", 7.0, None),
        ("lambda", "NearThreshold", 2.0, "kappa"),
        ("c_tilde", "LargeArgument", 5.0, "kappa"),
    ],
)
def test_out_of_range(quantity, regime, x, variable):
    with pytest.raises(AsymptoticRangeError):
        expansion(quantity, regime, 3, x, variable)


def test_wrong_variable_for_inverse_maps():
    with pytest.raises(AsymptoticRangeError):
        asymptotic_value(ExpansionQuery(Quantity.RHO_OF_KAPPA, Regime.LARGE_ARGUMENT, 3, 100.0, Variable.RHO))
