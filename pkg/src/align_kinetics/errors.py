"""Exception hierarchy shared by the solvers and the CLI."""


class AlignKineticsError(Exception):
    """Base class for all package errors."""


class InvalidInputError(AlignKineticsError, ValueError):
    pass


class AsymptoticRangeError(AlignKineticsError, ValueError):
    """An expansion was queried outside the regime where it is accepted."""


class NumericalBreakdownError(AlignKineticsError, ArithmeticError):
    """Zero pivot, failed inverse iteration, violated dissipation, ..."""


class StabilityError(AlignKineticsError, ValueError):
    """Time step outside the admissible range of a scheme."""

    def __init__(self, message, max_dt=None):
        super().__init__(message)
        self.max_dt = max_dt


class ValidityLossError(AlignKineticsError):
    """The diffusion model was driven too close to the threshold density."""


class HyperbolicityLossError(AlignKineticsError):
    """A hydrodynamic cell left the hyperbolic safety region."""

    def __init__(self, message, cells=()):
        super().__init__(message)
        self.cells = tuple(cells)


class ConfigurationError(AlignKineticsError, ValueError):
    pass


class EquilibriumMismatchError(AlignKineticsError):
    """A relaxation run does not approach the equilibrium it is fitted against."""
