"""Exception hierarchy shared by all modules."""


class ThermoQfiError(Exception):
    """Base class for library errors."""


class ShapeError(ThermoQfiError, ValueError):
    pass


class DomainError(ThermoQfiError, ValueError):
    pass


class UnsupportedModelError(ThermoQfiError, NotImplementedError):
    """No closed form is available for the requested model size."""


class StiffnessError(ThermoQfiError, RuntimeError):
    """Time integration lost positivity; retry with a smaller step."""


class NonUniqueSteadyStateError(ThermoQfiError, RuntimeError):
    pass


class NumericalFailure(ThermoQfiError, ArithmeticError):
    pass


class DerivativeError(NumericalFailure):
    pass
