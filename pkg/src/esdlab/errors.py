"""Exception hierarchy shared by all esdlab modules."""


class EsdLabError(Exception):
    """Base class for every error raised by esdlab."""


class InvalidState(EsdLabError, ValueError):
    """Input is not a valid two-qubit density matrix."""


class NotHermitian(InvalidState):
    pass


class NotXState(EsdLabError, ValueError):
    """A state has non-negligible weight outside the X pattern."""


class SeparableInput(EsdLabError, ValueError):
    """An operation that needs an entangled input received a separable one."""


class CaseMismatch(EsdLabError, ValueError):
    """A closed form was requested for a state outside its validity case."""


class FiniteTemperature(EsdLabError, ValueError):
    """Raised where a zero-temperature result is requested for thermal reservoirs."""


class EigenNonConvergence(EsdLabError, ArithmeticError):
    pass


class StepBudgetExceeded(EsdLabError, RuntimeError):
    pass
