"""Exception hierarchy shared across the package."""


class ParameterError(ValueError):
    """Invalid physical parameters, pulses, or input states."""


class NumericalError(RuntimeError):
    """Base class for failures of the numerical machinery."""


class IntegrationAccuracyError(NumericalError):
    """Step-halving check disagreed by more than the allowed tolerance."""


class RingDownError(NumericalError):
    """The time window ended before the cavities and atom emptied."""


class BudgetError(NumericalError):
    """Probability bookkeeping does not close."""


class TruncationError(ParameterError):
    """A Fock-space cutoff is too small for the requested state."""
