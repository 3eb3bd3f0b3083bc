"""Exception and warning types shared across the package."""


class ConfigError(ValueError):
    """Invalid or incomplete configuration."""


class UnstableRegimeError(ArithmeticError):
    """The effective-velocity denominator is not positive.

    The signed ratio is kept on the exception so callers can report it.
    """

    def __init__(self, message, value):
        super().__init__(message)
        self.value = value


class InfeasibleDesignError(ValueError):
    """No admissible operating point exists for the requested design."""


class ZeroBandwidthError(ValueError):
    """The centre frequency already violates a bandwidth budget."""


class NumericalInstabilityError(RuntimeError):
    """A simulated field became non-finite."""


class ExpansionValidityWarning(UserWarning):
    """A small-parameter expansion is being used outside its range."""


class DegenerateDesignWarning(UserWarning):
    """Balance solution with both detunings equal to zero."""


class PulseBandwidthWarning(UserWarning):
    """Pulse too broadband for the adiabatic phonon elimination."""
