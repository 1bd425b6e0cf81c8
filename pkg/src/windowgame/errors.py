"""Exception types shared across the package."""


class WindowGameError(Exception):
    """Base class for all package errors."""


class ZeroLikelihood(WindowGameError):
    """A Bayes update conditioned on an event of probability zero.

    Raised instead of returning a zero belief so that callers enumerating
    windows can prune unreachable branches explicitly.
    """

    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


class InfeasibleEnumeration(WindowGameError):
    """An exhaustive enumeration exceeded the configured node budget."""


class SizeOverflow(WindowGameError):
    """A requested construction exceeds the configured size budgets."""


class NumericalInconsistency(WindowGameError):
    """A quantity that must be stochastic or bounded drifted beyond tolerance."""


class NotZeroSum(WindowGameError):
    """The game handed to the zero-sum solver is not a two-player zero-sum game."""


class NotCertified(WindowGameError):
    """Certification was requested for a profile that is not an equilibrium."""


class UnknownWindow(WindowGameError):
    """A lifted strategy was queried at a window that is not a state of its game."""


class ModelFormatError(WindowGameError):
    """A model document is malformed; `section` names the offending part."""

    def __init__(self, section, message):
        super().__init__(f"{section}: {message}")
        self.section = section
