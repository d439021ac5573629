"""Exception hierarchy shared by all modules."""


class PainleveError(Exception):
    """Base class for every error raised by this package."""


class ConfigurationError(PainleveError, ValueError):
    """Inconsistent inputs: mismatched jets, bad orders, invalid N."""


class OutOfWindowError(PainleveError):
    """A Laurent coefficient was requested outside the trusted window."""


class DegeneracyError(PainleveError):
    """A uniqueness or solvability argument does not apply to the data."""


class NumericalConditioningError(PainleveError):
    """A numerical step lost too much accuracy to be trusted."""


class CompatibilityError(PainleveError):
    """The right-hand side at a resonance is not in the column space."""


class InternalConsistencyError(PainleveError):
    """A system that theory says is regular turned out singular."""


class SingularityError(PainleveError):
    """Evaluation requested at (or numerically on top of) a singular point."""

    def __init__(self, message, nearest=None):
        super().__init__(message)
        self.nearest = nearest


class RefineStepsError(PainleveError):
    """Path continuation jumped too far between steps; use more steps."""
