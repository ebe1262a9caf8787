"""Shared exception types.

Every raise in the package goes through one of these (or builtin
OverflowError for certainty equivalents whose shifted computation still
leaves the representable range), so callers can branch on failure modes
without string matching.
"""


class DomainError(ValueError):
    """Argument lies outside the finiteness domain of a cumulant or price map."""


class NonDifferentiableError(DomainError):
    """Derivative requested at a point where the cumulant has none."""


class ParameterError(ValueError):
    """Model or agent parameters violate their constraints."""


class ScheduleError(ValueError):
    """Endowment shock schedule is inconsistent with itself or with a grid."""


class QuadratureError(ArithmeticError):
    """Gaussian quadrature produced a non-finite node value or weight sum."""


class NoRootError(RuntimeError):
    """Bracketing root search found no sign change (completeness failure)."""


class PreconditionError(ValueError):
    """A documented operation precondition failed at call time."""


class ConfigError(ValueError):
    """Run configuration is malformed; carries the offending field name."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
