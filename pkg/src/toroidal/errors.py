"""Exception hierarchy shared by every module.

Each error carries a short ``kind`` string (used verbatim in CLI reports),
an optional ``witness`` (the offending object, rendered with ``str``) and
the CLI exit status it maps to.
"""

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class ToroidalError(Exception):
    exit_code = EXIT_INPUT

    def __init__(self, message="", witness=None):
        super().__init__(message)
        self.witness = witness

    @property
    def kind(self):
        return type(self).__name__


class DivisionByZero(ToroidalError, ZeroDivisionError):
    pass


class FieldMismatch(ToroidalError):
    pass


class NotInBaseField(ToroidalError):
    pass


class RankDeficient(ToroidalError):
    pass


class NotSaturated(ToroidalError):
    pass


class NoPositiveGrading(ToroidalError):
    pass


class InvalidPoint(ToroidalError):
    pass


class NotAUnit(ToroidalError):
    pass


class ModelMismatch(ToroidalError):
    pass


class BadConstantTerm(ToroidalError):
    pass


class NotMonomialTimesUnit(ToroidalError):
    pass


class SearchExhausted(ToroidalError):
    pass


class SingularMatrix(ToroidalError):
    pass


class NotLogSmooth(ToroidalError):
    exit_code = EXIT_NEGATIVE


class ResidueFieldHypothesisViolated(ToroidalError):
    exit_code = EXIT_NEGATIVE


class RootExtractionFailed(ToroidalError):
    exit_code = EXIT_NEGATIVE


class Condition1Violated(ToroidalError):
    exit_code = EXIT_NEGATIVE


class ParseError(ToroidalError):
    pass


class ValidationError(ToroidalError):
    pass


class InvariantBreach(ToroidalError):
    """A library-level identity failed; always a bug, never bad input."""

    exit_code = EXIT_INTERNAL
