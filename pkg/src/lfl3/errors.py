"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` used by the command line front end:
1 for bad input, 2 for "no bound could be produced", 3 for broken internal
invariants.
"""

from __future__ import annotations


class Lfl3Error(Exception):
    """Base class for all package errors."""

    exit_code = 3


class InputError(Lfl3Error):
    exit_code = 1


class InfeasibleError(Lfl3Error):
    exit_code = 2


class InternalError(Lfl3Error):
    exit_code = 3


# -- input errors -------------------------------------------------------------


class ParseError(InputError):
    """Malformed expression text or problem file."""

    def __init__(self, message: str, path: str | None = None):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class SchemaError(InputError):
    pass


class UndeclaredSymbol(InputError):
    pass


class DomainError(InputError):
    """Declared symbol domain is empty or unbounded below."""


class ProfileUnsupported(InputError):
    pass


class ScaleExceeded(InputError):
    """Oracle query larger than the brute-force caps."""


# -- infeasibility ------------------------------------------------------------


class DomainViolation(InfeasibleError):
    """An operation left its mathematical domain (log of <= 0, division by 0, ...)."""


class UnboundedAbove(InfeasibleError):
    pass


class TailAnalysisFailed(InfeasibleError):
    """The asymptotic analysis could not decide the behaviour as Y -> infinity."""


class PreconditionUnverifiable(InfeasibleError):
    pass


class HypothesisFailed(InfeasibleError):
    pass


class NoBoundExtractable(InfeasibleError):
    pass


class ConversionSlackTooLarge(InfeasibleError):
    pass


class DenominatorNonpositive(InfeasibleError):
    pass


class NoConstantUBound(InfeasibleError):
    pass


class ProviderHypothesisFailed(InfeasibleError):
    pass


class NoFeasibleParams(InfeasibleError):
    pass


# -- internal -----------------------------------------------------------------


class InvariantViolated(InternalError):
    pass
