"""
Exception hierarchy for the Köthe workbench.

Analytic outcomes are never raised; they come back as Verdicts. Exceptions
are reserved for malformed input, violated preconditions and internal
consistency failures. The CLI maps the three families to exit codes 1, 2, 3.
"""

from typing import Optional


class KoetheError(Exception):
    """Base class for all workbench errors."""

    exit_code = 1


class ConfigError(KoetheError):
    """Space definition or configuration file is invalid."""

    exit_code = 1


class WeightExprError(ConfigError):
    """Weight expression failed to parse or evaluates to a negative value."""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class UnknownFamilyError(ConfigError):
    """Requested builtin family id is not in the catalog."""


class IndexSetMismatchError(KoetheError):
    """Two families live on different index sets."""

    exit_code = 2


class PreconditionError(KoetheError):
    """An operation was called outside its hypotheses."""

    exit_code = 2


class NotAnAlgebraError(PreconditionError):
    """λ(P) is not (known to be) closed under pointwise multiplication."""


class HypothesisError(PreconditionError):
    """Theorem hypotheses required by a construction are not met."""


class CertificateMissingError(PreconditionError):
    """A construction needs a certificate that is absent or lacks the level."""


class TailBoundError(PreconditionError):
    """A tail bound cannot be achieved at the requested depth."""

    def __init__(self, message: str, needed_depth: Optional[int] = None):
        self.needed_depth = needed_depth
        if needed_depth is not None:
            message = f"{message}; needs depth >= {needed_depth}"
        super().__init__(message)


class WitnessSearchError(PreconditionError):
    """A witness scan ran out of indices before completing."""

    def __init__(self, message: str, failing_level: Optional[int] = None,
                 deepest: Optional[int] = None):
        self.failing_level = failing_level
        self.deepest = deepest
        super().__init__(message)


class InconsistentProfileError(KoetheError):
    """A condition profile claims U without B, N and M."""

    exit_code = 2


class ConsistencyError(KoetheError):
    """A computed homological profile violates a theorem-level assertion."""

    exit_code = 3
