"""Exception hierarchy shared across the package."""


class FuzzydeckError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FuzzydeckError):
    """A value lies outside the declared domain [a, b]."""


class ParameterError(FuzzydeckError):
    """An algorithm parameter violates its precondition (e.g. fuzzifier <= 1)."""


class OrderingError(FuzzydeckError):
    """A sequence that must be strictly increasing is not."""


class DegenerateClusterError(FuzzydeckError):
    """A cluster lost all membership mass during an update."""


class PrecisionError(FuzzydeckError):
    """Card encoding failed because two values collide at the chosen precision."""


class EditError(FuzzydeckError):
    """A card edit would leave the chain in an invalid state."""


class StageError(FuzzydeckError):
    """A pipeline operation was requested in the wrong session stage."""


class DatasetError(FuzzydeckError):
    """Dataset ingestion failed (missing column, empty data, bad bounds)."""


class InsufficientDataError(FuzzydeckError):
    """Not enough data points to run the requested refinement."""


class ReplayDivergenceError(FuzzydeckError):
    """A transcript replay produced a result that differs from the recorded one."""

    def __init__(self, message: str, step_index: int | None = None):
        super().__init__(message)
        self.step_index = step_index
