"""Exception types shared across the package."""


class DivsimError(Exception):
    """Base class for errors raised by divsim."""


class PairFormatError(DivsimError):
    """A cooccurrence pair file contains a malformed line."""

    def __init__(self, line_no, message):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UndefinedDivergenceError(DivsimError):
    """KL divergence requested for distributions that are not absolutely continuous."""


class EstimationError(DivsimError):
    """A probability estimate could not be formed (e.g. no usable neighbors)."""


class ModelConsistencyError(DivsimError):
    """An internal invariant of the base model was violated."""
