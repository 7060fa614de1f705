"""Exception hierarchy for R-Trans.

Every error raised on purpose by the package derives from ``RTransError`` so the
command layer can turn it into a one-line machine-parsable report.
"""

from typing import Optional, Sequence


class RTransError(Exception):
    """Base class for all R-Trans errors."""


# Dataset parsing and preprocessing

class EmptyFileError(RTransError):
    """A kinematics or meta file has no data rows."""


class RowWidthError(RTransError):
    """A kinematics row does not have the expected number of columns."""

    def __init__(self, line_number: int, found: int, expected: int):
        self.line_number = line_number
        self.found = found
        self.expected = expected
        super().__init__(
            f"line {line_number}: expected {expected} values, found {found}"
        )


class NonFiniteError(RTransError):
    """A value is NaN, infinite, or not a real number."""


class MetaFormatError(RTransError):
    """A meta file line does not follow the JIGSAWS layout."""


class ScoreRangeError(RTransError):
    """An OSATS element score falls outside [1, 5]."""


class MissingTrialError(RTransError):
    """A trial expected from kinematics has no meta entry (or vice versa)."""


class DegenerateTrialError(RTransError):
    """A trial is too short to be normalized."""


class TooShortError(RTransError):
    """A trial has fewer frames than one segment."""


class InsufficientGroupsError(RTransError):
    """Cross-validation needs at least two distinct fold keys."""


class LayoutError(RTransError):
    """The dataset directory does not follow the JIGSAWS layout."""

    def __init__(self, missing: Sequence[str]):
        self.missing = list(missing)
        super().__init__("missing dataset paths: " + ", ".join(self.missing))


# Tensor engine

class ShapeMismatchError(RTransError):
    """Operand shapes are incompatible."""

    def __init__(self, op: str, left: tuple, right: Optional[tuple] = None):
        self.op = op
        self.left = left
        self.right = right
        if right is None:
            message = f"{op}: invalid shape {left}"
        else:
            message = f"{op}: incompatible shapes {left} and {right}"
        super().__init__(message)


class NonScalarLossError(RTransError):
    """backward() was called on a tensor with more than one element."""


class EmptyTapeError(RTransError):
    """backward() was called but no operation was recorded."""


class DisconnectedGraphError(RTransError):
    """A leaf that was expected to receive a gradient is not reachable from the loss."""


# Model, training, evaluation

class ConfigError(RTransError):
    """A configuration value violates its constraints."""


class CheckpointError(RTransError):
    """A checkpoint file is malformed or does not match the requested config."""


class EmptySequenceError(RTransError):
    """A trial produced no segments."""


class RangeError(RTransError):
    """A scalar argument lies outside its allowed range."""


class EmptyFoldError(RTransError):
    """A training fold contains no trials."""


class NonFiniteLossError(RTransError):
    """The training loss became NaN or infinite."""


class UndefinedCorrelationError(RTransError):
    """Spearman correlation is undefined (constant ranking or n < 2)."""


class MissingDescriptorError(RTransError):
    """The descriptor table has no text for a (category, band) pair."""
