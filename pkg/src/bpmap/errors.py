"""Exception hierarchy shared by all bpmap modules.

The CLI maps these onto its exit-code contract: configuration and data
problems exit 2, simulation divergence exits 3, statistical degeneracy
exits 4.
"""


class BpmapError(Exception):
    """Base class for all errors raised by bpmap."""


class SchemaError(BpmapError):
    """A required column is missing from an input file."""


class ParseError(BpmapError):
    """A data cell could not be parsed as the expected type."""


class FormatError(BpmapError):
    """Structurally malformed input (e.g. ragged CSV rows)."""


class ValidationError(BpmapError):
    """A value violates a construction-time invariant."""


class AlignmentError(BpmapError):
    """Sequences that must be aligned have mismatched lengths."""


class InsufficientDataError(BpmapError):
    """A series is too short for the requested operation."""


class ConfigError(BpmapError):
    """Invalid configuration (embedding dimension, library grid, flags)."""


class DivergenceError(BpmapError):
    """A simulated trajectory escaped its basin of attraction."""

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


class InsufficientLibraryError(BpmapError):
    """The neighbor library holds fewer candidates than requested."""


class DegeneracyError(BpmapError):
    """Base class for statistically degenerate inputs (CLI exit 4)."""


class DegenerateSeriesError(DegeneracyError):
    """A correlation input has zero variance."""


class DegenerateControlError(DegeneracyError):
    """The control variable carries no variation; partial correlation undefined."""


class CollinearityError(DegeneracyError):
    """A control variable is (numerically) collinear with an argument."""
