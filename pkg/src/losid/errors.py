"""Exception types shared across the package.

The CLI maps these onto process exit codes: parameter/usage problems -> 2,
file format and shape problems -> 3, degenerate signals -> 4.
"""


class LosidError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(LosidError, ValueError):
    """An argument or configuration value violates a precondition."""


class FormatError(LosidError, ValueError):
    """A file does not conform to the expected on-disk format."""


class GridMismatchError(LosidError, ValueError):
    """Two CIRs (or a CIR and a reference set) live on different time grids."""


class DegenerateSignalError(LosidError, ValueError):
    """A statistic is undefined for this signal (all-zero, zero variance, ...)."""


class UnsupportedCombinationError(LosidError, ValueError):
    """The requested selector/method pairing has no defined decision rule."""
