"""Exception types shared across the package.

Validation errors carry enough context (row numbers, column names) to
produce actionable reports from the CLI.
"""

from __future__ import annotations


class BubbleDiagError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(BubbleDiagError):
    """Invalid user-supplied configuration or arguments."""


# --- time-series ingestion ---------------------------------------------------

class ParseError(BubbleDiagError):
    def __init__(self, row: int, column: str, detail: str = ""):
        self.row = row
        self.column = column
        msg = f"row {row}, column {column!r}: unparseable value"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NonPositiveValueError(BubbleDiagError):
    def __init__(self, row: int, value: float | str = ""):
        self.row = row
        super().__init__(f"row {row}: value must be strictly positive, got {value!r}")


class NonMonotoneTimestampsError(BubbleDiagError):
    def __init__(self, row: int):
        self.row = row
        super().__init__(f"row {row}: timestamp does not increase over previous row")


class EmptyOverlapError(BubbleDiagError):
    """Two series share no usable common time range."""


class EmptySeriesError(BubbleDiagError):
    """An operation produced or received fewer than two observations."""


# --- smoothing ---------------------------------------------------------------

class TooFewPointsError(BubbleDiagError):
    """Series too short for the requested smoother."""


class SpanSearchFailedError(BubbleDiagError):
    """No smoothing span achieves the requested equivalent degrees of freedom."""


class TooFewResidualsError(BubbleDiagError):
    """Residual sequence too short to bootstrap."""


# --- regression --------------------------------------------------------------

class InsufficientDataError(BubbleDiagError):
    """Not enough aligned observations to fit."""


class DegenerateRegressorError(BubbleDiagError):
    """Regressor has zero variance."""


class NotNestedError(BubbleDiagError):
    """Restricted model does not have strictly fewer free parameters."""


class MismatchedSamplesError(BubbleDiagError):
    """Two fits were not computed on the same sample."""


class WindowTooSmallError(BubbleDiagError):
    """A rolling or fitting window contains too few observations."""


class NonConvergenceError(BubbleDiagError):
    """No optimizer start converged to a valid solution."""


# --- LPPLS calibration -------------------------------------------------------

class AtOrBeyondSingularityError(BubbleDiagError):
    """Trend evaluation requested at or past the critical time."""


class SingularDesignError(BubbleDiagError):
    """Collinear design matrix at the requested nonlinear parameters."""


class AllGridPointsSingularError(BubbleDiagError):
    """Every point of the nonlinear grid produced a singular design."""


class DegenerateProfileError(BubbleDiagError):
    """Profile likelihood is flat; no informative interval exists."""


class NotSameDataError(BubbleDiagError):
    """Likelihood ratio requested for fits on different data."""


class NegativeLRError(BubbleDiagError):
    """Nested model out-scored the full model; grid resolution failure."""


# --- window scanning ---------------------------------------------------------

class NoWindowAcceptedError(BubbleDiagError):
    """All candidate windows were rejected by the residual-error test."""

    def __init__(self, message: str, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics


# --- bubble scaling ----------------------------------------------------------

class OutOfRangeError(BubbleDiagError):
    """Requested instants fall outside the series span."""


class NonPositiveHeightError(BubbleDiagError):
    """Bubble peak does not exceed its start value."""


class MismatchedGridsError(BubbleDiagError):
    """Scaled bubbles do not share a common grid."""
