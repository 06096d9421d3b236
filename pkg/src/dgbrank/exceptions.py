"""Exception hierarchy shared by all dgbrank modules."""


class DgbError(Exception):
    """Base class for every error raised by dgbrank."""


class InvalidParameterError(DgbError, ValueError):
    """A distribution exponent is not a finite real."""


class InvalidDomainError(DgbError, ValueError):
    """The number of ranks (or another count) is outside its domain."""


class InvalidRankError(DgbError, ValueError):
    """A rank lies outside 1..n."""


class SeriesValidationError(DgbError, ValueError):
    """A rank-size series breaks one of its invariants."""


class DimensionError(DgbError, ValueError):
    """Two inputs that must have matching lengths do not."""


class StratumTooSmallError(DgbError):
    """A stratum has fewer units than the configured minimum."""

    def __init__(self, stratum_id, n_units, min_units):
        self.stratum_id = stratum_id
        self.n_units = n_units
        self.min_units = min_units
        super().__init__(f"stratum {stratum_id!r}: fewer than {min_units} units ({n_units})")

    @property
    def reason(self):
        return f"fewer than {self.min_units} units"


class NonConvergenceError(DgbError):
    """No optimizer restart converged. ``best`` holds the best point found."""

    def __init__(self, message, best):
        super().__init__(message)
        self.best = best


class UndefinedUPError(DgbError, ValueError):
    """UP needs at least two ranks (log 1 = 0 in the denominator)."""


class ComparisonError(DgbError, ValueError):
    """Records or reports being compared do not refer to the same quantity."""


class IndicatorUndefinedError(DgbError, ValueError):
    """An indicator cannot be computed for a unit (zero denominator, missing column)."""


class ExclusionError(DgbError):
    """A series was requested from an excluded stratum."""

    def __init__(self, stratum_id, reason):
        self.stratum_id = stratum_id
        self.reason = reason
        super().__init__(f"stratum {stratum_id!r} is excluded: {reason}")


class CsvFormatError(DgbError, ValueError):
    """An input file cannot be parsed under the declared schema."""


class InsufficientDataError(DgbError, ValueError):
    """Too few strata (or too little overlap) for a cross-stratum statistic."""
