"""Exception hierarchy.

Three families map onto the CLI exit codes: validation problems (exit 2),
numeric failures (exit 3), and inconclusive empirical checks (exit 4).
"""


class LpattrError(Exception):
    """Base class for all library errors."""


class ValidationError(LpattrError):
    """Bad inputs: shape mismatches, broken preconditions, bad configs."""

    exit_code = 2


class DimensionMismatchError(ValidationError):
    pass


class ConfigurationError(ValidationError):
    pass


class CoverageError(ValidationError):
    """Sampling box does not contain the feasible polytope."""


class EmptyVertexSetError(ValidationError):
    """Vertex enumeration produced no feasible vertex (empty or unbounded set)."""


class NumericError(LpattrError):
    """Iterative procedure failed to converge or produced non-finite values."""

    exit_code = 3


class ProjectionFailureError(NumericError):
    """Projection did not converge; carries the best iterate found."""

    def __init__(self, message, best_iterate=None):
        super().__init__(message)
        self.best_iterate = best_iterate


class TrainingDivergenceError(NumericError):
    """Training loss became non-finite; carries the last finite parameters."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class RankDeficiencyError(NumericError):
    """Unregularized surrogate fit hit a singular normal matrix."""


class RenderError(NumericError):
    """Heatmap input contained non-finite entries."""


class InconclusiveError(LpattrError):
    """An empirical check could not decide either way (e.g. too few boundary samples)."""

    exit_code = 4
