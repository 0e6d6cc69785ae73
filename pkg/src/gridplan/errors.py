"""Exception types shared across the toolkit."""


class GridPlanError(Exception):
    """Base class for all toolkit errors."""


class NoPathError(GridPlanError):
    """Raised when the goal is not reachable from the start."""


class MapGenerationError(GridPlanError):
    """Raised when no feasible map could be generated within the retry bound."""


class FormatError(GridPlanError):
    """Raised on malformed map/mask files or mismatched dimensions."""


class UsageError(GridPlanError):
    """Raised on invalid CLI arguments or configuration values."""
