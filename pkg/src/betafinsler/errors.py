"""Exception types raised across the package."""


class FinslerError(Exception):
    """Base class for domain errors."""


class JetDomainError(FinslerError, ValueError):
    def __init__(self, op: str, message: str):
        super().__init__(f"{op}: {message}")
        self.op = op


class DegenerateMetricError(FinslerError):
    """Metric tensor singular (or nearly so) at a point."""


class DegenerateChangeError(FinslerError):
    """The beta-change is not regular at a point (tau = 0, Lbar <= 0, f_1 <= 0, ...)."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind


class ConfigError(FinslerError, ValueError):
    """Invalid run configuration or scenario definition."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
