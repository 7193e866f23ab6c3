"""Exception hierarchy shared across the package."""


class FactorialHpoError(Exception):
    """Base class for all package errors."""


class BoundsError(FactorialHpoError):
    """A value fell outside its permitted interval."""


class SchemaError(FactorialHpoError):
    """A configuration or parameter map is structurally invalid."""


class StateError(FactorialHpoError):
    """An operation is invalid in the object's current state."""


class ConstructionError(FactorialHpoError):
    """A design (orthogonal array / Latin hypercube) cannot be built."""

    def __init__(self, message: str, minimal_levels: int | None = None):
        super().__init__(message)
        self.minimal_levels = minimal_levels


class ConfigError(FactorialHpoError):
    """Invalid study or analysis configuration."""


class AnalysisError(FactorialHpoError):
    """Factorial analysis cannot proceed (e.g. an empty cell)."""


class CorrelationError(FactorialHpoError):
    """Correlation is undefined for the given design."""


class SelectionError(FactorialHpoError):
    """No usable trial exists for final selection."""


class BatchAbortError(FactorialHpoError):
    """Too many trials in one batch failed; partial records are attached."""

    def __init__(self, message: str, records=None):
        super().__init__(message)
        self.records = records or []
