"""Exception types shared across the package."""


class FuncgraphError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedDesignError(FuncgraphError):
    """Raised when an operation requires a dense common-grid design."""


class InsufficientDataError(FuncgraphError):
    """Raised when there are too few subjects for an estimate."""


class RankDeficiencyError(FuncgraphError):
    """Raised when a covariance or eigenvalue sequence is degenerate."""


class NumericalFailureError(FuncgraphError):
    """Raised when a linear-algebra step fails beyond repair.

    Carries the sweep/column context when raised inside a sampler.
    """

    def __init__(self, message, column=None, sweep=None):
        super().__init__(message)
        self.column = column
        self.sweep = sweep


class SchemaError(FuncgraphError):
    """Raised on malformed input files (message carries line numbers)."""


class ArchiveError(FuncgraphError):
    """Base class for chain-archive read failures."""


class ArchiveVersionError(ArchiveError):
    """Archive format version does not match this reader."""


class ArchiveChecksumError(ArchiveError):
    """Archive is truncated or its checksum does not match."""


class StorageBudgetError(FuncgraphError):
    """Requested chain storage exceeds the configured budget."""
