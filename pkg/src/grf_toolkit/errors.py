"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class SchemaError(ToolkitError):
    """Input file lacks a required column or has the wrong layout."""


class RowError(ToolkitError):
    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


class DataError(ToolkitError):
    """Invalid value (empty, non-finite, out of range, missing field)."""


class LookupMissError(DataError):
    pass


class ShapeError(ToolkitError):
    pass


class FormatError(ToolkitError):
    pass


class PairingError(ToolkitError):
    def __init__(self, message: str, unmatched=()):
        super().__init__(message)
        self.unmatched = sorted(unmatched)
