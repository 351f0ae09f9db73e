"""Exception types shared across the package."""


class SymlinkError(Exception):
    """Base class for all library errors."""


class ModelParseError(SymlinkError):
    """The model document is malformed (bad JSON, missing keys, wrong types)."""


class ModelValidationError(SymlinkError):
    """A model invariant is violated; the message names the first failure."""


class PreconditionError(SymlinkError):
    """An operation was called with arguments violating its contract."""
