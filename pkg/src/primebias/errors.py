"""Exception hierarchy shared across the package.

The CLI maps UsageError to exit code 1 and ComputationError (including
ResourceLimitError) to exit code 2.
"""


class UsageError(ValueError):
    """Bad argument or precondition violation attributable to the caller."""


class ComputationError(RuntimeError):
    """A numerical routine could not deliver its promised accuracy."""


class ResourceLimitError(ComputationError):
    """A requested computation exceeds a configured resource ceiling."""
