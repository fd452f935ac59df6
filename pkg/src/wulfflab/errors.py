"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI: ValidationError -> 2, NumericError -> 3
(ResourceError is a NumericError). A mathematical check that fails cleanly
is not an exception; the CLI maps it to exit code 1.
"""


class ValidationError(ValueError):
    """Input or precondition violation (bad geometry, malformed file, ...)."""


class NumericError(RuntimeError):
    """A numerical procedure failed (non-convergence, empty contact set, ...)."""


class ResourceError(NumericError):
    """A requested computation would exceed the desk-scale resource budget."""
