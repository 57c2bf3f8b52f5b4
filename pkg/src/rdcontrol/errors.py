"""Exception types shared across the package.

Error messages start with a short machine-readable code
(e.g. ``"invalid-scalar: ..."``) so callers and the CLI can map
failures to exit codes without parsing prose.
"""


class RDControlError(Exception):
    """Base class for all package errors."""


class InvalidInput(RDControlError):
    """Bad arguments, violated preconditions or schema problems (CLI exit 2)."""


class SolverFailure(RDControlError):
    """A numerical routine failed to converge or blew up (CLI exit 3)."""
