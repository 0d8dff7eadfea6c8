"""Exception types shared across the package."""


class StructuralError(ValueError):
    """Inputs are malformed or structurally incompatible (dimension or basis mismatch)."""


class PreconditionError(ValueError):
    """An operation's mathematical precondition does not hold for the given input."""


class CheckFailed(RuntimeError):
    """An exact mathematical identity that must hold was violated.

    The message names the failed identity; partial results are never
    returned once this is raised.
    """
