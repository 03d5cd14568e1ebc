"""Exception types shared by the package."""


class InputError(ValueError):
    """Malformed or out-of-range input."""


class CapacityError(InputError):
    """Requested dimensions exceed the dense storage limits."""


class PreconditionError(InputError):
    """Input is well formed but violates a documented precondition."""


class InvariantViolation(RuntimeError):
    """A computed quantity broke an identity that should hold exactly."""
