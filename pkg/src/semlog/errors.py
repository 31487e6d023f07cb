"""Shared exception types."""


class SemlogError(Exception):
    """Base class for all library errors."""


class CarrierMismatch(SemlogError):
    """A value does not belong to the carrier of the semiring it was used with."""


class GuardExceeded(SemlogError):
    """A search space or object size exceeded the configured guard."""


class PreconditionError(SemlogError):
    """An operation's stated precondition is violated; the message names it."""


class NotModelDefining(SemlogError):
    """An interpretation violates the model-defining property.

    The offending literal is carried in ``args[1]`` when available.
    """
