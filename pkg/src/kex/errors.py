"""Exception hierarchy shared by all solver modules."""


class KexError(Exception):
    """Base class for all library errors."""


class ParseError(KexError):
    """Input document is not syntactically valid."""


class ModelError(KexError):
    """Input document is well-formed but violates a model invariant
    (self-loop, arc into an altruistic vertex, id out of range, ...)."""


class CapacityError(KexError):
    """A configured enumeration or table-size cap was exceeded.

    Raised loudly instead of truncating: exact solvers must never
    silently become approximate.
    """


class PreconditionError(KexError):
    """An algorithm was invoked outside its supported parameter regime."""


class InternalError(KexError):
    """An internal invariant failed; indicates a bug, not bad input."""
