"""Exception hierarchy shared by all modules.

Exit-code mapping used by the CLI: InputError -> 2, CapacityError -> 3,
LogicError -> 4, anything else -> 5.
"""


class BoolCloneError(Exception):
    """Base class for all library errors."""


class InputError(BoolCloneError):
    """Malformed or inconsistent input (bad arity, violated precondition)."""


class ParseError(InputError):
    """Syntax error in a formula, netlist, or serialized value.

    Carries the token position when known.
    """

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class CapacityError(BoolCloneError):
    """Exhaustive semantics requested above the configured cap or budget."""


class LogicError(BoolCloneError):
    """Operation is well-formed but its mathematical precondition fails
    (non-member synthesis, conversion into a too-weak basis, ...)."""


class ConversionRefused(LogicError):
    """Basis conversion refused; names the offending gate and, when one was
    found, the separating relation."""

    def __init__(self, gate, relation_name=None):
        self.gate = gate
        self.relation_name = relation_name
        msg = f"gate {gate!r} is not expressible in the target basis"
        if relation_name is not None:
            msg += f" (separated by {relation_name})"
        super().__init__(msg)


class StreamExhausted(InputError):
    """Random bit stream ran out before the construction finished."""


class InternalError(BoolCloneError):
    """Invariant violation inside the library (a bug, not a user error)."""
