"""Shared exception hierarchy for the pqc toolchain.

Every failure surfaced by the library is a ``PqcError``; the CLI maps these
to exit code 1 (analysis/verification failures) or 2 (input problems).
"""

from __future__ import annotations


class PqcError(Exception):
    """Base class for all toolchain errors."""


class ParseError(PqcError):
    """Malformed source text or serialized circuit."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col if col is not None else '?'}: {message}"
        super().__init__(message)


# --- circuit construction -------------------------------------------------

class CircuitError(PqcError):
    """Structural problem while building or combining circuits."""


class ObjectMismatch(CircuitError):
    """Composition endpoints or step shapes disagree."""


class WireTypeMismatch(CircuitError):
    """A wire carries the wrong type for the requested operation."""


class LabelNotFound(CircuitError):
    """A label is missing from the output context it should occur in."""


class UnknownGate(CircuitError):
    """Gate name not present in the registry / gate spec."""


class UnknownUnitary(CircuitError):
    """Assertion rows requested for a gate with no known basis behaviour."""


# --- algebra ---------------------------------------------------------------

class EffectError(PqcError):
    """Problem combining abstract circuit effects."""


class EffectObjectMismatch(EffectError):
    """Effect endpoints disagree (composition, comparison, ascription)."""


class UnsupportedWire(EffectError):
    """The algebra cannot interpret this wire type (e.g. Bit wires)."""


class NoJoin(EffectError):
    """The algebra's order has no least upper bound for these effects."""


# --- typechecking ----------------------------------------------------------

class TypecheckError(PqcError):
    """Simple-type inference failure."""


class UnboundName(TypecheckError):
    """Variable or label used without a binding."""


class LinearityViolation(TypecheckError):
    """A linear binding is dropped or used more than once."""


class NotAParameter(TypecheckError):
    """lift/box/literal bodies may only capture duplicable bindings."""


class ShapeMismatch(TypecheckError):
    """Inferred and required types disagree."""


class NotACircuit(TypecheckError):
    """apply expects a boxed-circuit value."""


class NotAFunction(TypecheckError):
    """Application head is not a function value."""


class BoxCapturesWires(TypecheckError):
    """box requires a function that captures no wires (empty bundle)."""


class NotAValue(ParseError):
    """Application operands must be syntactic values."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        super().__init__(message, line, col)


# --- evaluation ------------------------------------------------------------

class EvalError(PqcError):
    """Runtime failure of the abstract machine."""


class Stuck(EvalError):
    """No rule applies (unreachable on well-typed input)."""


class FuelExhausted(EvalError):
    """Defensive step bound hit (only used by test harnesses)."""
