"""Linear type checking for the surface language.

The type system is linear: values of wire-carrying types (qubits, bits,
tensors containing them, functions) must be consumed exactly once, while
*parameter* types (1, Nat, !A, Circ(T,U), I, and tensors thereof) are
duplicable and discardable. Contexts are ordered; the order is what later
connects variables to circuit wire positions.

``sharp`` maps a type to the shape of the wires a value of that type holds:
parameters hold none (I), wires hold themselves, a function holds the wires
it captured, and tensors are pointwise. Everything downstream — boxing,
effect endpoints, configuration typing — goes through it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .circuits import Circuit, Label, LabelContext, Shape, WireType, flatten_shape, spine
from .errors import (
    BoxCapturesWires, LinearityViolation, NotACircuit, NotAFunction,
    NotAParameter, NotAValue, ObjectMismatch, ShapeMismatch, UnboundName,
)
from .gates import Registry, default_registry
from .syntax import (
    App, Apply, ArrowT, BangT, BitT, Box, BoxedVal, BundleUnitT, CircT, Dest,
    Force, GateRef, Ifz, LabelVal, Lam, Let, Lift, NatT, NatVal, Pair,
    Program, QubitT, Ret, TensorT, Term, Type, UnitT, UnitVal, Value, Var,
    show_type,
)

CtxKey = Union[str, Label]


# --------------------------------------------------------------------------
# type structure
# --------------------------------------------------------------------------

def is_parameter(ty: Type) -> bool:
    """Duplicable types: they hold no wires and escape linearity."""
    match ty:
        case UnitT() | NatT() | BangT() | CircT() | BundleUnitT():
            return True
        case TensorT(left, right):
            return is_parameter(left) and is_parameter(right)
        case _:
            return False


def is_shape_type(ty: Type) -> bool:
    """Types denoting bare wire bundles: I, wires, tensors of shapes."""
    match ty:
        case BundleUnitT() | QubitT() | BitT():
            return True
        case TensorT(left, right):
            return is_shape_type(left) and is_shape_type(right)
        case _:
            return False


def sharp(ty: Type) -> Type:
    """The shape of wires held by a value of this type."""
    if is_parameter(ty):
        return BundleUnitT()
    match ty:
        case QubitT() | BitT():
            return ty
        case TensorT(left, right):
            return TensorT(sharp(left), sharp(right))
        case ArrowT(_, _, captured, _, _):
            # the annotation may say 1 where the shape grammar wants I
            return sharp(captured)
        case _:
            raise ShapeMismatch(f"no wire shape for type {show_type(ty)}")


def shape_of(ty: Type) -> Shape:
    """Convert a shape type to a wire shape."""
    match ty:
        case BundleUnitT():
            return ()
        case QubitT():
            return WireType.QUBIT
        case BitT():
            return WireType.BIT
        case TensorT(left, right):
            return (shape_of(left), shape_of(right))
        case _:
            raise ShapeMismatch(f"{show_type(ty)} is not a wire shape")


def type_of_shape(shape: Shape) -> Type:
    if shape == ():
        return BundleUnitT()
    if isinstance(shape, WireType):
        return QubitT() if shape is WireType.QUBIT else BitT()
    left, right = shape
    return TensorT(type_of_shape(left), type_of_shape(right))


def wires_of(ty: Type) -> tuple[WireType, ...]:
    """The flat wire list behind a type, in positional order."""
    return tuple(flatten_shape(shape_of(sharp(ty))))


def bundle_type(bundle, ctx: LabelContext) -> Type:
    """The shape type of a label bundle, wire types read off the context."""
    if bundle == ():
        return BundleUnitT()
    if isinstance(bundle, Label):
        return type_of_shape(ctx.type_of(bundle))
    left, right = bundle
    return TensorT(bundle_type(left, ctx), bundle_type(right, ctx))


def tensor_of(parts: list[Type]) -> Type:
    """Right-nested tensor; I when empty."""
    if not parts:
        return BundleUnitT()
    ty = parts[-1]
    for p in reversed(parts[:-1]):
        ty = TensorT(p, ty)
    return ty


def same_type(a: Type, b: Type) -> bool:
    """Structural equality for checking purposes.

    The unit value's two types 1 and I agree, and scalar ascriptions are not
    part of the structure — they are promises about effects, compared in the
    effect layer, not shapes.
    """
    match (a, b):
        case (UnitT() | BundleUnitT(), UnitT() | BundleUnitT()):
            return True
        case (TensorT(al, ar), TensorT(bl, br)):
            return same_type(al, bl) and same_type(ar, br)
        case (ArrowT(ad, ac, acap, _, _), ArrowT(bd, bc, bcap, _, _)):
            return (same_type(ad, bd) and same_type(ac, bc)
                    and same_type(acap, bcap))
        case (CircT(ad, ac, _, _), CircT(bd, bc, _, _)):
            return same_type(ad, bd) and same_type(ac, bc)
        case (BangT(ai, _), BangT(bi, _)):
            return same_type(ai, bi)
        case _:
            return a == b


def gate_circ_type(registry: Registry, name: str) -> CircT:
    gdef = registry.lookup(name)
    return CircT(type_of_shape(spine(gdef.gate.dom)),
                 type_of_shape(spine(gdef.gate.cod)))


def boxed_circ_type(bv: BoxedVal) -> CircT:
    return CircT(bundle_type(bv.boxed.inputs, bv.boxed.in_ctx),
                 bundle_type(bv.boxed.outputs, bv.boxed.out_ctx))


# --------------------------------------------------------------------------
# the checker
# --------------------------------------------------------------------------

@dataclass
class _Entry:
    key: CtxKey
    ty: Type

    @property
    def linear(self) -> bool:
        return not is_parameter(self.ty)


class Checker:
    def __init__(self, registry: Optional[Registry] = None):
        self.registry = registry or default_registry()
        self.ctx: list[_Entry] = []

    # ``used`` sets hold context indices, so shadowed entries stay distinct.

    def _lookup(self, key: CtxKey) -> int:
        for i in range(len(self.ctx) - 1, -1, -1):
            if self.ctx[i].key == key:
                return i
        raise UnboundName(f"unbound {'label' if isinstance(key, Label) else 'variable'} {key}")

    def _linear(self, used: set[int]) -> set[int]:
        return {i for i in used if self.ctx[i].linear}

    def _merge(self, a: set[int], b: set[int], what: str) -> set[int]:
        both = self._linear(a) & self._linear(b)
        if both:
            names = ", ".join(str(self.ctx[i].key) for i in sorted(both))
            raise LinearityViolation(f"{names} used more than once in {what}")
        return a | b

    def _pop(self, n: int, used: set[int], what: str) -> set[int]:
        """Drop the last n binders, insisting linear ones were consumed."""
        base = len(self.ctx) - n
        for i in range(base, len(self.ctx)):
            if self.ctx[i].linear and i not in used:
                raise LinearityViolation(
                    f"{self.ctx[i].key} is linear but never used in {what}")
        del self.ctx[base:]
        return {i for i in used if i < base}

    # ---- values ----------------------------------------------------------

    def infer_value(self, v: Value) -> tuple[Type, set[int]]:
        match v:
            case UnitVal():
                return UnitT(), set()
            case NatVal():
                return NatT(), set()
            case Var(name):
                i = self._lookup(name)
                return self.ctx[i].ty, {i}
            case LabelVal(label):
                i = self._lookup(label)
                return self.ctx[i].ty, {i}
            case GateRef(name):
                return gate_circ_type(self.registry, name), set()
            case BoxedVal():
                return boxed_circ_type(v), set()
            case Pair(left, right):
                lt, lu = self.infer_value(left)
                rt, ru = self.infer_value(right)
                return TensorT(lt, rt), self._merge(lu, ru, "a pair")
            case Lam(var, ty, body):
                self.ctx.append(_Entry(var, ty))
                bt, used = self.infer_term(body)
                used = self._pop(1, used, f"the body of \\{var}")
                captured = tensor_of(
                    [sharp(self.ctx[i].ty) for i in sorted(self._linear(used))])
                return ArrowT(ty, bt, captured), used
            case Lift(term):
                ty, used = self.infer_term(term)
                lin = self._linear(used)
                if lin:
                    names = ", ".join(str(self.ctx[i].key) for i in sorted(lin))
                    raise NotAParameter(
                        f"lift body must be duplicable but uses {names}")
                return BangT(ty), used
        raise NotAValue(f"not a value: {v!r}")

    # ---- terms -----------------------------------------------------------

    def infer_term(self, m: Term) -> tuple[Type, set[int]]:
        match m:
            case Ret(v):
                return self.infer_value(v)
            case App(fn, arg):
                ft, fu = self.infer_value(fn)
                if not isinstance(ft, ArrowT):
                    raise NotAFunction(f"cannot apply a value of type {show_type(ft)}")
                at, au = self.infer_value(arg)
                if not same_type(at, ft.dom):
                    raise ShapeMismatch(
                        f"function expects {show_type(ft.dom)}, got {show_type(at)}")
                return ft.cod, self._merge(fu, au, "an application")
            case Let(var, bound, body):
                bt, bu = self.infer_term(bound)
                self.ctx.append(_Entry(var, bt))
                tt, tu = self.infer_term(body)
                tu = self._pop(1, tu, f"the body of let {var}")
                return tt, self._merge(bu, tu, f"let {var}")
            case Dest(left, right, value, body):
                vt, vu = self.infer_value(value)
                if not isinstance(vt, TensorT):
                    raise ShapeMismatch(
                        f"dest needs a tensor, got {show_type(vt)}")
                self.ctx.append(_Entry(left, vt.left))
                self.ctx.append(_Entry(right, vt.right))
                bt, bu = self.infer_term(body)
                bu = self._pop(2, bu, f"the body of dest ({left}, {right})")
                return bt, self._merge(vu, bu, f"dest ({left}, {right})")
            case Ifz(cond, then, els):
                ct, cu = self.infer_value(cond)
                if not isinstance(ct, NatT):
                    raise ShapeMismatch(f"ifz condition must be Nat, got {show_type(ct)}")
                tt, tu = self.infer_term(then)
                et, eu = self.infer_term(els)
                if tt != et:
                    raise ShapeMismatch(
                        f"ifz branches disagree: {show_type(tt)} vs {show_type(et)}")
                if self._linear(tu) != self._linear(eu):
                    raise LinearityViolation(
                        "ifz branches must consume the same wires")
                return tt, cu | tu | eu
            case Force(value):
                vt, vu = self.infer_value(value)
                if not isinstance(vt, BangT):
                    raise ShapeMismatch(f"force needs a !-type, got {show_type(vt)}")
                return vt.inner, vu
            case Box(shape_ty, value):
                if not is_shape_type(shape_ty):
                    raise ShapeMismatch(
                        f"box annotation must be a wire shape, got {show_type(shape_ty)}")
                vt, vu = self.infer_value(value)
                if not isinstance(vt, BangT) or not isinstance(vt.inner, ArrowT):
                    raise NotAFunction(
                        f"box needs a lifted function, got {show_type(vt)}")
                arrow = vt.inner
                if wires_of(arrow.captured):
                    raise BoxCapturesWires(
                        f"cannot box a function holding wires of shape "
                        f"{show_type(arrow.captured)}")
                if not same_type(arrow.dom, shape_ty):
                    raise ShapeMismatch(
                        f"box annotation {show_type(shape_ty)} does not match "
                        f"function input {show_type(arrow.dom)}")
                if not is_shape_type(arrow.cod):
                    raise ShapeMismatch(
                        f"boxed function must return a wire bundle, "
                        f"got {show_type(arrow.cod)}")
                return CircT(arrow.dom, arrow.cod, arrow.bound), vu
            case Apply(circ, arg):
                ct, cu = self.infer_value(circ)
                if not isinstance(ct, CircT):
                    raise NotACircuit(f"apply needs a circuit, got {show_type(ct)}")
                at, au = self.infer_value(arg)
                if not same_type(at, ct.dom):
                    raise ShapeMismatch(
                        f"circuit expects {show_type(ct.dom)}, got {show_type(at)}")
                return ct.cod, self._merge(cu, au, "apply")
        raise ShapeMismatch(f"not a term: {m!r}")


# --------------------------------------------------------------------------
# entry points
# --------------------------------------------------------------------------

def check_program(prog: Program, registry: Optional[Registry] = None) -> Type:
    """Type a whole program; every input wire must be consumed."""
    checker = Checker(registry)
    for name, ty in prog.inputs:
        if not isinstance(ty, (QubitT, BitT)):
            raise ShapeMismatch(
                f"program inputs must be single wires; {name} has type {show_type(ty)}")
        checker.ctx.append(_Entry(name, ty))
    ty, used = checker.infer_term(prog.term)
    checker._pop(len(prog.inputs), used, "the program")
    return ty


def check_configuration(
    in_ctx: LabelContext,
    circuit: Circuit,
    m: Term,
    out_ctx: Optional[LabelContext] = None,
    registry: Optional[Registry] = None,
) -> tuple[Type, LabelContext]:
    """Type a machine configuration (circuit under construction + term).

    The term's free labels must name outputs of the circuit, given by
    ``out_ctx`` (defaults to ``in_ctx`` for a circuit with no steps yet).
    Returns the term's type and the passthrough context of outputs the term
    leaves untouched.
    """
    if in_ctx.obj != circuit.dom:
        raise ObjectMismatch(
            f"input context types {in_ctx.obj} but circuit wants {circuit.dom}")
    if out_ctx is None:
        if circuit.steps:
            raise ObjectMismatch(
                "out_ctx is required once the circuit has steps")
        out_ctx = in_ctx
    if out_ctx.obj != circuit.cod:
        raise ObjectMismatch(
            f"output context types {out_ctx.obj} but circuit produces {circuit.cod}")
    checker = Checker(registry)
    for label, wt in out_ctx:
        checker.ctx.append(_Entry(label, QubitT() if wt is WireType.QUBIT else BitT()))
    ty, used = checker.infer_term(m)
    leftover = [out_ctx.entries[i] for i in range(len(out_ctx.entries))
                if i not in used]
    return ty, LabelContext(tuple(leftover))
