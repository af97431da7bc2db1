"""Big-step evaluation of programs into circuits.

A machine state is a configuration: the circuit built so far, the label
context naming its open outputs, and the term still to run. Evaluation only
ever extends the circuit — ``apply`` appends a boxed circuit at the wires
named by its argument bundle, ``box`` runs its function in a fresh private
configuration and captures the result as a value, and everything else is
ordinary call-by-value reduction by substitution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .circuits import (
    BoxedCircuit, Bundle, Circuit, Label, LabelContext, append, freshlabels,
    fresh_label, identity,
)
from .errors import FuelExhausted, Stuck
from .gates import Registry, default_registry
from .syntax import (
    App, Apply, Box, BoxedVal, Dest, Force, GateRef, Ifz, LabelVal, Lam, Let,
    Lift, NatVal, Pair, Program, Ret, Term, UnitVal, Value, Var,
)
from .typecheck import shape_of


@dataclass
class Configuration:
    circuit: Circuit
    out_ctx: LabelContext
    term: Term


# --------------------------------------------------------------------------
# substitution
# --------------------------------------------------------------------------

def subst_value(v: Value, x: str, w: Value) -> Value:
    match v:
        case Var(name):
            return w if name == x else v
        case Pair(left, right):
            return Pair(subst_value(left, x, w), subst_value(right, x, w))
        case Lam(var, ty, body):
            if var == x:
                return v
            return Lam(var, ty, subst_term(body, x, w))
        case Lift(term):
            return Lift(subst_term(term, x, w))
        case _:
            return v


def subst_term(m: Term, x: str, w: Value) -> Term:
    match m:
        case Ret(v):
            return Ret(subst_value(v, x, w))
        case App(fn, arg):
            return App(subst_value(fn, x, w), subst_value(arg, x, w))
        case Let(var, bound, body):
            return Let(var, subst_term(bound, x, w),
                       body if var == x else subst_term(body, x, w))
        case Dest(left, right, value, body):
            return Dest(left, right, subst_value(value, x, w),
                        body if x in (left, right) else subst_term(body, x, w))
        case Ifz(cond, then, els):
            return Ifz(subst_value(cond, x, w), subst_term(then, x, w),
                       subst_term(els, x, w))
        case Force(v):
            return Force(subst_value(v, x, w))
        case Box(shape, v):
            return Box(shape, subst_value(v, x, w))
        case Apply(circ, arg):
            return Apply(subst_value(circ, x, w), subst_value(arg, x, w))
    raise Stuck(f"cannot substitute in {m!r}")


# --------------------------------------------------------------------------
# bundles as values
# --------------------------------------------------------------------------

def value_to_bundle(v: Value) -> Bundle:
    match v:
        case UnitVal():
            return ()
        case LabelVal(label):
            return label
        case Pair(left, right):
            return (value_to_bundle(left), value_to_bundle(right))
        case _:
            raise Stuck(f"expected a wire bundle, got {v}")


def bundle_to_value(b: Bundle) -> Value:
    if b == ():
        return UnitVal()
    if isinstance(b, Label):
        return LabelVal(b)
    left, right = b
    return Pair(bundle_to_value(left), bundle_to_value(right))


# --------------------------------------------------------------------------
# the machine
# --------------------------------------------------------------------------

class _Fuel:
    def __init__(self, amount: Optional[int]):
        self.amount = amount

    def tick(self):
        if self.amount is not None:
            if self.amount <= 0:
                raise FuelExhausted("evaluation fuel exhausted")
            self.amount -= 1


_BOX_FN = "_boxed_fn"


def _eval(c: Circuit, ctx: LabelContext, m: Term, registry: Registry,
          fuel: _Fuel) -> tuple[Circuit, LabelContext, Value]:
    fuel.tick()
    match m:
        case Ret(v):
            return c, ctx, v
        case Let(var, bound, body):
            c1, ctx1, v = _eval(c, ctx, bound, registry, fuel)
            return _eval(c1, ctx1, subst_term(body, var, v), registry, fuel)
        case App(fn, arg):
            match fn:
                case Lam(var, _, body):
                    return _eval(c, ctx, subst_term(body, var, arg), registry, fuel)
                case GateRef() | BoxedVal():
                    raise Stuck(f"{fn} is a circuit; run it with apply(...)")
                case _:
                    raise Stuck(f"cannot apply non-function {fn}")
        case Dest(left, right, value, body):
            match value:
                case Pair(a, b):
                    return _eval(
                        c, ctx,
                        subst_term(subst_term(body, left, a), right, b),
                        registry, fuel)
                case _:
                    raise Stuck(f"dest needs a pair, got {value}")
        case Ifz(cond, then, els):
            match cond:
                case NatVal(n):
                    return _eval(c, ctx, then if n == 0 else els, registry, fuel)
                case _:
                    raise Stuck(f"ifz needs a number, got {cond}")
        case Force(v):
            match v:
                case Lift(inner):
                    return _eval(c, ctx, inner, registry, fuel)
                case _:
                    raise Stuck(f"force needs a lifted term, got {v}")
        case Box(shape_ty, v):
            match v:
                case Lift(thunk):
                    in_ctx, bundle = freshlabels(shape_of(shape_ty))
                    inner = Let(_BOX_FN, thunk,
                                App(Var(_BOX_FN), bundle_to_value(bundle)))
                    body, out_ctx, out_val = _eval(
                        identity(in_ctx.obj), in_ctx, inner, registry, fuel)
                    boxed = BoxedCircuit(bundle, in_ctx, body, out_ctx,
                                         value_to_bundle(out_val))
                    return c, ctx, BoxedVal(boxed)
                case _:
                    raise Stuck(f"box needs a lifted function, got {v}")
        case Apply(circ, arg):
            match circ:
                case GateRef(name):
                    boxed = registry.boxed(name)
                case BoxedVal(b, _):
                    boxed = b
                case _:
                    raise Stuck(f"apply needs a circuit, got {circ}")
            c2, out_bundle, ctx2 = append(c, ctx, value_to_bundle(arg), boxed)
            return c2, ctx2, bundle_to_value(out_bundle)
    raise Stuck(f"no rule for {m}")


def evaluate(cfg: Configuration, registry: Optional[Registry] = None,
             fuel: Optional[int] = None) -> tuple[Circuit, LabelContext, Value]:
    """Run a configuration to a value; returns (circuit, outputs, value)."""
    return _eval(cfg.circuit, cfg.out_ctx, cfg.term,
                 registry or default_registry(), _Fuel(fuel))


def initial_configuration(prog: Program) -> tuple[Configuration, LabelContext]:
    """Fresh input labels for a program; returns (configuration, input ctx)."""
    entries = []
    term = prog.term
    for name, ty in prog.inputs:
        label = fresh_label()
        entries.append((label, shape_of(ty)))
        term = subst_term(term, name, LabelVal(label))
    in_ctx = LabelContext(tuple(entries))
    return Configuration(identity(in_ctx.obj), in_ctx, term), in_ctx


def evaluate_program(prog: Program, registry: Optional[Registry] = None,
                     fuel: Optional[int] = None,
                     ) -> tuple[Circuit, LabelContext, Value]:
    cfg, _ = initial_configuration(prog)
    return evaluate(cfg, registry, fuel)
