import pytest

from generators import rng, random_program
from pqc.circuits import WireType, freshlabels, identity, reset_labels
from pqc.errors import (
    BoxCapturesWires, LinearityViolation, NotACircuit, NotAFunction,
    NotAParameter, ObjectMismatch, ShapeMismatch, UnboundName,
)
from pqc.gates import default_registry
from pqc.syntax import (
    parse_program, parse_term, parse_type, show_type, ArrowT, BangT, BitT,
    Box, BundleUnitT, CircT, NatT, QubitT, Ret, TensorT, UnitT, LabelVal,
    Pair, Var,
)
from pqc.typecheck import (
    Checker, _Entry, check_configuration, check_program, is_parameter,
    same_type, sharp, wires_of,
)

registry = default_registry()


def typed(src: str) -> str:
    prog = parse_program(src)
    return show_type(check_program(prog, registry))


def fails(src: str, exc) -> None:
    with pytest.raises(exc):
        check_program(parse_program(src), registry)


# --------------------------------------------------------------------------
# type operators
# --------------------------------------------------------------------------

def test_parameter_types():
    for s in ("1", "Nat", "!Qubit", "Circ(Qubit, Qubit)", "Nat * !Bit", "I"):
        assert is_parameter(parse_type(s)), s
    for s in ("Qubit", "Bit", "Qubit * Nat", "Qubit -o[1] Qubit"):
        assert not is_parameter(parse_type(s)), s


def test_sharp_projects_wire_content():
    assert sharp(parse_type("Nat * Qubit")) == \
        TensorT(BundleUnitT(), QubitT())
    assert sharp(parse_type("Qubit -o[Qubit * Bit] 1")) == \
        TensorT(QubitT(), BitT())
    assert sharp(parse_type("!Qubit")) == BundleUnitT()


def test_wires_of():
    assert wires_of(parse_type("Qubit * (Bit * Nat)")) == \
        (WireType.QUBIT, WireType.BIT)
    assert wires_of(parse_type("!Qubit")) == ()


def test_same_type_identifies_units_and_ignores_bounds():
    assert same_type(UnitT(), BundleUnitT())
    assert same_type(parse_type("Qubit -o[1] Qubit"),
                     parse_type("Qubit -o[1; 5] Qubit"))
    assert same_type(parse_type("Circ(Qubit, Qubit)"),
                     parse_type("Circ[9](Qubit, Qubit)"))
    assert not same_type(QubitT(), BitT())


# --------------------------------------------------------------------------
# programs that typecheck
# --------------------------------------------------------------------------

def test_gate_application():
    assert typed("inputs q: Qubit; apply(@H, q)") == "Qubit"
    assert typed("inputs q: Qubit; apply(@meas, q)") == "Bit"
    assert typed("inputs; apply(@init, *)") == "Qubit"


def test_tuples_and_dest():
    assert typed(
        "inputs a: Qubit, b: Qubit;"
        "let p = apply(@CNOT, (a, b)) in dest (x, y) = p in return (y, x)"
    ) == "Qubit * Qubit"


def test_ifz_needs_agreeing_branches():
    assert typed(
        "inputs q: Qubit; ifz 0 then apply(@H, q) else apply(@X, q)"
    ) == "Qubit"
    fails("inputs q: Qubit; ifz 0 then apply(@meas, q) else apply(@H, q)",
          ShapeMismatch)


def test_ifz_branches_must_consume_same_wires():
    fails(
        "inputs a: Qubit, b: Qubit;"
        "let u = ifz 0 then apply(@discard, a) else apply(@discard, b) in"
        " return (a, b)",
        LinearityViolation)


def test_lambda_and_application():
    assert typed(
        r"inputs q: Qubit; (\x: Qubit. apply(@H, x)) q") == "Qubit"


def test_closure_type_records_captures():
    prog = parse_program(
        r"inputs q: Qubit; return \x: Qubit. apply(@CNOT, (q, x))")
    ty = check_program(prog, registry)
    assert show_type(ty) == "Qubit -o[Qubit] Qubit * Qubit"


def test_box_lift_apply():
    assert typed(
        r"inputs q: Qubit;"
        r"let c = box[Qubit] lift \x: Qubit. apply(@H, x) in apply(c, q)"
    ) == "Qubit"


def test_force_of_lift():
    assert typed("inputs; force (lift return 3)") == "Nat"


def test_parameters_are_droppable_and_duplicable():
    assert typed("inputs; let n = return 41 in return (n, n)") == "Nat * Nat"
    assert typed("inputs; let n = return 41 in return *") == "1"


# --------------------------------------------------------------------------
# programs that must not typecheck
# --------------------------------------------------------------------------

def test_linear_variables_cannot_be_dropped():
    fails("inputs q: Qubit; return *", LinearityViolation)
    fails("inputs q: Qubit; let r = apply(@H, q) in return q",
          LinearityViolation)


def test_linear_variables_cannot_be_duplicated():
    fails("inputs q: Qubit; return (q, q)", LinearityViolation)
    fails("inputs q: Qubit; apply(@CNOT, (q, q))", LinearityViolation)


def test_unbound_names():
    fails("inputs; return ghost", UnboundName)


def test_lift_cannot_close_over_wires():
    fails("inputs q: Qubit; force (lift apply(@H, q))", NotAParameter)


def test_box_rejects_wire_capturing_functions():
    # In a source program the lift rule trips first: a function that grabbed
    # a wire is not duplicable, so it never becomes a !-value at all.
    fails(
        r"inputs q: Qubit;"
        r"let c = box[Qubit] lift \x: Qubit. apply(@CNOT, (q, x)) in"
        r" let p = apply(c, q) in return p",
        NotAParameter)


def test_box_rejects_arrows_that_captured_wires():
    # The box rule's own guard, reached with a context entry that no source
    # program can produce (a !-function whose capture shape holds a wire).
    ck = Checker(registry)
    ck.ctx.append(_Entry("f", BangT(ArrowT(QubitT(), QubitT(), QubitT()))))
    with pytest.raises(BoxCapturesWires):
        ck.infer_term(Box(QubitT(), Var("f")))


def test_box_needs_matching_shape():
    fails(r"inputs; let c = box[Qubit] lift \x: Qubit * Qubit. return x in"
          r" return *",
          ShapeMismatch)


def test_apply_needs_circuit_and_matching_argument():
    fails("inputs q: Qubit; apply(q, q)", NotACircuit)
    fails("inputs b: Bit; apply(@H, b)", ShapeMismatch)


def test_app_needs_function():
    fails("inputs; 3 4", NotAFunction)
    fails(r"inputs; (\x: Nat. return x) *", ShapeMismatch)


def test_dest_needs_tensor():
    fails("inputs q: Qubit; dest (a, b) = q in return (a, b)", ShapeMismatch)


def test_ifz_needs_nat():
    fails("inputs q: Qubit; let r = ifz q then return 1 else return 2 in"
          " apply(@H, q)",
          ShapeMismatch)


# --------------------------------------------------------------------------
# configurations
# --------------------------------------------------------------------------

def test_check_configuration_types_label_terms():
    reset_labels()
    ctx, bundle = freshlabels(((WireType.QUBIT, WireType.QUBIT), ()))
    l0, l1 = ctx.labels
    ty, out = check_configuration(
        ctx, identity(ctx.obj),
        Ret(Pair(LabelVal(l1), LabelVal(l0))), ctx, registry)
    assert show_type(ty) == "Qubit * Qubit"
    assert out.entries == ()  # term consumed every output

    ty, out = check_configuration(
        ctx, identity(ctx.obj), Ret(LabelVal(l0)), ctx, registry)
    assert show_type(ty) == "Qubit"
    assert [lab for lab, _ in out] == [l1]  # untouched output is left over


def test_check_configuration_rejects_wrong_contexts():
    reset_labels()
    ctx, _ = freshlabels(((WireType.QUBIT, WireType.QUBIT), ()))
    with pytest.raises(ObjectMismatch):
        check_configuration(ctx, identity((WireType.QUBIT,)),
                            Ret(LabelVal(ctx.labels[0])), ctx, registry)


def test_random_programs_typecheck():
    r = rng("typecheck-random")
    for _ in range(60):
        check_program(random_program(r), registry)
