import pytest

from generators import rng, random_program
from pqc.circuits import Layer, WireType, flatten_bundle, reset_labels
from pqc.errors import FuelExhausted, Stuck
from pqc.evaluator import (
    bundle_to_value, evaluate, evaluate_program, initial_configuration,
    subst_term, subst_value, value_to_bundle,
)
from pqc.gates import default_registry
from pqc.syntax import (
    Apply, App, Dest, Force, GateRef, Ifz, LabelVal, Lam, Let, NatVal, Pair,
    QubitT, Ret, UnitVal, Var, parse_program,
)
from pqc.typecheck import check_program

registry = default_registry()

Q = WireType.QUBIT
B = WireType.BIT


def run(src: str, fuel=None):
    prog = parse_program(src)
    check_program(prog, registry)
    reset_labels()
    return evaluate_program(prog, registry, fuel=fuel)


def gate_sequence(circuit):
    return [(g.name, at)
            for step in circuit.steps if isinstance(step, Layer)
            for g, at in step.placements]


# --------------------------------------------------------------------------
# substitution
# --------------------------------------------------------------------------

def test_subst_let_shadows_body_not_bound():
    m = Let("x", Ret(Var("x")), Ret(Var("x")))
    out = subst_term(m, "x", NatVal(3))
    assert out == Let("x", Ret(NatVal(3)), Ret(Var("x")))


def test_subst_lambda_shadowing():
    lam = Lam("x", QubitT(), Ret(Var("x")))
    assert subst_value(lam, "x", NatVal(1)) == lam
    lam2 = Lam("y", QubitT(), Ret(Pair(Var("y"), Var("x"))))
    assert subst_value(lam2, "x", NatVal(1)) == \
        Lam("y", QubitT(), Ret(Pair(Var("y"), NatVal(1))))


def test_subst_dest_shadowing():
    body = Ret(Pair(Var("a"), Var("b")))
    m = Dest("a", "b", Var("p"), body)
    out = subst_term(m, "a", NatVal(7))
    assert out.body == body  # binder shadows
    out2 = subst_term(m, "p", Pair(NatVal(1), NatVal(2)))
    assert out2.value == Pair(NatVal(1), NatVal(2))


# --------------------------------------------------------------------------
# bundles as values
# --------------------------------------------------------------------------

def test_bundle_value_round_trip():
    reset_labels()
    from pqc.circuits import fresh_label
    l0, l1 = fresh_label(), fresh_label()
    for b in ((), l0, (l0, l1), ((l0, ()), l1)):
        assert value_to_bundle(bundle_to_value(b)) == b


def test_value_to_bundle_rejects_parameters():
    with pytest.raises(Stuck):
        value_to_bundle(NatVal(3))


# --------------------------------------------------------------------------
# whole programs
# --------------------------------------------------------------------------

def test_bell_program_builds_expected_circuit():
    c, ctx, v = run(
        "inputs;"
        " let q = apply(@init, *) in"
        " let p = apply(@init, *) in"
        " let q = apply(@H, q) in"
        " let qp = apply(@CNOT, (q, p)) in"
        " return qp")
    assert c.dom == ()
    assert c.cod == (Q, Q)
    assert gate_sequence(c) == [("init", 0), ("init", 1), ("H", 0), ("CNOT", 0)]
    assert flatten_bundle(value_to_bundle(v)) == list(ctx.labels)


def test_inputs_become_wires_in_declaration_order():
    prog = parse_program("inputs a: Qubit, b: Bit; return (b, a)")
    reset_labels()
    cfg, in_ctx = initial_configuration(prog)
    assert in_ctx.obj == (Q, B)
    assert cfg.circuit.dom == (Q, B)
    assert cfg.circuit.steps == ()
    c, ctx, v = evaluate(cfg, registry)
    la, lb = in_ctx.labels
    assert value_to_bundle(v) == (lb, la)
    assert ctx is in_ctx  # no gates ran, outputs are the inputs


def test_gate_changing_wire_type():
    c, ctx, v = run("inputs q: Qubit; let b = apply(@meas, q) in return b")
    assert c.cod == (B,)
    assert gate_sequence(c) == [("meas", 0)]


# --------------------------------------------------------------------------
# box and apply
# --------------------------------------------------------------------------

def test_box_runs_in_private_configuration():
    c, ctx, v = run(
        r"inputs;"
        r" let c = box[Qubit] lift \x: Qubit."
        r"   let x = apply(@H, x) in apply(@X, x) in"
        r" return *")
    assert c.steps == ()  # boxing leaves the outer circuit untouched
    assert ctx.entries == ()


def test_boxed_circuit_value_has_the_function_body():
    prog = parse_program(
        r"inputs q: Qubit;"
        r" let c = box[Qubit] lift \x: Qubit."
        r"   let x = apply(@H, x) in apply(@X, x) in"
        r" apply(c, q)")
    check_program(prog, registry)
    reset_labels()
    c, ctx, v = evaluate_program(prog, registry)
    assert gate_sequence(c) == [("H", 0), ("X", 0)]
    assert c.dom == (Q,) and c.cod == (Q,)


def test_apply_boxed_away_from_wire_zero():
    c, ctx, v = run(
        r"inputs a: Qubit, b: Qubit;"
        r" let c = box[Qubit] lift \x: Qubit. apply(@H, x) in"
        r" let b = apply(c, b) in"
        r" return (a, b)")
    assert gate_sequence(c) == [("H", 1)]


def test_boxed_value_reused_twice():
    c, ctx, v = run(
        r"inputs q: Qubit;"
        r" let c = box[Qubit] lift \x: Qubit. apply(@H, x) in"
        r" let q = apply(c, q) in"
        r" let q = apply(c, q) in"
        r" return q")
    assert gate_sequence(c) == [("H", 0), ("H", 0)]


def test_box_of_pair_shape():
    c, ctx, v = run(
        r"inputs a: Qubit, b: Qubit;"
        r" let c = box[Qubit * Qubit] lift \p: Qubit * Qubit."
        r"   dest (x, y) = p in"
        r"   let xy = apply(@CNOT, (x, y)) in"
        r"   return xy in"
        r" apply(c, (b, a))")
    # the argument bundle (b, a) routes input wires through a swap first
    assert gate_sequence(c) == [("CNOT", 0)]
    assert c.cod == (Q, Q)


# --------------------------------------------------------------------------
# control flow, fuel, stuck states
# --------------------------------------------------------------------------

def test_ifz_picks_branches():
    c, ctx, v = run(
        "inputs q: Qubit; ifz 0 then apply(@H, q) else apply(@X, q)")
    assert gate_sequence(c) == [("H", 0)]
    c, ctx, v = run(
        "inputs q: Qubit; ifz 2 then apply(@H, q) else apply(@X, q)")
    assert gate_sequence(c) == [("X", 0)]


def test_force_lift_cancel():
    c, ctx, v = run("inputs; let n = force lift return 4 in return n")
    assert v == NatVal(4)


def test_fuel_exhaustion():
    src = ("inputs; " +
           " ".join(f"let x{i} = return {i} in" for i in range(20)) +
           " return *")
    with pytest.raises(FuelExhausted):
        run(src, fuel=5)
    run(src, fuel=1000)  # plenty of fuel: runs fine


def test_gate_application_needs_apply():
    with pytest.raises(Stuck, match="apply"):
        evaluate_program(
            parse_program("inputs q: Qubit; @H q"), registry)


def test_stuck_shapes():
    reset_labels()
    bad = [
        App(NatVal(1), NatVal(2)),
        Dest("a", "b", NatVal(1), Ret(UnitVal())),
        Ifz(UnitVal(), Ret(UnitVal()), Ret(UnitVal())),
        Force(NatVal(1)),
        Apply(NatVal(1), UnitVal()),
    ]
    for term in bad:
        cfg, _ = initial_configuration(
            parse_program("inputs; return *"))
        cfg.term = term
        with pytest.raises(Stuck):
            evaluate(cfg, registry)


# --------------------------------------------------------------------------
# random programs stay well-formed
# --------------------------------------------------------------------------

def test_random_programs_evaluate_cleanly():
    r = rng("evaluator-random")
    for _ in range(40):
        prog = random_program(r)
        check_program(prog, registry)
        reset_labels()
        c, ctx, v = evaluate_program(prog, registry, fuel=10_000)
        assert ctx.obj == c.cod
        assert sorted(flatten_bundle(value_to_bundle(v))) == \
            sorted(ctx.labels)
