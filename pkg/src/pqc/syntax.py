"""Surface language: AST, lexer, parser and printer.

The language is a fine-grained call-by-value linear lambda calculus for
describing circuit-building computations. Values and computations (terms) are
syntactically disjoint: a bare value is not a program — wrap it in
``return`` — and every intermediate result is named by ``let``.

Concrete syntax sketch::

    inputs a:Qubit, b:Qubit;          -- typed input wires (may be empty)
    gates "my_gates.pqcg";            -- optional extra gate definitions

    let ab = apply(@CNOT, (a, b)) in
    dest (a2, b2) = ab in
    return (a2, b2)

Types:      1, Nat, Qubit, Bit, I, !A, A * B (right assoc.),
            A -o[T] B, A -o[T; n] B (right assoc., T = captured-wire shape,
            n = optional scalar resource ascription),
            Circ(T, U), Circ[n](T, U).
Values:     * (unit), naturals, variables, wire labels #k, gate references
            @name, tuples (v1, ..., vn) (right-nested pairs),
            \\x:T. M, lift M.
Terms:      return V | V W | let x = M in N | dest (x, ..., z) = V in N
            | ifz V then M else N | force V | box[T] V | apply(V, W).

Comments run from ``--`` to end of line. Tuples and tuple patterns of width
n > 2 are sugar for right-nested pairs, resolved during parsing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from .circuits import BoxedCircuit, Label
from .errors import NotAValue, ParseError


# --------------------------------------------------------------------------
# types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitT:
    def __str__(self):
        return "1"


@dataclass(frozen=True)
class NatT:
    def __str__(self):
        return "Nat"


@dataclass(frozen=True)
class QubitT:
    def __str__(self):
        return "Qubit"


@dataclass(frozen=True)
class BitT:
    def __str__(self):
        return "Bit"


@dataclass(frozen=True)
class BundleUnitT:
    """The empty wire bundle; what parameter types look like to a circuit."""

    def __str__(self):
        return "I"


@dataclass(frozen=True)
class TensorT:
    left: "Type"
    right: "Type"

    def __str__(self):
        return show_type(self)


@dataclass(frozen=True)
class ArrowT:
    """``A -o[T] B``: a linear function that captured wires of shape T.

    ``bound`` is an optional scalar resource ascription on the function body
    (``A -o[T; n] B``). ``eff`` is filled in by effect inference and never
    written in source; it does not participate in equality.
    """

    dom: "Type"
    cod: "Type"
    captured: "Type"
    bound: Optional[int] = None
    eff: object = field(default=None, compare=False)

    def __str__(self):
        return show_type(self)


@dataclass(frozen=True)
class BangT:
    inner: "Type"
    eff: object = field(default=None, compare=False)

    def __str__(self):
        return show_type(self)


@dataclass(frozen=True)
class CircT:
    dom: "Type"
    cod: "Type"
    bound: Optional[int] = None
    eff: object = field(default=None, compare=False)

    def __str__(self):
        return show_type(self)


Type = Union[UnitT, NatT, QubitT, BitT, BundleUnitT, TensorT, ArrowT, BangT, CircT]


# --------------------------------------------------------------------------
# values and terms
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitVal:
    def __str__(self):
        return "*"


@dataclass(frozen=True)
class NatVal:
    n: int

    def __str__(self):
        return str(self.n)


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class LabelVal:
    label: Label

    def __str__(self):
        return str(self.label)


@dataclass(frozen=True)
class GateRef:
    name: str

    def __str__(self):
        return "@" + self.name


@dataclass(frozen=True)
class Pair:
    left: "Value"
    right: "Value"

    def __str__(self):
        return show_value(self)


@dataclass(frozen=True)
class Lam:
    var: str
    ty: Type
    body: "Term"

    def __str__(self):
        return show_value(self)


@dataclass(frozen=True)
class Lift:
    term: "Term"

    def __str__(self):
        return show_value(self)


@dataclass(frozen=True)
class BoxedVal:
    """A completed circuit as a value; not writable in source syntax."""

    boxed: BoxedCircuit
    name: Optional[str] = None

    def __str__(self):
        return f"@{self.name}" if self.name else "<boxed circuit>"


Value = Union[UnitVal, NatVal, Var, LabelVal, GateRef, Pair, Lam, Lift, BoxedVal]


@dataclass(frozen=True)
class Ret:
    value: Value

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True)
class App:
    fn: Value
    arg: Value

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True)
class Let:
    var: str
    bound: "Term"
    body: "Term"

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True)
class Dest:
    left: str
    right: str
    value: Value
    body: "Term"

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True)
class Ifz:
    cond: Value
    then: "Term"
    els: "Term"

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True)
class Force:
    value: Value

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True)
class Box:
    shape: Type
    value: Value

    def __str__(self):
        return show_term(self)


@dataclass(frozen=True)
class Apply:
    circ: Value
    arg: Value

    def __str__(self):
        return show_term(self)


Term = Union[Ret, App, Let, Dest, Ifz, Force, Box, Apply]


@dataclass(frozen=True)
class Program:
    inputs: tuple[tuple[str, Type], ...]
    gates_path: Optional[str]
    term: Term

    def __str__(self):
        return show_program(self)


# --------------------------------------------------------------------------
# lexer
# --------------------------------------------------------------------------

_KEYWORDS = {
    "let", "in", "return", "force", "lift", "box", "apply", "ifz", "then",
    "else", "dest", "inputs", "gates", "Nat", "Qubit", "Bit", "Circ", "I",
}

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>--[^\n]*)
  | (?P<nl>\n)
  | (?P<arrow>-o)
  | (?P<nat>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<label>\#[0-9]+)
  | (?P<gateref>@[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<punct>[()\[\],;:.=*!\\])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list[Token]:
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(src):
        m = _TOKEN_RE.match(src, i)
        if not m:
            raise ParseError(f"unexpected character {src[i]!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind not in ("ws", "comment"):
            if kind == "ident" and text in _KEYWORDS:
                kind = "kw"
            elif kind == "punct":
                kind = text
            elif kind == "arrow":
                kind = "-o"
            tokens.append(Token(kind, text, line, col))
            col += len(text)
        else:
            col += len(text)
        i = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

_TERM_KEYWORDS = {"let", "return", "ifz", "force", "box", "apply", "dest"}
_VALUE_STARTS = {"nat", "ident", "label", "gateref", "*", "(", "\\"}


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    def peek(self, ahead: int = 0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.toks[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def fail(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, kind: str, what: str) -> Token:
        t = self.peek()
        if t.kind != kind:
            self.fail(f"expected {what}, found {t.text!r}" if t.text else
                      f"expected {what}, found end of input")
        return self.next()

    def expect_kw(self, word: str) -> Token:
        t = self.peek()
        if t.kind != "kw" or t.text != word:
            self.fail(f"expected {word!r}, found {t.text!r}")
        return self.next()

    def at_kw(self, word: str) -> bool:
        t = self.peek()
        return t.kind == "kw" and t.text == word

    # ---- types -----------------------------------------------------------

    def type_(self) -> Type:
        left = self.type_tensor()
        if self.peek().kind == "-o":
            self.next()
            self.expect("[", "'[' after -o")
            captured = self.type_()
            bound = None
            if self.peek().kind == ";":
                self.next()
                bound = int(self.expect("nat", "a scalar bound").text)
            self.expect("]", "']'")
            cod = self.type_()
            return ArrowT(left, cod, captured, bound)
        return left

    def type_tensor(self) -> Type:
        left = self.type_bang()
        if self.peek().kind == "*":
            self.next()
            return TensorT(left, self.type_tensor())
        return left

    def type_bang(self) -> Type:
        if self.peek().kind == "!":
            self.next()
            return BangT(self.type_bang())
        return self.type_atom()

    def type_atom(self) -> Type:
        t = self.peek()
        if t.kind == "nat":
            if t.text == "1":
                self.next()
                return UnitT()
            self.fail(f"{t.text} is not a type (only 1 denotes the unit type)")
        if t.kind == "kw":
            if t.text == "Nat":
                self.next()
                return NatT()
            if t.text == "Qubit":
                self.next()
                return QubitT()
            if t.text == "Bit":
                self.next()
                return BitT()
            if t.text == "I":
                self.next()
                return BundleUnitT()
            if t.text == "Circ":
                self.next()
                bound = None
                if self.peek().kind == "[":
                    self.next()
                    bound = int(self.expect("nat", "a scalar bound").text)
                    self.expect("]", "']'")
                self.expect("(", "'(' after Circ")
                dom = self.type_()
                self.expect(",", "','")
                cod = self.type_()
                self.expect(")", "')'")
                return CircT(dom, cod, bound)
        if t.kind == "(":
            self.next()
            inner = self.type_()
            self.expect(")", "')'")
            return inner
        self.fail(f"expected a type, found {t.text!r}")

    # ---- values ----------------------------------------------------------

    def value(self) -> Value:
        t = self.peek()
        if t.kind == "\\":
            self.next()
            name = self.expect("ident", "a variable name").text
            self.expect(":", "':' after lambda variable")
            ty = self.type_()
            self.expect(".", "'.' after lambda type")
            return Lam(name, ty, self.term())
        if t.kind == "kw" and t.text == "lift":
            self.next()
            # common shorthand: lift V means lift return V
            if self.peek().kind in _VALUE_STARTS:
                v = self.value()
                if self.peek().kind in _VALUE_STARTS or self.at_kw("lift"):
                    return Lift(App(v, self.value()))
                return Lift(Ret(v))
            return Lift(self.term())
        if t.kind == "*":
            self.next()
            return UnitVal()
        if t.kind == "nat":
            self.next()
            return NatVal(int(t.text))
        if t.kind == "ident":
            self.next()
            return Var(t.text)
        if t.kind == "label":
            self.next()
            return LabelVal(Label(int(t.text[1:])))
        if t.kind == "gateref":
            self.next()
            return GateRef(t.text[1:])
        if t.kind == "(":
            self.next()
            parts = [self.value()]
            while self.peek().kind == ",":
                self.next()
                parts.append(self.value())
            self.expect(")", "')'")
            v = parts[-1]
            for p in reversed(parts[:-1]):
                v = Pair(p, v)
            return v
        if t.kind == "kw" and t.text in _TERM_KEYWORDS:
            raise NotAValue(
                f"{t.text!r} begins a computation, not a value; "
                f"bind it with let first", t.line, t.col)
        self.fail(f"expected a value, found {t.text!r}")

    # ---- terms -----------------------------------------------------------

    def term(self) -> Term:
        t = self.peek()
        if t.kind == "kw":
            if t.text == "let":
                self.next()
                name = self.expect("ident", "a variable name").text
                self.expect("=", "'='")
                bound = self.term()
                self.expect_kw("in")
                return Let(name, bound, self.term())
            if t.text == "dest":
                self.next()
                self.expect("(", "'(' after dest")
                names = [self.expect("ident", "a variable name").text]
                while self.peek().kind == ",":
                    self.next()
                    names.append(self.expect("ident", "a variable name").text)
                self.expect(")", "')'")
                if len(names) < 2:
                    self.fail("dest pattern needs at least two names")
                self.expect("=", "'='")
                v = self.value()
                self.expect_kw("in")
                body = self.term()
                return _nest_dest(names, v, body)
            if t.text == "return":
                self.next()
                return Ret(self.value())
            if t.text == "ifz":
                self.next()
                cond = self.value()
                self.expect_kw("then")
                then = self.term()
                self.expect_kw("else")
                return Ifz(cond, then, self.term())
            if t.text == "force":
                self.next()
                return Force(self.value())
            if t.text == "box":
                self.next()
                self.expect("[", "'[' after box")
                shape = self.type_()
                self.expect("]", "']'")
                return Box(shape, self.value())
            if t.text == "apply":
                self.next()
                self.expect("(", "'(' after apply")
                circ = self.value()
                self.expect(",", "','")
                arg = self.value()
                self.expect(")", "')'")
                return Apply(circ, arg)
        fn = self.value()
        if self.peek().kind in _VALUE_STARTS or self.at_kw("lift"):
            return App(fn, self.value())
        self.fail("a bare value is not a computation; "
                  "apply it or wrap it in return")

    # ---- program ---------------------------------------------------------

    def program(self) -> Program:
        self.expect_kw("inputs")
        inputs = []
        if self.peek().kind == "ident":
            while True:
                name = self.expect("ident", "an input name").text
                self.expect(":", "':' after input name")
                inputs.append((name, self.type_()))
                if self.peek().kind != ",":
                    break
                self.next()
        self.expect(";", "';' after inputs")
        gates_path = None
        if self.at_kw("gates"):
            self.next()
            gates_path = self.expect("string", "a quoted file name").text[1:-1]
            self.expect(";", "';' after gates")
        term = self.term()
        self.expect("eof", "end of program")
        return Program(tuple(inputs), gates_path, term)


def _nest_dest(names: list[str], v: Value, body: Term) -> Dest:
    """dest (x, y, z) = v  ≡  dest (x, t) = v in dest (y, z) = t in ..."""
    if len(names) == 2:
        return Dest(names[0], names[1], v, body)
    rest = "_" + "".join(names[1:])
    return Dest(names[0], rest, v, _nest_dest(names[1:], Var(rest), body))


def parse_type(src: str) -> Type:
    p = _Parser(tokenize(src))
    ty = p.type_()
    p.expect("eof", "end of type")
    return ty


def parse_value(src: str) -> Value:
    p = _Parser(tokenize(src))
    v = p.value()
    p.expect("eof", "end of value")
    return v


def parse_term(src: str) -> Term:
    p = _Parser(tokenize(src))
    m = p.term()
    p.expect("eof", "end of term")
    return m


def parse_program(src: str) -> Program:
    return _Parser(tokenize(src)).program()


# --------------------------------------------------------------------------
# printer (parses back to an equal tree)
# --------------------------------------------------------------------------

def _show_type(ty: Type, prec: int) -> str:
    # precedence: 0 arrow, 1 tensor, 2 bang/atom
    match ty:
        case ArrowT(dom, cod, captured, bound, _):
            ann = str(captured) if bound is None else f"{captured}; {bound}"
            s = f"{_show_type(dom, 1)} -o[{ann}] {_show_type(cod, 0)}"
            return f"({s})" if prec > 0 else s
        case TensorT(left, right):
            s = f"{_show_type(left, 2)} * {_show_type(right, 1)}"
            return f"({s})" if prec > 1 else s
        case BangT(inner, _):
            return f"!{_show_type(inner, 2)}"
        case CircT(dom, cod, bound, _):
            ann = f"[{bound}]" if bound is not None else ""
            return f"Circ{ann}({_show_type(dom, 0)}, {_show_type(cod, 0)})"
        case _:
            return str(ty)


def show_type(ty: Type) -> str:
    return _show_type(ty, 0)


def _tuple_parts(v: Value) -> list[Value]:
    parts = []
    while isinstance(v, Pair):
        parts.append(v.left)
        v = v.right
    parts.append(v)
    return parts


def show_value(v: Value) -> str:
    match v:
        case Pair():
            return "(" + ", ".join(show_value(p) for p in _tuple_parts(v)) + ")"
        case Lam(var, ty, body):
            return f"\\{var}:{show_type(ty)}. {show_term(body)}"
        case Lift(term):
            return f"lift {show_term(term)}"
        case _:
            return str(v)


def _show_operand(v: Value) -> str:
    # operands of application must re-parse as a single value
    if isinstance(v, (Lam, Lift)):
        return f"({show_value(v)})"
    return show_value(v)


def show_term(m: Term) -> str:
    match m:
        case Ret(v):
            return f"return {show_value(v)}"
        case App(fn, arg):
            return f"{_show_operand(fn)} {show_value(arg)}"
        case Let(var, bound, body):
            return f"let {var} = {show_term(bound)} in\n{show_term(body)}"
        case Dest(left, right, value, body):
            return (f"dest ({left}, {right}) = {show_value(value)} in\n"
                    f"{show_term(body)}")
        case Ifz(cond, then, els):
            return (f"ifz {show_value(cond)} then {show_term(then)} "
                    f"else {show_term(els)}")
        case Force(v):
            return f"force {show_value(v)}"
        case Box(shape, v):
            return f"box[{show_type(shape)}] {show_value(v)}"
        case Apply(circ, arg):
            return f"apply({show_value(circ)}, {show_value(arg)})"
    raise TypeError(f"not a term: {m!r}")


def show_program(p: Program) -> str:
    header = "inputs " + ", ".join(f"{n}:{show_type(t)}" for n, t in p.inputs)
    lines = [header.rstrip() + ";"]
    if p.gates_path is not None:
        lines.append(f'gates "{p.gates_path}";')
    lines.append("")
    lines.append(show_term(p.term))
    return "\n".join(lines) + "\n"
