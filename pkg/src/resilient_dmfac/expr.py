"""Scalar expression language for dynamics, leader and attack formulas.

Grammar (lowest to highest precedence)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | '+' unary | power
    power   := atom ('^' exponent)?
    exponent:= '-' exponent | '+' exponent | atom ('^' exponent)?
    atom    := number | 'y' | 'u' | 'k' | 'pi' | func '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus, so ``-y^2`` is ``-(y^2)``. Exponents
must be constant (no variables).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

VARIABLES = ("y", "u", "k")
FUNCTIONS = {"sin": math.sin, "cos": math.cos, "abs": abs}


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at offset {position}")
        self.position = position


class ExprEvalError(ArithmeticError):
    pass


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Unary:
    op: str  # 'neg', 'abs', 'sin', 'cos'
    operand: "Node"


@dataclass(frozen=True)
class Binary:
    op: str  # '+', '-', '*', '/', '^'
    left: "Node"
    right: "Node"


Node = Union[Const, Var, Pi, Unary, Binary]

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    end = len(text.rstrip())
    while pos < end:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {val!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Unary("neg", self.unary())
        if kind == "op" and val == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            exp_pos = self.peek()[2]
            exponent = self.exponent()
            if not is_constant(exponent):
                raise ExprSyntaxError("exponent must be a constant expression", exp_pos)
            return Binary("^", base, exponent)
        return base

    def exponent(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            return Unary("neg", self.exponent())
        if kind == "op" and val == "+":
            self.take()
            return self.exponent()
        return self.power()

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            if val in VARIABLES:
                return Var(val)
            if val == "pi":
                return Pi()
            if val in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Unary(val, arg)
            raise ExprSyntaxError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {found}", pos)


def parse(text: str) -> Node:
    """Parse ``text`` into an AST. Raises ExprSyntaxError with the offset."""
    return _Parser(text).parse()


def is_constant(node: Node) -> bool:
    if isinstance(node, Var):
        return False
    if isinstance(node, Unary):
        return is_constant(node.operand)
    if isinstance(node, Binary):
        return is_constant(node.left) and is_constant(node.right)
    return True


def variables(node: Node) -> set:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Unary):
        return variables(node.operand)
    if isinstance(node, Binary):
        return variables(node.left) | variables(node.right)
    return set()


def _pow(base, exponent):
    if base < 0 and not float(exponent).is_integer():
        raise ExprEvalError(f"negative base {base!r} with non-integer exponent {exponent!r}")
    if base == 0 and exponent < 0:
        raise ExprEvalError("division by zero in power")
    try:
        return math.pow(base, exponent)
    except OverflowError:
        raise ExprEvalError("overflow in power") from None


def _eval(node, y, u, k):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return y if node.name == "y" else u if node.name == "u" else k
    if isinstance(node, Pi):
        return math.pi
    if isinstance(node, Unary):
        x = _eval(node.operand, y, u, k)
        if node.op == "neg":
            return -x
        return FUNCTIONS[node.op](x)
    a = _eval(node.left, y, u, k)
    b = _eval(node.right, y, u, k)
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise ExprEvalError("division by zero")
        return a / b
    return _pow(a, b)


def evaluate(node: Node, y: float = 0.0, u: float = 0.0, k: int = 0) -> float:
    """Evaluate in double precision; non-finite results raise ExprEvalError."""
    try:
        value = float(_eval(node, float(y), float(u), float(k)))
    except (ValueError, OverflowError) as exc:
        raise ExprEvalError(str(exc)) from None
    if not math.isfinite(value):
        raise ExprEvalError(f"non-finite result {value!r}")
    return value


_BINARY_TEXT = {"+": " + ", "-": " - ", "*": " * ", "/": " / ", "^": " ^ "}


def fmt(node: Node) -> str:
    """Canonical fully-parenthesized rendering; ``parse(fmt(a))`` evaluates like ``a``."""
    if isinstance(node, Const):
        text = repr(float(node.value))
        return f"({text})" if node.value < 0 or text.startswith("-") else text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Pi):
        return "pi"
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"(-{fmt(node.operand)})"
        return f"{node.op}({fmt(node.operand)})"
    return f"({fmt(node.left)}{_BINARY_TEXT[node.op]}{fmt(node.right)})"


class Expression:
    """A parsed expression that remembers its source text."""

    def __init__(self, text: str):
        self.text = text
        self.ast = parse(text)

    def __call__(self, y: float = 0.0, u: float = 0.0, k: int = 0) -> float:
        return evaluate(self.ast, y, u, k)

    def __repr__(self):
        return f"Expression({self.text!r})"

    def __eq__(self, other):
        return isinstance(other, Expression) and self.ast == other.ast

    def __hash__(self):
        return hash(self.ast)
