"""Arithmetic expressions in x, y, z for test functions on the command line.

Grammar (``^`` binds tighter than unary minus and is right associative)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Names are the variables x, y, z, the constant pi and the functions sin,
cos, exp, sqrt, abs. Evaluation is vectorized over numpy arrays.
"""
import re
from dataclasses import dataclass

import numpy as np

VARIABLES = ("x", "y", "z")
CONSTANTS = {"pi": np.pi}
FUNCTIONS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "sqrt": np.sqrt, "abs": np.abs}

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(\S))")


class ExpressionError(ValueError):
    """Syntax, name or arity error; ``position`` is the 0-based character offset."""

    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    arg: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    arg: object


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            break
        num, name, sym = match.groups()
        start = match.start(match.lastindex)
        if num is not None:
            tokens.append(("num", num, start))
        elif name is not None:
            tokens.append(("name", name, start))
        else:
            if sym not in "+-*/^(),":
                raise ExpressionError(f"unexpected character {sym!r}", start)
            tokens.append(("sym", sym, start))
        pos = match.end()
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

    def accept(self, sym):
        kind, value, _ = self.peek()
        if kind == "sym" and value == sym:
            self.i += 1
            return True
        return False

    def expect(self, sym):
        if not self.accept(sym):
            kind, value, pos = self.peek()
            found = "end of input" if kind == "end" else repr(value)
            raise ExpressionError(f"expected {sym!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {value!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "sym" and value in "+-":
                self.take()
                node = Binary(value, node, self.term())
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, value, _ = self.peek()
            if kind == "sym" and value in "*/":
                self.take()
                node = Binary(value, node, self.unary())
            else:
                return node

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "sym" and value in "+-":
            self.take()
            arg = self.unary()
            return Unary("-", arg) if value == "-" else arg
        return self.power()

    def power(self):
        base = self.primary()
        if self.accept("^"):
            return Binary("^", base, self.unary())
        return base

    def primary(self):
        kind, value, pos = self.take()
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            if value in FUNCTIONS:
                if not self.accept("("):
                    raise ExpressionError(f"function {value!r} needs a parenthesized argument", pos)
                arg = self.expr()
                if self.accept(","):
                    raise ExpressionError(f"function {value!r} takes exactly one argument", pos)
                self.expect(")")
                return Call(value, arg)
            if value in CONSTANTS:
                return Num(CONSTANTS[value])
            if value in VARIABLES:
                return Var(value)
            raise ExpressionError(f"unknown identifier {value!r}", pos)
        if kind == "sym" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(value)
        raise ExpressionError(f"unexpected {found}", pos)


def parse_expression(text):
    """Parse ``text`` into an expression tree; raises :class:`ExpressionError`."""
    return _Parser(text).parse()


def variables(node):
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, (Unary, Call)):
        return variables(node.arg)
    if isinstance(node, Binary):
        return variables(node.left) | variables(node.right)
    return set()


def evaluate(node, env):
    """Evaluate with ``env`` mapping variable names to scalars or arrays."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        if node.name not in env:
            raise KeyError(f"variable {node.name!r} is not defined in this dimension")
        return env[node.name]
    if isinstance(node, Unary):
        return -evaluate(node.arg, env)
    if isinstance(node, Call):
        return FUNCTIONS[node.name](evaluate(node.arg, env))
    a, b = evaluate(node.left, env), evaluate(node.right, env)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        return a / b
    return np.power(a, b)


class ExpressionFunction:
    """A parsed expression as a callable on (P, n) point arrays."""

    def __init__(self, text, dim):
        self.text = text
        self.dim = dim
        self.tree = parse_expression(text)
        unused = variables(self.tree) - set(VARIABLES[:dim])
        if unused:
            raise ExpressionError(f"variable {sorted(unused)[0]!r} not available in {dim}D", 0)

    def __repr__(self):
        return f"ExpressionFunction({self.text!r}, dim={self.dim})"

    def __call__(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        env = {name: pts[:, i] for i, name in enumerate(VARIABLES[:self.dim])}
        out = np.asarray(evaluate(self.tree, env), dtype=float)
        return np.broadcast_to(out, (len(pts),)).copy()
