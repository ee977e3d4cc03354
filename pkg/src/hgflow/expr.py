"""Arithmetic expressions for initial data, e.g. ``"1 + 0.5*sin(x)"``.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := number | 'x' | 'r' | const | ident '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so
``-2^2 == -4`` and ``2^3^2 == 512``.  Evaluation is vectorized through numpy
ufuncs.  Error offsets are byte offsets into the UTF-8 encoded text.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ExpressionError

FUNCTIONS = {
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp, "ln": np.log,
    "sqrt": np.sqrt, "tanh": np.tanh, "abs": np.abs,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("x", "r")
BINARY = {"+": np.add, "-": np.subtract, "*": np.multiply, "/": np.divide, "^": np.power}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


# syntax tree
@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionError(f"unexpected character {text[pos]!r}", _byte(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _byte(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, msg, tok=None):
        tok = tok or self.tok
        raise ExpressionError(msg, _byte(self.text, tok[2]))

    def eat(self, value):
        if self.tok[1] != value or self.tok[0] == "end":
            what = "end of input" if self.tok[0] == "end" else repr(self.tok[1])
            self.fail(f"expected {value!r}, found {what}")
        self.i += 1

    def parse(self):
        node = self.expr()
        if self.tok[0] != "end":
            self.fail(f"unexpected {self.tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        if self.tok[0] == "op" and self.tok[1] == "-":
            self.i += 1
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.i += 1
            return BinOp("^", base, self.factor())
        return base

    def atom(self):
        kind, text, _ = tok = self.tok
        if kind == "num":
            self.i += 1
            return Num(float(text))
        if kind == "name":
            self.i += 1
            if text in VARIABLES:
                return Var(text)
            if text in CONSTANTS:
                return Num(CONSTANTS[text])
            if text in FUNCTIONS:
                self.eat("(")
                if self.tok[1] == ")" and self.tok[0] == "op":
                    self.fail(f"{text}() takes exactly one argument, got none")
                arg = self.expr()
                if self.tok[1] == "," and self.tok[0] == "op":
                    self.fail(f"{text}() takes exactly one argument")
                self.eat(")")
                return Call(text, arg)
            self.fail(f"unknown identifier {text!r}", tok)
        if kind == "op" and text == "(":
            self.i += 1
            node = self.expr()
            self.eat(")")
            return node
        if kind == "end":
            self.fail("unexpected end of input")
        self.fail(f"unexpected {text!r}")


def _eval(node, env):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Var):
        if node.name not in env:
            raise ExpressionError(f"variable {node.name!r} is not bound")
        return env[node.name]
    if isinstance(node, Neg):
        return np.negative(_eval(node.arg, env))
    if isinstance(node, BinOp):
        return BINARY[node.op](_eval(node.left, env), _eval(node.right, env))
    return FUNCTIONS[node.fn](_eval(node.arg, env))


def _variables(node, acc):
    if isinstance(node, Var):
        acc.add(node.name)
    elif isinstance(node, Neg):
        _variables(node.arg, acc)
    elif isinstance(node, BinOp):
        _variables(node.left, acc)
        _variables(node.right, acc)
    elif isinstance(node, Call):
        _variables(node.arg, acc)
    return acc


@dataclass(frozen=True)
class Expression:
    text: str
    tree: object

    @property
    def variables(self) -> frozenset:
        return frozenset(_variables(self.tree, set()))

    def evaluate(self, **env):
        """Evaluate with variables bound to scalars or arrays; constants broadcast."""
        env = {k: np.asarray(v, dtype=np.float64) for k, v in env.items()}
        with np.errstate(all="ignore"):
            out = _eval(self.tree, env)
        shape = np.broadcast_shapes(*(v.shape for v in env.values())) if env else ()
        return np.broadcast_to(np.asarray(out, dtype=np.float64), shape).copy()

    __call__ = evaluate


def parse_expression(text: str) -> Expression:
    return Expression(text, _Parser(text).parse())
