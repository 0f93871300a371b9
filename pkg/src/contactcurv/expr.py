"""A small expression language for scalar fields on a chart.

Grammar (whitespace is insignificant)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := primary ('^' unary)?          # right-associative
    primary := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

``^`` binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``.  The
exponent must be free of chart variables.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import EvalDomainError, ParseError
from .jets import Jet2

__all__ = [
    "Num", "Var", "Const", "Neg", "Bin", "Call",
    "FUNCTIONS", "parse", "to_text", "eval_jet2", "eval_value", "is_constant", "compile_value",
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    index: int


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    func: str
    arg: object


CONSTANTS = {"pi": math.pi}


def _sec2(v):
    c = math.cos(v)
    if c == 0.0:
        raise ZeroDivisionError
    return 1.0 / (c * c)


def _asin_d(v):
    if abs(v) >= 1.0:
        raise ValueError
    s = 1.0 - v * v
    return (math.asin(v), 1.0 / math.sqrt(s), v / s**1.5)


def _acos_d(v):
    a, d1, d2 = _asin_d(v)
    return (math.acos(v), -d1, -d2)


def _tan_d(v):
    t = math.tan(v)
    s = _sec2(v)
    return (t, s, 2.0 * t * s)


def _tanh_d(v):
    t = math.tanh(v)
    return (t, 1.0 - t * t, -2.0 * t * (1.0 - t * t))


def _ln_d(v):
    if v <= 0:
        raise ValueError
    return (math.log(v), 1.0 / v, -1.0 / (v * v))


def _sqrt_d(v):
    if v <= 0:
        raise ValueError
    s = math.sqrt(v)
    return (s, 0.5 / s, -0.25 / (s * v))


def _abs_d(v):
    if v == 0:
        raise ValueError
    return (abs(v), math.copysign(1.0, v), 0.0)


def _exp_d(v):
    e = math.exp(v)
    return (e, e, e)


# name -> value plus first and second derivative at a scalar argument
FUNCTIONS = {
    "sin": lambda v: (math.sin(v), math.cos(v), -math.sin(v)),
    "cos": lambda v: (math.cos(v), -math.sin(v), -math.cos(v)),
    "tan": _tan_d,
    "asin": _asin_d,
    "acos": _acos_d,
    "atan": lambda v: (math.atan(v), 1.0 / (1.0 + v * v), -2.0 * v / (1.0 + v * v) ** 2),
    "sinh": lambda v: (math.sinh(v), math.cosh(v), math.sinh(v)),
    "cosh": lambda v: (math.cosh(v), math.sinh(v), math.cosh(v)),
    "tanh": _tanh_d,
    "exp": _exp_d,
    "ln": _ln_d,
    "sqrt": _sqrt_d,
    "abs": _abs_d,
}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, {"number", "name", "operator"})
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


_OPERAND = {"number", "name", "'('", "'-'"}


class _Parser:
    def __init__(self, text, chart):
        self.text = text
        self.chart = tuple(chart)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def at_op(self, *ops):
        kind, val, _ = self.peek()
        return kind == "op" and val in ops

    def expect_op(self, op):
        kind, val, off = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected '{op}'", off, {f"'{op}'"})
        self.i += 1

    def parse(self):
        node = self.expr()
        kind, val, off = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {val!r}", off, {"operator", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.take()[1]
            node = Bin(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.take()[1]
            node = Bin(op, node, self.unary())
        return node

    def unary(self):
        if self.at_op("-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.primary()
        if self.at_op("^"):
            off = self.take()[2]
            exponent = self.unary()
            if not is_constant(exponent):
                raise ParseError("exponent must be a constant expression", off + 1, {"constant expression"})
            return Bin("^", base, exponent)
        return base

    def primary(self):
        kind, val, off = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "name":
            if self.at_op("("):
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", off, set(FUNCTIONS))
                self.take()
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            if val in self.chart:
                return Var(val, self.chart.index(val))
            if val in CONSTANTS:
                return Const(val)
            raise ParseError(f"unknown identifier {val!r}", off, set(self.chart) | set(CONSTANTS))
        if kind == "op" and val == "(":
            node = self.expr()
            self.expect_op(")")
            return node
        what = "end of input" if kind == "end" else repr(val)
        raise ParseError(f"expected operand, found {what}", off, _OPERAND)


def parse(text: str, chart=("x", "y", "t")):
    """Parse ``text`` into an immutable AST over the given chart variables."""
    return _Parser(text, chart).parse()


def is_constant(node) -> bool:
    if isinstance(node, (Num, Const)):
        return True
    if isinstance(node, Var):
        return False
    if isinstance(node, Neg):
        return is_constant(node.arg)
    if isinstance(node, Call):
        return is_constant(node.arg)
    return is_constant(node.left) and is_constant(node.right)


def to_text(node) -> str:
    """Fully parenthesised text that parses back to the same AST."""
    if isinstance(node, Num):
        return repr(float(node.value))
    if isinstance(node, (Var, Const)):
        return node.name
    if isinstance(node, Neg):
        return f"(-{to_text(node.arg)})"
    if isinstance(node, Call):
        return f"{node.func}({to_text(node.arg)})"
    return f"({to_text(node.left)} {node.op} {to_text(node.right)})"


def eval_value(node, point) -> float:
    """Plain float evaluation (no derivatives)."""
    return eval_jet2(node, point).value


def _pow_jet(base: Jet2, c: float, node) -> Jet2:
    v = base.value
    if c == 0.0:
        return Jet2.constant(1.0)
    if c == 1.0:
        return base
    integer = float(c).is_integer()
    if not integer and v <= 0:
        raise EvalDomainError("non-integer power of a non-positive base", to_text(node))
    if integer and c < 0 and v == 0:
        raise EvalDomainError("negative power of zero", to_text(node))
    if integer and c == 2.0:
        return base.compose(v * v, 2.0 * v, 2.0)
    return base.compose(v**c, c * v ** (c - 1), c * (c - 1) * v ** (c - 2))


def eval_jet2(node, point) -> Jet2:
    """Forward-mode value, gradient and Hessian of the expression at ``point``."""
    p = np.asarray(point, dtype=float)
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point components must be finite, got {point!r}")
    return _ev(node, p)


def _ev(node, p) -> Jet2:
    if isinstance(node, Num):
        return Jet2.constant(node.value)
    if isinstance(node, Var):
        return Jet2.variable(node.index, p[node.index])
    if isinstance(node, Const):
        return Jet2.constant(CONSTANTS[node.name])
    if isinstance(node, Neg):
        return -_ev(node.arg, p)
    if isinstance(node, Call):
        arg = _ev(node.arg, p)
        try:
            f0, f1, f2 = FUNCTIONS[node.func](arg.value)
        except (ValueError, ZeroDivisionError, OverflowError):
            raise EvalDomainError(f"{node.func} evaluated outside its domain", to_text(node)) from None
        return arg.compose(f0, f1, f2)
    op = node.op
    if op == "^":
        c = _ev(node.right, p).value
        try:
            return _pow_jet(_ev(node.left, p), c, node)
        except (OverflowError, ZeroDivisionError):
            raise EvalDomainError("power overflows", to_text(node)) from None
    left = _ev(node.left, p)
    right = _ev(node.right, p)
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if right.value == 0.0:
        raise EvalDomainError("division by zero", to_text(node))
    with np.errstate(all="ignore"):
        out = left / right
    if not (np.all(np.isfinite(out.gradient)) and np.all(np.isfinite(out.hessian))):
        raise EvalDomainError("derivatives of the quotient overflow", to_text(node))
    return out


_FLOAT_FUNCS = {name: (lambda f: (lambda v: f(v)[0]))(fn) for name, fn in FUNCTIONS.items()}
_FLOAT_FUNCS.update(
    sin=math.sin, cos=math.cos, atan=math.atan, sinh=math.sinh, cosh=math.cosh,
    tanh=math.tanh, exp=math.exp,
)


def compile_value(node):
    """Closure computing the plain float value; same domain errors as eval_jet2."""
    if isinstance(node, Num):
        v = float(node.value)
        return lambda p: v
    if isinstance(node, Var):
        i = node.index
        return lambda p: float(p[i])
    if isinstance(node, Const):
        v = CONSTANTS[node.name]
        return lambda p: v
    if isinstance(node, Neg):
        a = compile_value(node.arg)
        return lambda p: -a(p)
    if isinstance(node, Call):
        a = compile_value(node.arg)
        fn = _FLOAT_FUNCS[node.func]
        text = to_text(node)

        def call(p):
            try:
                return fn(a(p))
            except (ValueError, ZeroDivisionError, OverflowError):
                raise EvalDomainError(f"{node.func} evaluated outside its domain", text) from None

        return call
    left, right = compile_value(node.left), compile_value(node.right)
    op = node.op
    if op == "+":
        return lambda p: left(p) + right(p)
    if op == "-":
        return lambda p: left(p) - right(p)
    if op == "*":
        return lambda p: left(p) * right(p)
    text = to_text(node)
    if op == "/":
        def div(p):
            d = right(p)
            if d == 0.0:
                raise EvalDomainError("division by zero", text)
            return left(p) / d

        return div

    def power(p):
        base, c = left(p), right(p)
        if not float(c).is_integer() and base <= 0:
            raise EvalDomainError("non-integer power of a non-positive base", text)
        if c < 0 and base == 0:
            raise EvalDomainError("negative power of zero", text)
        return base**c

    return power
