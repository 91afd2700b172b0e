"""Closed-form expressions in x1..xn with exact first and second derivatives.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := atom ('^' power)?
    power  := ['-'] number ('^' power)?
    atom   := number | var | func '(' expr ')' | '(' expr ')' | '-' factor

``^`` binds tighter than unary minus, so ``-x1^2`` is ``-(x1^2)``; exponents
are numeric literals and associate to the right.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ExpressionSyntaxError, UnknownIdentifier, VariableOutOfRange

FUNCTIONS = ("exp", "ln", "sin", "cos", "sinh", "cosh")


class Expr:
    """Base class of AST nodes."""

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True, eq=True)
class Num(Expr):
    value: float


@dataclass(frozen=True, eq=True)
class Var(Expr):
    index: int  # 0-based


@dataclass(frozen=True, eq=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, eq=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True)
class Pow(Expr):
    base: Expr
    exponent: float


@dataclass(frozen=True, eq=True)
class Call(Expr):
    func: str
    arg: Expr


_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, n_vars):
        self.text = text
        self.n_vars = n_vars
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            what = "end of input" if kind == "end" else repr(val)
            raise ExpressionSyntaxError(f"expected {op!r}, found {what}", pos)

    def parse(self):
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {val!r}", pos)
        return e

    def expr(self):
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            left = BinOp(op, left, self.term())
        return left

    def term(self):
        left = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            left = BinOp(op, left, self.factor())
        return left

    def factor(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Pow(base, self.power())
        return base

    def power(self):
        sign = 1.0
        if self.peek()[0] == "op" and self.peek()[1] == "-":
            self.take()
            sign = -1.0
        kind, val, pos = self.take()
        if kind != "num":
            what = "end of input" if kind == "end" else repr(val)
            raise ExpressionSyntaxError(f"exponent must be a number, found {what}", pos)
        value = sign * float(val)
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            value = value ** self.power()
        return value

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return Num(float(val))
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "op" and val == "-":
            return Neg(self.factor())
        if kind == "name":
            if val in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            m = re.fullmatch(r"x([1-9]\d*)", val)
            if m:
                idx = int(m.group(1))
                if idx > self.n_vars:
                    raise VariableOutOfRange(f"{val} used in a {self.n_vars}-variable chart")
                return Var(idx - 1)
            raise UnknownIdentifier(f"unknown identifier {val!r} at offset {pos}")
        what = "end of input" if kind == "end" else repr(val)
        raise ExpressionSyntaxError(f"unexpected {what}", pos)


def parse(text, n_vars):
    """Parse ``text`` into an AST over variables ``x1 .. x{n_vars}``."""
    return _Parser(text, n_vars).parse()


def _fmt_num(v):
    return repr(float(v))


def to_string(e):
    """Fully parenthesised text that parses back to the same tree."""
    if isinstance(e, Num):
        return _fmt_num(e.value) if e.value >= 0 else f"(-{_fmt_num(-e.value)})"
    if isinstance(e, Var):
        return f"x{e.index + 1}"
    if isinstance(e, Neg):
        return f"(-{to_string(e.arg)})"
    if isinstance(e, BinOp):
        return f"({to_string(e.left)} {e.op} {to_string(e.right)})"
    if isinstance(e, Pow):
        exp = _fmt_num(e.exponent)
        return f"({to_string(e.base)}^{exp})"
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


def max_var_index(e):
    """Largest 0-based variable index used, or -1 for constants."""
    if isinstance(e, Var):
        return e.index
    if isinstance(e, Num):
        return -1
    if isinstance(e, (Neg, Call)):
        return max_var_index(e.arg)
    if isinstance(e, Pow):
        return max_var_index(e.base)
    return max(max_var_index(e.left), max_var_index(e.right))


def shift_vars(e, offset):
    """Rename ``x_i`` to ``x_{i+offset}``."""
    if isinstance(e, Var):
        return Var(e.index + offset)
    if isinstance(e, Num):
        return e
    if isinstance(e, Neg):
        return Neg(shift_vars(e.arg, offset))
    if isinstance(e, Call):
        return Call(e.func, shift_vars(e.arg, offset))
    if isinstance(e, Pow):
        return Pow(shift_vars(e.base, offset), e.exponent)
    return BinOp(e.op, shift_vars(e.left, offset), shift_vars(e.right, offset))


def is_zero(e):
    return isinstance(e, Num) and e.value == 0.0


@dataclass(frozen=True, eq=False)
class Jet2:
    """Value, gradient and Hessian of a scalar function at a point."""

    value: float
    grad: np.ndarray
    hess: np.ndarray

    @classmethod
    def constant(cls, value, n):
        return cls(float(value), np.zeros(n), np.zeros((n, n)))

    @classmethod
    def variable(cls, value, index, n):
        g = np.zeros(n)
        g[index] = 1.0
        return cls(float(value), g, np.zeros((n, n)))

    def chain(self, f0, f1, f2):
        """Compose with a scalar function whose value and first two derivatives are given."""
        return Jet2(f0, f1 * self.grad, f1 * self.hess + f2 * np.outer(self.grad, self.grad))

    def __add__(self, other):
        return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)

    def __sub__(self, other):
        return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __mul__(self, other):
        cross = np.outer(self.grad, other.grad)
        return Jet2(
            self.value * other.value,
            self.value * other.grad + other.value * self.grad,
            self.value * other.hess + other.value * self.hess + cross + cross.T,
        )


def _reciprocal(j, node):
    b = j.value
    if b == 0.0:
        raise DomainError("division by zero", to_string(node))
    return j.chain(1.0 / b, -1.0 / b**2, 2.0 / b**3)


def _power(j, p, node):
    b = j.value
    integral = float(p).is_integer()
    if b < 0 and not integral:
        raise DomainError(f"negative base raised to non-integer power {p}", to_string(node))
    if b == 0.0 and (p < 0 or (not integral and p < 2)):
        raise DomainError(f"zero base raised to power {p}", to_string(node))
    if p == 0:
        return Jet2.constant(1.0, len(j.grad))
    f0 = b**p
    f1 = p * b ** (p - 1) if p != 1 else 1.0
    f2 = p * (p - 1) * b ** (p - 2) if p not in (1, 2) else (0.0 if p == 1 else 2.0)
    return j.chain(f0, f1, f2)


def _call(func, j, node):
    x = j.value
    if func == "exp":
        e = math.exp(x)
        return j.chain(e, e, e)
    if func == "ln":
        if x <= 0.0:
            raise DomainError(f"ln of non-positive value {x:.6g}", to_string(node))
        return j.chain(math.log(x), 1.0 / x, -1.0 / x**2)
    if func == "sin":
        s, c = math.sin(x), math.cos(x)
        return j.chain(s, c, -s)
    if func == "cos":
        s, c = math.sin(x), math.cos(x)
        return j.chain(c, -s, -c)
    if func == "sinh":
        s, c = math.sinh(x), math.cosh(x)
        return j.chain(s, c, s)
    if func == "cosh":
        s, c = math.sinh(x), math.cosh(x)
        return j.chain(c, s, c)
    raise UnknownIdentifier(func)


def eval_jet2(e, point):
    """Evaluate ``e`` with its gradient and Hessian at ``point``."""
    point = np.asarray(point, dtype=float)
    n = len(point)
    if max_var_index(e) >= n:
        raise VariableOutOfRange(f"expression uses x{max_var_index(e) + 1} but the point has {n} coordinates")
    return _jet(e, point, n)


def _jet(e, x, n):
    if isinstance(e, Num):
        return Jet2.constant(e.value, n)
    if isinstance(e, Var):
        return Jet2.variable(x[e.index], e.index, n)
    if isinstance(e, Neg):
        return -_jet(e.arg, x, n)
    if isinstance(e, BinOp):
        a = _jet(e.left, x, n)
        b = _jet(e.right, x, n)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        return a * _reciprocal(b, e.right)
    if isinstance(e, Pow):
        return _power(_jet(e.base, x, n), e.exponent, e)
    if isinstance(e, Call):
        return _call(e.func, _jet(e.arg, x, n), e)
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e, point):
    """Plain value of ``e`` at ``point``."""
    return _value(e, np.asarray(point, dtype=float))


def _value(e, x):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return float(x[e.index])
    if isinstance(e, Neg):
        return -_value(e.arg, x)
    if isinstance(e, BinOp):
        a, b = _value(e.left, x), _value(e.right, x)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if b == 0.0:
            raise DomainError("division by zero", to_string(e.right))
        return a / b
    if isinstance(e, Pow):
        return _power(Jet2.constant(_value(e.base, x), 0), e.exponent, e).value
    if isinstance(e, Call):
        return _call(e.func, Jet2.constant(_value(e.arg, x), 0), e).value
    raise TypeError(f"not an expression node: {e!r}")
