"""Arithmetic expression language used in problem definition files.

The grammar covers exactly what coefficient formulas need: decimal
literals, the variables ``t`` and ``s``, the operators ``+ - * / ^``,
unary minus, parentheses, and the functions ``cos``, ``sin``, ``exp``,
``ln``, ``sqrt``, ``abs``.

Precedence, loosest to tightest: ``+ -``, then ``* /``, then unary
minus, then ``^`` (right-associative, so ``2^3^2`` is ``2^(3^2)`` and
``-t^2`` is ``-(t^2)``).

Evaluation is plain IEEE double precision and works elementwise on
numpy arrays as well as on scalars.  Leaving the real domain (division
by zero, ``ln`` of a non-positive value, a fractional power of a
non-positive base) raises :class:`EvalError` instead of producing NaN
or infinity.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

__all__ = ["Expr", "ParseError", "EvalError", "parse", "evaluate"]


class ParseError(ValueError):
    """Syntax or name error, carrying the 0-based offset where it occurred."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class EvalError(ArithmeticError):
    """Evaluation left the real domain or a referenced variable is missing."""


class Expr:
    """Base class for expression nodes.  Nodes are immutable and shareable."""

    def eval(self, t, s=None):
        raise NotImplementedError

    def variables(self) -> frozenset[str]:
        raise NotImplementedError


@dataclass(frozen=True)
class Num(Expr):
    value: float

    def eval(self, t, s=None):
        return self.value

    def variables(self):
        return frozenset()


@dataclass(frozen=True)
class Var(Expr):
    name: str  # "t" or "s"

    def eval(self, t, s=None):
        if self.name == "t":
            return t
        if s is None:
            raise EvalError("expression references 's' but no value was supplied")
        return s

    def variables(self):
        return frozenset((self.name,))


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr

    def eval(self, t, s=None):
        return -self.operand.eval(t, s)

    def variables(self):
        return self.operand.variables()


@dataclass(frozen=True)
class BinOp(Expr):
    op: str  # one of "+ - * / ^"
    left: Expr
    right: Expr

    def eval(self, t, s=None):
        a = self.left.eval(t, s)
        b = self.right.eval(t, s)
        op = self.op
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if np.any(np.asarray(b) == 0.0):
                raise EvalError("division by zero")
            return a / b
        return _power(a, b)

    def variables(self):
        return self.left.variables() | self.right.variables()


@dataclass(frozen=True)
class Call(Expr):
    func: str
    arg: Expr

    def eval(self, t, s=None):
        x = self.arg.eval(t, s)
        f = self.func
        if f == "cos":
            return np.cos(x)
        if f == "sin":
            return np.sin(x)
        if f == "exp":
            return np.exp(x)
        if f == "ln":
            if np.any(np.asarray(x) <= 0.0):
                raise EvalError("ln of a non-positive value")
            return np.log(x)
        if f == "sqrt":
            if np.any(np.asarray(x) < 0.0):
                raise EvalError("sqrt of a negative value")
            return np.sqrt(x)
        return np.abs(x)  # "abs"

    def variables(self):
        return self.arg.variables()


_FUNCTIONS = ("cos", "sin", "exp", "ln", "sqrt", "abs")


def _power(a, b):
    b_arr = np.asarray(b)
    if np.all(b_arr == np.floor(b_arr)):
        # Integer exponents keep the usual semantics (negative bases allowed).
        if np.any((np.asarray(a) == 0.0) & (b_arr < 0)):
            raise EvalError("zero raised to a negative power")
        return np.power(a, b)
    if np.any(np.asarray(a) <= 0.0):
        raise EvalError("fractional power of a non-positive base")
    return np.exp(b * np.log(a))


_NUMBER_RE = re.compile(r"(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?")
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    tokens: list[tuple[str, object, int]] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c.isdigit() or c == ".":
            m = _NUMBER_RE.match(text, i)
            if m is None:
                raise ParseError("malformed number", i)
            tokens.append(("num", float(m.group()), i))
            i = m.end()
            continue
        if c.isalpha() or c == "_":
            m = _NAME_RE.match(text, i)
            if m is None:  # a Unicode letter outside the ASCII grammar
                raise ParseError(f"unexpected character {c!r}", i)
            tokens.append(("name", m.group(), i))
            i = m.end()
            continue
        if c in "+-*/^()":
            tokens.append((c, c, i))
            i += 1
            continue
        raise ParseError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.k = 0

    @property
    def current(self):
        return self.tokens[self.k]

    def advance(self):
        tok = self.tokens[self.k]
        self.k += 1
        return tok

    def expression(self) -> Expr:
        left = self.term()
        while self.current[0] in ("+", "-"):
            op = self.advance()[0]
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.current[0] in ("*", "/"):
            op = self.advance()[0]
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.current[0] == "-":
            self.advance()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.current[0] == "^":
            self.advance()
            # Exponent parsed at unary level: right-associative, may be signed.
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, value, pos = self.advance()
        if kind == "num":
            return Num(value)
        if kind == "name":
            if self.current[0] == "(":
                if value not in _FUNCTIONS:
                    raise ParseError(f"unknown function {value!r}", pos)
                self.advance()
                arg = self.expression()
                if self.current[0] != ")":
                    raise ParseError("expected ')'", self.current[2])
                self.advance()
                return Call(value, arg)
            if value in ("t", "s"):
                return Var(value)
            raise ParseError(f"unknown identifier {value!r}", pos)
        if kind == "(":
            inner = self.expression()
            if self.current[0] != ")":
                raise ParseError("expected ')'", self.current[2])
            self.advance()
            return inner
        raise ParseError("expected a number, variable, function, or '('", pos)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises :class:`ParseError` (with position) on malformed input or
    unknown names; never aborts in any other way.
    """
    p = _Parser(_tokenize(text))
    expr = p.expression()
    kind, _, pos = p.current
    if kind != "end":
        raise ParseError(f"unexpected {kind!r}", pos)
    return expr


def evaluate(expr: Expr, t, s=None):
    """Evaluate ``expr`` at ``t`` (and ``s`` for two-variable expressions).

    Accepts scalars or numpy arrays; arrays broadcast elementwise.
    Raises :class:`EvalError` when the result is not finite or a domain
    rule is violated.
    """
    with np.errstate(all="ignore"):  # non-finite values raise below instead
        out = expr.eval(t, s)
    if not np.all(np.isfinite(out)):
        raise EvalError("expression evaluated to a non-finite value")
    return out
