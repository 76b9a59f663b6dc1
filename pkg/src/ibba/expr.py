"""Closed-form univariate expressions: tokenizer, recursive-descent parser, evaluator.

Grammar (``x`` is the only free variable)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("-" | "+") unary | power
    power  := atom (("^" | "**") unary)?
    atom   := NUMBER | "x" | "pi" | "e" | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Exponentiation binds tighter than unary minus and is right associative, so
``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``.  Implicit multiplication
(``4x``) is a syntax error.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np


class ExpressionError(Exception):
    pass


class ParseError(ExpressionError):
    """Syntax or name error at a byte offset of the source text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class EvaluationError(ExpressionError):
    """Raised when an expression has no finite real value at a point."""

    def __init__(self, message: str, x=None):
        if x is not None:
            message = f"{message} at x={x!r}"
        super().__init__(message)
        self.x = x


# ---------------------------------------------------------------- AST nodes


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class NamedConst:
    name: str


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple


Node = Union[Const, NamedConst, Var, Neg, BinOp, Call]

CONSTANTS = {"pi": math.pi, "e": math.e}

# name -> (min arity, max arity); None means unbounded
FUNCTIONS = {
    "sin": (1, 1),
    "cos": (1, 1),
    "tan": (1, 1),
    "exp": (1, 1),
    "log": (1, 1),
    "abs": (1, 1),
    "sqrt": (1, 1),
    "min": (2, None),
    "max": (2, None),
}


# ---------------------------------------------------------------- tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # "number", "name", "op", "end"
    text: str
    offset: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(Token(kind, m.group(), pos))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


# ---------------------------------------------------------------- parser


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def expect(self, op: str) -> Token:
        if not self.at_op(op):
            found = self.tok.text or "end of input"
            raise ParseError(f"expected {op!r}, found {found!r}", self.tok.offset)
        return self.advance()

    def parse(self) -> Node:
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(f"unexpected token {self.tok.text!r}", self.tok.offset)
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Node:
        if self.at_op("-"):
            self.advance()
            return Neg(self.unary())
        if self.at_op("+"):
            self.advance()
            return self.unary()
        return self.power()

    def power(self) -> Node:
        base = self.atom()
        if self.at_op("^", "**"):
            self.advance()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Node:
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            # implicit multiplication such as "4x" or "2(x+1)"
            if self.tok.kind == "name" or self.at_op("("):
                raise ParseError("implicit multiplication is not allowed", self.tok.offset)
            return Const(float(tok.text))
        if tok.kind == "name":
            self.advance()
            name = tok.text
            if self.at_op("("):
                return self.call(name, tok.offset)
            if name == "x":
                return Var()
            if name in CONSTANTS:
                return NamedConst(name)
            if name in FUNCTIONS:
                raise ParseError(f"function {name!r} requires arguments", tok.offset)
            raise ParseError(f"unknown identifier {name!r}", tok.offset)
        if self.at_op("("):
            self.advance()
            node = self.expr()
            self.expect(")")
            return node
        found = tok.text or "end of input"
        raise ParseError(f"unexpected {found!r}", tok.offset)

    def call(self, name: str, offset: int) -> Node:
        if name not in FUNCTIONS:
            raise ParseError(f"unknown function {name!r}", offset)
        self.expect("(")
        args = [self.expr()]
        while self.at_op(","):
            self.advance()
            args.append(self.expr())
        self.expect(")")
        lo, hi = FUNCTIONS[name]
        if len(args) < lo or (hi is not None and len(args) > hi):
            want = str(lo) if lo == hi else f"at least {lo}"
            raise ParseError(f"{name}() takes {want} argument(s), got {len(args)}", offset)
        return Call(name, tuple(args))


def parse(text: str) -> "Expression":
    """Parse ``text`` into an :class:`Expression`."""
    if not text or not text.strip():
        raise ParseError("empty expression", 0)
    return Expression(_Parser(text).parse(), text.strip())


# ---------------------------------------------------------------- evaluation


def _pow(base: float, exponent: float) -> float:
    if base == 0.0 and exponent < 0:
        raise ZeroDivisionError("zero to a negative power")
    return math.pow(base, exponent)


def _log(v: float) -> float:
    if v <= 0.0:
        raise ValueError(f"log of non-positive value {v!r}")
    return math.log(v)


def _sqrt(v: float) -> float:
    if v < 0.0:
        raise ValueError(f"sqrt of negative value {v!r}")
    return math.sqrt(v)


_SCALAR_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "exp": math.exp,
    "log": _log,
    "abs": abs,
    "sqrt": _sqrt,
    "min": min,
    "max": max,
}

_ARRAY_FUNCS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "exp": np.exp,
    "log": np.log,
    "abs": np.abs,
    "sqrt": np.sqrt,
}


def _eval(node: Node, x: float) -> float:
    if isinstance(node, Var):
        return x
    if isinstance(node, Const):
        return node.value
    if isinstance(node, BinOp):
        lhs = _eval(node.left, x)
        rhs = _eval(node.right, x)
        op = node.op
        if op == "+":
            return lhs + rhs
        if op == "-":
            return lhs - rhs
        if op == "*":
            return lhs * rhs
        if op == "/":
            return lhs / rhs
        return _pow(lhs, rhs)
    if isinstance(node, Call):
        return _SCALAR_FUNCS[node.func](*(_eval(a, x) for a in node.args))
    if isinstance(node, Neg):
        return -_eval(node.operand, x)
    return CONSTANTS[node.name]


def _eval_array(node: Node, x: np.ndarray) -> np.ndarray:
    if isinstance(node, Var):
        return x
    if isinstance(node, Const):
        return np.full_like(x, node.value)
    if isinstance(node, NamedConst):
        return np.full_like(x, CONSTANTS[node.name])
    if isinstance(node, Neg):
        return -_eval_array(node.operand, x)
    if isinstance(node, BinOp):
        lhs = _eval_array(node.left, x)
        rhs = _eval_array(node.right, x)
        if node.op == "+":
            return lhs + rhs
        if node.op == "-":
            return lhs - rhs
        if node.op == "*":
            return lhs * rhs
        if node.op == "/":
            return lhs / rhs
        return np.power(lhs, rhs)
    args = [_eval_array(a, x) for a in node.args]
    if node.func == "min":
        return np.minimum.reduce(args)
    if node.func == "max":
        return np.maximum.reduce(args)
    return _ARRAY_FUNCS[node.func](args[0])


def evaluate(node: Node, x: float) -> float:
    """Evaluate ``node`` at ``x`` in double precision.

    Raises:
        EvaluationError: on a domain error, division by zero, overflow, or a
            non-finite result.
    """
    try:
        value = _eval(node, x)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise EvaluationError(str(exc) or type(exc).__name__, x) from None
    if not math.isfinite(value):
        raise EvaluationError(f"non-finite value {value!r}", x)
    return value


def evaluate_array(node: Node, xs) -> np.ndarray:
    """Vectorized evaluation over a float array; same error contract as :func:`evaluate`."""
    xs = np.asarray(xs, dtype=float)
    with np.errstate(all="ignore"):
        values = _eval_array(node, xs)
    bad = ~np.isfinite(values)
    if bad.any():
        raise EvaluationError("no finite real value", float(xs[np.argmax(bad)]))
    return values


# ---------------------------------------------------------------- serialization


def serialize(node: Node) -> str:
    """Fully parenthesized text that parses back to an identical tree."""
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Const):
        return repr(node.value)
    if isinstance(node, NamedConst):
        return node.name
    if isinstance(node, Neg):
        return f"(-{serialize(node.operand)})"
    if isinstance(node, BinOp):
        return f"({serialize(node.left)} {node.op} {serialize(node.right)})"
    return f"{node.func}({', '.join(serialize(a) for a in node.args)})"


def count_nodes(node: Node) -> int:
    if isinstance(node, Neg):
        return 1 + count_nodes(node.operand)
    if isinstance(node, BinOp):
        return 1 + count_nodes(node.left) + count_nodes(node.right)
    if isinstance(node, Call):
        return 1 + sum(count_nodes(a) for a in node.args)
    return 1


class Expression:
    """A parsed expression together with its source text.

    Instances are immutable and callable: ``expr(x)`` is ``evaluate(expr.root, x)``.
    Equality compares trees, not source text.
    """

    __slots__ = ("root", "text")

    def __init__(self, root: Node, text: str | None = None):
        object.__setattr__(self, "root", root)
        object.__setattr__(self, "text", text if text is not None else serialize(root))

    def __setattr__(self, name, value):
        raise AttributeError("Expression is immutable")

    def __reduce__(self):
        return (Expression, (self.root, self.text))

    def __call__(self, x: float) -> float:
        return evaluate(self.root, x)

    def evaluate_array(self, xs) -> np.ndarray:
        return evaluate_array(self.root, xs)

    def serialize(self) -> str:
        return serialize(self.root)

    def __eq__(self, other):
        if not isinstance(other, Expression):
            return NotImplemented
        return self.root == other.root

    def __hash__(self):
        return hash(self.root)

    def __repr__(self):
        return f"Expression({self.text!r})"
