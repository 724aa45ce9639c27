"""Scalar field expressions in u and v.

Grammar, loosest binding first::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?          # right-associative, binds tighter than "-"
    atom   := number | name | name "(" expr ")" | "(" expr ")"

so ``-u^2`` is ``-(u^2)`` and ``2^-u^2`` is ``2^(-(u^2))``.  Offsets in
errors are byte offsets into the UTF-8 source.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from . import jets as jm
from .errors import EvaluationError, ExpressionSyntaxError
from .fields import ScalarJetField
from .jets import Jet

VARIABLES = ("u", "v")
CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = {
    "sqrt": jm.sqrt, "exp": jm.exp, "ln": jm.log, "sin": jm.sin, "cos": jm.cos,
    "tan": jm.tan, "atan": jm.arctan, "sinh": jm.sinh, "cosh": jm.cosh,
    "tanh": jm.tanh, "atanh": jm.arctanh, "abs": jm.absolute,
}

# printing precedence
_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5


@dataclass(frozen=True)
class Num:
    value: float
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Name:
    """A variable (u, v) or a named constant (pi, e)."""

    name: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    operand: object
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Call:
    func: str
    arg: object
    offset: int = field(default=0, compare=False)


# tokenizer -------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)


@dataclass
class _Tok:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionSyntaxError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        if m.lastgroup != "ws":
            toks.append(_Tok(m.lastgroup, m.group(), _byte_offset(text, pos)))
        pos = m.end()
    toks.append(_Tok("end", "", _byte_offset(text, len(text))))
    return toks


def _byte_offset(text: str, i: int) -> int:
    return len(text[:i].encode("utf-8"))


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> _Tok:
        if self.tok.text != text or self.tok.kind == "end":
            raise ExpressionSyntaxError(f"expected {text!r}, found {self._found()}", self.tok.offset)
        return self.take()

    def _found(self) -> str:
        return "end of input" if self.tok.kind == "end" else repr(self.tok.text)

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise ExpressionSyntaxError(f"unexpected {self._found()}", self.tok.offset)
        return node

    def expr(self):
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            t = self.take()
            node = BinOp(t.text, node, self.term(), t.offset)
        return node

    def term(self):
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            t = self.take()
            node = BinOp(t.text, node, self.unary(), t.offset)
        return node

    def unary(self):
        if self.tok.kind == "op" and self.tok.text == "-":
            t = self.take()
            return Neg(self.unary(), t.offset)
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            t = self.take()
            return BinOp("^", base, self.unary(), t.offset)
        return base

    def atom(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return Num(float(t.text), t.offset)
        if t.kind == "name":
            self.take()
            if t.text in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Call(t.text, arg, t.offset)
            if t.text in VARIABLES or t.text in CONSTANTS:
                return Name(t.text, t.offset)
            raise ExpressionSyntaxError(f"unknown identifier {t.text!r}", t.offset)
        if t.kind == "op" and t.text == "(":
            self.take()
            node = self.expr()
            self.expect(")")
            return node
        raise ExpressionSyntaxError(f"unexpected {self._found()}", t.offset)


def parse_field_expression(text: str):
    """Parse ``text`` into an AST; raises :class:`ExpressionSyntaxError`."""
    return _Parser(text).parse()


# printer ---------------------------------------------------------------

def _fmt_number(x: float) -> str:
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _prec(node) -> int:
    if isinstance(node, BinOp):
        return {"+": _ADD, "-": _ADD, "*": _MUL, "/": _MUL, "^": _POW}[node.op]
    if isinstance(node, Neg):
        return _NEG
    return _ATOM


def _wrap(node, min_prec: int) -> str:
    s = to_string(node)
    return f"({s})" if _prec(node) < min_prec else s


def to_string(node) -> str:
    """Canonical text: spaces around + and -, none elsewhere, minimal parentheses."""
    if isinstance(node, Num):
        return _fmt_number(node.value)
    if isinstance(node, Name):
        return node.name
    if isinstance(node, Call):
        return f"{node.func}({to_string(node.arg)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.operand, _NEG)
    if node.op in "+-":
        return f"{_wrap(node.left, _ADD)} {node.op} {_wrap(node.right, _MUL)}"
    if node.op in "*/":
        return f"{_wrap(node.left, _MUL)}{node.op}{_wrap(node.right, _NEG)}"
    return f"{_wrap(node.left, _ATOM)}^{_wrap(node.right, _NEG)}"


# evaluation --------------------------------------------------------------

def _val(x):
    return np.asarray(jm.value(x))


def _differentiated(x) -> bool:
    return isinstance(x, Jet) and x.order > 0


def _check(cond, message, offset):
    if np.any(cond):
        raise EvaluationError(message, offset)


def evaluate(node, u, v):
    """Evaluate on jets or arrays; domain violations raise :class:`EvaluationError`."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Name):
        return {"u": u, "v": v}.get(node.name, CONSTANTS.get(node.name))
    if isinstance(node, Neg):
        return -evaluate(node.operand, u, v)
    if isinstance(node, Call):
        x = evaluate(node.arg, u, v)
        xv = _val(x)
        f = node.func
        strict = _differentiated(x)
        if f == "ln":
            _check(xv <= 0, "ln of a non-positive value", node.offset)
        elif f == "sqrt":
            _check(xv <= 0 if strict else xv < 0, "sqrt outside its domain", node.offset)
        elif f == "atanh":
            _check(np.abs(xv) >= 1, "atanh argument outside (-1, 1)", node.offset)
        elif f == "tan":
            _check(np.isclose(np.cos(xv), 0, atol=1e-15), "tan at a pole", node.offset)
        elif f == "abs" and strict:
            _check(xv == 0, "abs is not differentiable at 0", node.offset)
        return FUNCTIONS[f](x)
    a, b = evaluate(node.left, u, v), evaluate(node.right, u, v)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        _check(_val(b) == 0, "division by zero", node.offset)
        return a / b
    # power
    bv = _val(b)
    if isinstance(b, Jet) or not np.all(np.asarray(bv).round() == bv):
        _check(_val(a) <= 0 if (isinstance(b, Jet) or _differentiated(a)) else _val(a) < 0,
               "non-integer power of a non-positive base", node.offset)
    if isinstance(b, Jet):
        return a ** b
    if not isinstance(a, Jet):
        if np.all(np.asarray(bv) == np.round(bv)) and np.any(bv < 0):
            _check(_val(a) == 0, "division by zero", node.offset)
        return np.power(np.asarray(a, dtype=float), bv)
    if np.ndim(bv) == 0:
        if float(bv) < 0:
            _check(_val(a) == 0, "division by zero", node.offset)
        return a ** float(bv)
    return jm.exp(b * jm.log(a))


def variables_used(node) -> set:
    if isinstance(node, Name):
        return {node.name} & set(VARIABLES)
    if isinstance(node, (Num,)):
        return set()
    if isinstance(node, (Neg, Call)):
        return variables_used(node.operand if isinstance(node, Neg) else node.arg)
    return variables_used(node.left) | variables_used(node.right)


@dataclass(frozen=True)
class FieldExpression:
    """Parsed expression with its canonical text."""

    text: str
    ast: object

    @classmethod
    def parse(cls, text: str) -> "FieldExpression":
        return cls(text, parse_field_expression(text))

    @property
    def canonical(self) -> str:
        return to_string(self.ast)

    @property
    def is_constant(self) -> bool:
        return not variables_used(self.ast)

    def __call__(self, u, v):
        return evaluate(self.ast, u, v)

    def values(self, u, v) -> np.ndarray:
        u, v = np.broadcast_arrays(np.asarray(u, float), np.asarray(v, float))
        return np.broadcast_to(np.asarray(evaluate(self.ast, u, v), dtype=float), u.shape).copy()

    def field(self) -> ScalarJetField:
        return ScalarJetField.from_function(lambda u, v: evaluate(self.ast, u, v), self.canonical)

    def __str__(self):
        return self.canonical
