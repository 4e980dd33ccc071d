"""A small expression language for entering metrics, potentials and observables.

Grammar (standard precedence, ``^`` binds tightest and is right-associative):

    expr   := term (("+"|"-") term)*
    term   := factor (("*"|"/") factor)*
    factor := "-" factor | atom ("^" integer)?
    atom   := number | "i" | symbol | "(" expr ")" | func "(" expr ")"
    func   := "exp" | "log" | "sqrt" | "sin" | "cos"

Numbers are integers or finite decimals, both converted exactly.  Symbols are
resolved against a chart at elaboration time, not at parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .jets import Jet, jet_elem
from .rational import CRat

FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos")


class ParseError(ValueError):
    def __init__(self, message, pos):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class ImagUnit:
    pass


@dataclass(frozen=True)
class Sym:
    name: str


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str          # one of + - * /
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Apply:
    func: str
    arg: object


# -- tokenizer -------------------------------------------------------------

_TOKEN = re.compile(r"(?:(\d+\.\d+|\d+)|([A-Za-z_][A-Za-z_0-9]*)|([-+*/^()]))")


def _tokenize(src):
    tokens = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", pos)
        num, sym, op = m.groups()
        if num is not None:
            tokens.append(("num", num, pos))
        elif sym is not None:
            tokens.append(("sym", sym, pos))
        else:
            tokens.append(("op", op, pos))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.k = 0

    def peek(self):
        return self.tokens[self.k] if self.k < len(self.tokens) else (None, None, len(self.src))

    def next(self):
        tok = self.peek()
        self.k += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.next()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self):
        e = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            raise ParseError(f"trailing input {val!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.next()
                e = BinOp(val, e, self.term())
            else:
                return e

    def term(self):
        e = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.next()
                e = BinOp(val, e, self.factor())
            else:
                return e

    def factor(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.next()
            return Neg(self.factor())
        a = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.next()
            kind, val, pos = self.next()
            if kind != "num" or "." in val:
                raise ParseError("exponent must be an integer literal", pos)
            return Pow(a, int(val))
        return a

    def atom(self):
        kind, val, pos = self.next()
        if kind == "num":
            if "." in val:
                whole, frac = val.split(".")
                value = Fraction(int(whole + frac), 10 ** len(frac))
            else:
                value = Fraction(int(val))
            return Num(value)
        if kind == "sym":
            if val == "i":
                return ImagUnit()
            if val in FUNCTIONS:
                self.expect_op("(")
                arg = self.expr()
                self.expect_op(")")
                return Apply(val, arg)
            return Sym(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        raise ParseError(f"unexpected token {val!r}", pos)


def parse(src):
    """Parse source text into an AST."""
    return _Parser(src).parse()


# -- pretty printing -------------------------------------------------------

def pretty(ast):
    """Render an AST so that reparsing gives a structurally identical tree."""
    if isinstance(ast, Num):
        v = ast.value
        return str(v.numerator) if v.denominator == 1 else \
            f"({v.numerator}/{v.denominator})"
    if isinstance(ast, ImagUnit):
        return "i"
    if isinstance(ast, Sym):
        return ast.name
    if isinstance(ast, Neg):
        return f"(-{pretty(ast.arg)})"
    if isinstance(ast, BinOp):
        return f"({pretty(ast.left)}{ast.op}{pretty(ast.right)})"
    if isinstance(ast, Pow):
        return f"({pretty(ast.base)}^{ast.exponent})"
    if isinstance(ast, Apply):
        return f"{ast.func}({pretty(ast.arg)})"
    raise TypeError(f"not an AST node: {ast!r}")


# -- elaboration -----------------------------------------------------------

def elaborate(ast, chart, order):
    """Expand an AST into a Jet about the chart's base point."""
    if isinstance(ast, Num):
        return Jet.constant(chart, CRat(ast.value), order)
    if isinstance(ast, ImagUnit):
        return Jet.constant(chart, CRat(0, 1), order)
    if isinstance(ast, Sym):
        return Jet.variable(chart, ast.name, order)
    if isinstance(ast, Neg):
        return -elaborate(ast.arg, chart, order)
    if isinstance(ast, BinOp):
        a = elaborate(ast.left, chart, order)
        b = elaborate(ast.right, chart, order)
        if ast.op == "+":
            return a + b
        if ast.op == "-":
            return a - b
        if ast.op == "*":
            return a * b
        return a / b
    if isinstance(ast, Pow):
        return elaborate(ast.base, chart, order) ** ast.exponent
    if isinstance(ast, Apply):
        return jet_elem(ast.func, elaborate(ast.arg, chart, order))
    raise TypeError(f"not an AST node: {ast!r}")


def jet_of(src, chart, order):
    """Parse and elaborate in one step."""
    return elaborate(parse(src), chart, order)
