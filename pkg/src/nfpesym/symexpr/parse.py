"""Precedence-climbing parser for the expression grammar (see README)."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .expr import (
    Expr,
    Fn,
    Jet,
    Sym,
    add,
    div,
    exp,
    mul,
    neg,
    num,
    power,
    sub,
)

DEFAULT_FUNCTIONS = ("xi", "tau", "eta")


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, NAME, OP, LP, RP, END
    text: str
    pos: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+\.\d*|\.\d+|\d+)
  | (?P<name>[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z0-9]+)?)
  | (?P<op>\*\*|[-+*/^])
  | (?P<lp>\()
  | (?P<rp>\))
    """,
    re.VERBOSE,
)


def tokenize(text: str) -> list[Token]:
    pos = 0
    out: list[Token] = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unknown token {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tok = m.group()
            if kind == "op" and tok == "**":
                tok = "^"
            out.append(Token(kind.upper(), tok, pos))
        pos = m.end()
    out.append(Token("END", "", len(text)))
    return out


def _jet_from_suffix(suffix: str, pos: int) -> Jet:
    if not suffix or set(suffix) - {"x", "t"}:
        raise ParseError(f"bad jet variable u_{suffix}", pos)
    return Jet(suffix.count("x"), suffix.count("t"))


def parse_atom(name: str, functions: Iterable[str] = DEFAULT_FUNCTIONS, pos: int = 0) -> Expr:
    """Interpret a bare identifier: symbol, jet variable or function atom."""
    head, _, suffix = name.partition("_")
    if head == "u":
        return Jet(0, 0) if not suffix else _jet_from_suffix(suffix, pos)
    if head in functions:
        if suffix and set(suffix) - {"x", "t", "u"}:
            raise ParseError(f"bad derivative index in {name}", pos)
        return Fn(head, suffix.count("x"), suffix.count("t"), suffix.count("u"))
    if suffix:
        raise ParseError(f"unknown token {name!r}", pos)
    return Sym(name)


class _Parser:
    # binary operators: precedence, right-associative
    BINARY = {"+": (1, False), "-": (1, False), "*": (2, False), "/": (2, False), "^": (4, True)}
    UNARY_PREC = 3

    def __init__(self, text: str, functions):
        self.toks = tokenize(text)
        self.i = 0
        self.functions = tuple(functions)

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, kind: str) -> Token:
        tok = self.take()
        if tok.kind != kind:
            what = tok.text or "end of input"
            raise ParseError(f"expected {kind.lower()}, found {what!r}", tok.pos)
        return tok

    def parse(self) -> Expr:
        e = self.expression(0)
        tok = self.peek()
        if tok.kind != "END":
            raise ParseError(f"unexpected {tok.text!r}", tok.pos)
        return e

    def expression(self, min_prec: int) -> Expr:
        lhs = self.prefix()
        while True:
            tok = self.peek()
            if tok.kind != "OP":
                return lhs
            prec, right = self.BINARY[tok.text]
            if prec < min_prec:
                return lhs
            self.take()
            rhs = self.expression(prec if right else prec + 1)
            lhs = self.apply(tok, lhs, rhs)

    @staticmethod
    def apply(tok: Token, a: Expr, b: Expr) -> Expr:
        try:
            if tok.text == "+":
                return add(a, b)
            if tok.text == "-":
                return sub(a, b)
            if tok.text == "*":
                return mul(a, b)
            if tok.text == "/":
                return div(a, b)
            return power(a, b)
        except ZeroDivisionError as exc:
            raise ParseError(str(exc), tok.pos) from None

    def prefix(self) -> Expr:
        tok = self.take()
        if tok.kind == "OP" and tok.text in "+-":
            operand = self.expression(self.UNARY_PREC)
            return neg(operand) if tok.text == "-" else operand
        if tok.kind == "NUM":
            return num(Fraction(tok.text))
        if tok.kind == "LP":
            e = self.expression(0)
            self.expect("RP")
            return e
        if tok.kind == "NAME":
            if tok.text == "exp" and self.peek().kind == "LP":
                self.take()
                arg = self.expression(0)
                self.expect("RP")
                return exp(arg)
            return parse_atom(tok.text, self.functions, tok.pos)
        what = tok.text or "end of input"
        raise ParseError(f"unexpected {what!r}", tok.pos)


def parse(text: str, functions: Iterable[str] = DEFAULT_FUNCTIONS) -> Expr:
    """Parse infix text into a canonical expression.

    ``functions`` names the identifiers read as unknown functions of
    (x, t, u); their derivatives are written ``xi_xu`` and so on.
    """
    return _Parser(text, functions).parse()
