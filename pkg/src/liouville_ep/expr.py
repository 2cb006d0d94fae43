"""Parsing and printing of exact polynomial expressions.

Grammar (whitespace-insensitive, no implicit multiplication):

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | '/') factor)*
    factor := base ('^' uint)?
    base   := number | 'i' | identifier | '(' expr ')' | '-' base

Numbers are unsigned integer or decimal literals; decimals are parsed as exact
rationals (0.25 -> 1/4).  'i' is the imaginary unit and is reserved.  Division
is only allowed by subexpressions that reduce to nonzero constants.  Syntax
errors carry the byte offset of the offending token.

The printer emits a canonical form (graded-lexicographic term order, highest
first) that parses back to the identical polynomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import GR_ONE, GaussRational, MultiPoly


class ParseError(ValueError):
    """Syntax or semantic error in an expression string."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


# -- tokenizer ---------------------------------------------------------------

_PUNCT = set("+-*/^()")


@dataclass(frozen=True)
class _Token:
    kind: str  # 'num' | 'ident' | one of + - * / ^ ( ) | 'end'
    text: str
    offset: int


def _tokenize(src: str) -> list[_Token]:
    tokens: list[_Token] = []
    pos = 0
    n = len(src)
    while pos < n:
        ch = src[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token(ch, ch, pos))
            pos += 1
            continue
        if ch.isdigit():
            start = pos
            while pos < n and src[pos].isdigit():
                pos += 1
            if pos < n and src[pos] == ".":
                pos += 1
                if pos >= n or not src[pos].isdigit():
                    raise ParseError("digit expected after decimal point", pos)
                while pos < n and src[pos].isdigit():
                    pos += 1
            tokens.append(_Token("num", src[start:pos], start))
            continue
        if ch.isalpha() or ch == "_":
            start = pos
            while pos < n and (src[pos].isalnum() or src[pos] == "_"):
                pos += 1
            tokens.append(_Token("ident", src[start:pos], start))
            continue
        raise ParseError(f"unexpected character {ch!r}", pos)
    tokens.append(_Token("end", "", n))
    return tokens


# -- AST ---------------------------------------------------------------------

# Nodes are plain tuples: ('num', Fraction), ('i',), ('var', name, offset),
# ('neg', node), ('add'|'sub'|'mul', a, b), ('div', a, b, offset),
# ('pow', node, k).


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected token {tok.text!r}", tok.offset)
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind in ("+", "-"):
            op = self.advance()
            rhs = self.term()
            node = ("add" if op.kind == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek().kind in ("*", "/"):
            op = self.advance()
            rhs = self.factor()
            if op.kind == "*":
                node = ("mul", node, rhs)
            else:
                node = ("div", node, rhs, op.offset)
        return node

    def factor(self):
        node = self.base()
        if self.peek().kind == "^":
            caret = self.advance()
            tok = self.peek()
            if tok.kind != "num" or "." in tok.text:
                raise ParseError("exponent must be an unsigned integer", tok.offset)
            self.advance()
            node = ("pow", node, int(tok.text))
        return node

    def base(self):
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return ("num", Fraction(tok.text))
        if tok.kind == "ident":
            self.advance()
            if tok.text == "i":
                return ("i",)
            return ("var", tok.text, tok.offset)
        if tok.kind == "(":
            self.advance()
            node = self.expr()
            closing = self.peek()
            if closing.kind != ")":
                raise ParseError("expected ')'", closing.offset)
            self.advance()
            return node
        if tok.kind == "-":
            self.advance()
            return ("neg", self.base())
        raise ParseError(f"unexpected token {tok.text!r}", tok.offset)


def parse_ast(source: str):
    """Parse to the raw AST without binding variables."""
    return _Parser(_tokenize(source)).parse()


def _fold(node, variables: tuple[str, ...]) -> MultiPoly:
    kind = node[0]
    if kind == "num":
        return MultiPoly.constant(variables, Fraction(node[1]))
    if kind == "i":
        return MultiPoly.constant(variables, GaussRational.of(0, 1))
    if kind == "var":
        name, offset = node[1], node[2]
        if name not in variables:
            raise ParseError(f"unknown variable {name!r}", offset)
        return MultiPoly.variable(variables, name)
    if kind == "neg":
        return -_fold(node[1], variables)
    if kind == "add":
        return _fold(node[1], variables) + _fold(node[2], variables)
    if kind == "sub":
        return _fold(node[1], variables) - _fold(node[2], variables)
    if kind == "mul":
        return _fold(node[1], variables) * _fold(node[2], variables)
    if kind == "div":
        lhs = _fold(node[1], variables)
        rhs = _fold(node[2], variables)
        offset = node[3]
        if not rhs.is_constant():
            raise ParseError("division only by constant subexpressions", offset)
        if rhs.is_zero():
            raise ParseError("division by zero", offset)
        return lhs.scale(GR_ONE / rhs.constant_value())
    if kind == "pow":
        return _fold(node[1], variables) ** node[2]
    raise AssertionError(f"unknown node {kind}")


def parse_expression(source: str, variables: Sequence[str]) -> MultiPoly:
    """Parse an expression string into an exact polynomial.

    `variables` is the full ambient variable list; identifiers outside it are
    rejected ('i' is always the imaginary unit and cannot be a variable name).
    """
    vs = tuple(variables)
    if "i" in vs:
        raise ValueError("'i' is reserved for the imaginary unit")
    return _fold(parse_ast(source), vs)


# -- printer -----------------------------------------------------------------


def _format_rational(q: Fraction) -> str:
    return str(q)  # Fraction prints as 'p/q' or 'p'


def _coeff_prefix(c: GaussRational) -> str:
    """Render a coefficient as a standalone grammar factor (or factor chain)."""
    if c.im == 0:
        return _format_rational(c.re)
    if c.re == 0:
        if c.im == 1:
            return "i"
        if c.im == -1:
            return "-i"
        return f"{_format_rational(c.im)}*i"
    im = c.im
    sign = "+" if im > 0 else "-"
    im_part = "i" if abs(im) == 1 else f"{_format_rational(abs(im))}*i"
    return f"({_format_rational(c.re)}{sign}{im_part})"


def _monomial_factors(expo: tuple[int, ...], variables: tuple[str, ...]) -> list[str]:
    out = []
    for name, k in zip(variables, expo):
        if k == 1:
            out.append(name)
        elif k > 1:
            out.append(f"{name}^{k}")
    return out


def format_poly(p: MultiPoly) -> str:
    """Canonical text form; graded-lex order, highest term first.

    Round-trip guarantee: parse_expression(format_poly(p), p.vars) == p.
    """
    if p.is_zero():
        return "0"
    items = sorted(p.terms.items(), key=lambda kv: (sum(kv[0]), kv[0]), reverse=True)
    pieces: list[str] = []
    for position, (expo, coeff) in enumerate(items):
        factors = _monomial_factors(expo, p.vars)
        # sign handling: pull a leading real sign out so terms join with +/-
        negated = False
        if coeff.im == 0 and coeff.re < 0:
            coeff = -coeff
            negated = True
        elif coeff.re == 0 and coeff.im < 0:
            coeff = -coeff
            negated = True
        if not factors:
            body = _coeff_prefix(coeff)
        elif coeff == GR_ONE:
            body = "*".join(factors)
        else:
            body = "*".join([_coeff_prefix(coeff)] + factors)
        if position == 0:
            if negated:
                # '-x^2' would parse as (-x)^2; give the leading negative an
                # explicit coefficient whenever the first factor carries '^'
                if coeff == GR_ONE and factors and "^" in factors[0]:
                    body = "*".join(["1"] + factors)
                pieces.append("-" + body)
            else:
                pieces.append(body)
        else:
            pieces.append((" - " if negated else " + ") + body)
    return "".join(pieces)
