"""Polynomial expressions in one variable x with rational coefficients.

Grammar (whitespace is ignored, ``*`` may be omitted)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/")? unary)*
    unary  := ("+" | "-") unary | power
    power  := atom (("^" | "**") unary)?
    atom   := INT | "x" | "(" expr ")" | ("binom" | "C") "(" expr "," expr ")"

Division is allowed only by a nonzero constant and exponents must be
nonnegative integer constants, so every accepted string denotes a polynomial.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .core import RationalPoly, binom_poly
from .errors import ParseError

_TOKEN = re.compile(r"\s*(?:(\d+)|(\*\*|[-+*/^(),])|([A-Za-z_]\w*))")
_NORMALIZE = str.maketrans({"−": "-", "·": "*", "×": "*"})
_BINOM_NAMES = ("binom", "C")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            bad = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[bad]!r} at {bad}")
        num, op, name = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            tokens.append(("int", num, start))
        elif op is not None:
            tokens.append(("op", op, start))
        else:
            tokens.append(("name", name, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, p: int):
        self.p = p
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, val, pos = self.take()
        if val != value:
            shown = val or "end of input"
            raise ParseError(f"expected {value!r} at {pos}, found {shown!r}")

    def parse(self) -> RationalPoly:
        f = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected {val!r} at {pos}")
        return f

    def expr(self) -> RationalPoly:
        f = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            g = self.term()
            f = f + g if op == "+" else f - g
        return f

    def _starts_factor(self) -> bool:
        kind, val, _ = self.peek()
        return kind in ("int", "name") or val == "("

    def term(self) -> RationalPoly:
        f = self.unary()
        while True:
            val = self.peek()[1]
            if val == "*":
                self.take()
                f = f * self.unary()
            elif val == "/":
                pos = self.take()[2]
                g = self.unary()
                if not g.is_constant() or g.coeff(0) == 0:
                    raise ParseError(f"division at {pos} is not by a nonzero constant")
                f = f / g.coeff(0)
            elif self._starts_factor():
                f = f * self.unary()
            else:
                return f

    def unary(self) -> RationalPoly:
        val = self.peek()[1]
        if val == "-":
            self.take()
            return -self.unary()
        if val == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self) -> RationalPoly:
        base = self.atom()
        if self.peek()[1] in ("^", "**"):
            pos = self.take()[2]
            return base ** self._nonneg_int(self.unary(), pos, "exponent")
        return base

    def _nonneg_int(self, g: RationalPoly, pos: int, what: str) -> int:
        c = g.coeff(0)
        if not g.is_constant() or c.denominator != 1 or c < 0:
            raise ParseError(f"{what} at {pos} must be a nonnegative integer")
        return int(c)

    def atom(self) -> RationalPoly:
        kind, val, pos = self.take()
        if kind == "int":
            return RationalPoly.constant(self.p, Fraction(int(val)))
        if val == "(":
            f = self.expr()
            self.expect(")")
            return f
        if kind == "name":
            if val == "x":
                return RationalPoly.x(self.p)
            if val in _BINOM_NAMES:
                self.expect("(")
                g = self.expr()
                self.expect(",")
                npos = self.peek()[2]
                n = self._nonneg_int(self.expr(), npos, "binomial index")
                self.expect(")")
                return _compose(binom_poly(n, self.p), g)
            raise ParseError(f"unknown name {val!r} at {pos}")
        raise ParseError(f"unexpected {val or 'end of input'!r} at {pos}")


def _compose(f: RationalPoly, g: RationalPoly) -> RationalPoly:
    out = RationalPoly.constant(f.prime, 0)
    for c in reversed(f.coeffs):
        out = out * g + c
    return out


def parse_poly(text: str, p: int) -> RationalPoly:
    """Parse ``text`` into a polynomial over Q regarded as a map of Z_p."""
    text = text.translate(_NORMALIZE)
    if not text.strip():
        raise ParseError("empty expression")
    return _Parser(text, p).parse()
