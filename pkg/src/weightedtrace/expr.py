"""Parsers for the CLI operand mini-language.

Loop expressions are sums of monomials such as ``z e1``, ``2 z^-2 e3`` or
``-0.5i z^3 e2``; a bare label is the constant loop.

Operator expressions are sums of products of factors::

    Id  D  |D|  |D+P|  eps  Delta  z      (powers via ^, e.g. |D+P|^-1, z^-2, D^2)
    ad(<loop expression>)                 (adjoint action; block size = algebra dim)
    numbers, parentheses, * (optional), + and -
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .lie_core import LieAlgebraData, LoopElement, ad_operator
from .mode_ops import (BlockBandOperator, abs_dirac_power, compose, dirac, epsilon_sign, identity,
                       laplacian_weight, shift_operator, weight_power)


class ParseError(ValueError):
    """Raised for malformed operand expressions."""


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?[ij]?|[ij](?![A-Za-z0-9_]))
  | (?P<absdp>\|D\+P\|)
  | (?P<absd>\|D\|)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str


def tokenize(text: str) -> list[Token]:
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r} at position {pos} in {text!r}")
        pos = m.end()
        if m.lastgroup != "ws":
            out.append(Token(m.lastgroup, m.group()))
    return out


def _number(text: str) -> complex:
    if text in ("i", "j"):
        return 1j
    if text[-1] in "ij":
        return complex(float(text[:-1]) * 1j)
    return complex(float(text))


class _Stream:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.pos = 0

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> Token:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of expression {self.text!r}")
        self.pos += 1
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.kind == "op" and tok.text == text:
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> None:
        if not self.accept(text):
            raise ParseError(f"expected {text!r} in {self.text!r}")

    def done(self) -> bool:
        return self.pos >= len(self.tokens)


def _signed_exponent(st: _Stream) -> float:
    sign = -1.0 if st.accept("-") else 1.0
    st.accept("+")
    tok = st.take()
    if tok.kind != "num" or tok.text[-1] in "ij":
        raise ParseError(f"exponent must be a real number in {st.text!r}")
    value = float(tok.text)
    if st.accept("/"):
        den = st.take()
        if den.kind != "num":
            raise ParseError(f"bad fraction in exponent of {st.text!r}")
        value /= float(den.text)
    return sign * value


# ---------------------------------------------------------------------------
# Loops


def _loop_terms(st: _Stream, algebra: LieAlgebraData, stop_at_paren: bool) -> LoopElement:
    total = LoopElement.zero(algebra)
    sign = 1.0
    if st.accept("-"):
        sign = -1.0
    else:
        st.accept("+")
    while True:
        coef = complex(sign)
        mode = 0
        label = None
        while True:
            tok = st.peek()
            if tok is None or (tok.kind == "op" and tok.text in "+-)"):
                break
            st.take()
            if tok.kind == "num":
                coef *= _number(tok.text)
            elif tok.kind == "op" and tok.text == "*":
                continue
            elif tok.kind == "op" and tok.text == "(":
                inner = _scalar_sum(st)
                st.expect(")")
                coef *= inner
            elif tok.kind == "name" and tok.text == "z":
                mode += int(round(_signed_exponent(st))) if st.accept("^") else 1
            elif tok.kind == "name":
                if tok.text not in algebra.basis_labels:
                    raise ParseError(f"unknown basis label {tok.text!r} (known: {', '.join(algebra.basis_labels)})")
                if label is not None:
                    raise ParseError(f"two basis labels in one monomial of {st.text!r}")
                label = tok.text
            else:
                raise ParseError(f"unexpected token {tok.text!r} in loop expression {st.text!r}")
        if label is None:
            raise ParseError(f"monomial without a basis label in {st.text!r}")
        total = total + LoopElement.monomial(algebra, mode, label, coef)
        tok = st.peek()
        if tok is None or (tok.text == ")" and stop_at_paren):
            return total
        if tok.text == ")":
            raise ParseError(f"unbalanced ')' in {st.text!r}")
        sign = -1.0 if st.take().text == "-" else 1.0


def _scalar_sum(st: _Stream) -> complex:
    total = 0j
    sign = -1.0 if st.accept("-") else 1.0
    while True:
        tok = st.take()
        if tok.kind != "num":
            raise ParseError(f"expected a number in a parenthesized coefficient of {st.text!r}")
        total += sign * _number(tok.text)
        if st.accept("+"):
            sign = 1.0
        elif st.accept("-"):
            sign = -1.0
        else:
            return total


def parse_loop(text: str, algebra: LieAlgebraData) -> LoopElement:
    """Parse ``"z e1 + 2 z^-2 e3"`` into a :class:`LoopElement`."""
    st = _Stream(text)
    if st.done():
        raise ParseError("empty loop expression")
    loop = _loop_terms(st, algebra, stop_at_paren=False)
    if not st.done():
        raise ParseError(f"trailing input in {text!r}")
    return loop


# ---------------------------------------------------------------------------
# Operators


class _OperatorParser:
    def __init__(self, text: str, algebra: LieAlgebraData | None, d: int):
        self.st = _Stream(text)
        self.algebra = algebra
        self.d = d

    def parse(self) -> BlockBandOperator:
        if self.st.done():
            raise ParseError("empty operator expression")
        op = self.sum()
        if not self.st.done():
            raise ParseError(f"trailing input at token {self.st.peek().text!r} in {self.st.text!r}")
        return op

    def sum(self) -> BlockBandOperator:
        sign = -1.0 if self.st.accept("-") else 1.0
        self.st.accept("+")
        total = self.product(sign)
        while True:
            if self.st.accept("+"):
                total = total + self.product(1.0)
            elif self.st.accept("-"):
                total = total + self.product(-1.0)
            else:
                return total

    def product(self, sign: float) -> BlockBandOperator:
        coef = complex(sign)
        op = None
        while True:
            tok = self.st.peek()
            if tok is None or (tok.kind == "op" and tok.text in "+-)"):
                break
            if tok.kind == "op" and tok.text == "*":
                self.st.take()
                continue
            factor = self.factor()
            if isinstance(factor, complex):
                coef *= factor
            else:
                op = factor if op is None else compose(op, factor)
        if op is None:
            if coef == sign:
                raise ParseError(f"empty product in {self.st.text!r}")
            op = identity(self.d)
        return coef * op if coef != 1 else op

    def factor(self):
        st = self.st
        tok = st.take()
        if tok.kind == "num":
            return _number(tok.text)
        if tok.kind == "op" and tok.text == "(":
            inner = self.sum()
            st.expect(")")
            return self._power(inner)
        if tok.kind in ("absd", "absdp"):
            beta = _signed_exponent(st) if st.accept("^") else 1.0
            return abs_dirac_power(beta, self.d)
        if tok.kind == "name":
            name = tok.text
            if name == "Id":
                return identity(self.d)
            if name == "D":
                return self._power(dirac(self.d))
            if name == "eps":
                return self._power(epsilon_sign(self.d))
            if name == "Delta":
                power = _signed_exponent(st) if st.accept("^") else 1.0
                return weight_power(laplacian_weight(), power, self.d)
            if name == "z":
                k = int(round(_signed_exponent(st))) if st.accept("^") else 1
                return shift_operator(k, self.d)
            if name == "ad":
                if self.algebra is None:
                    raise ParseError("ad(...) needs an algebra")
                st.expect("(")
                loop = _loop_terms(st, self.algebra, stop_at_paren=True)
                st.expect(")")
                return ad_operator(loop)
        raise ParseError(f"unsupported operand {tok.text!r} in {st.text!r}")

    def _power(self, op: BlockBandOperator) -> BlockBandOperator:
        if not self.st.accept("^"):
            return op
        m = _signed_exponent(self.st)
        if m != int(m) or m < 0:
            raise ParseError("only non-negative integer powers of D, eps and parenthesized operators")
        out = identity(op.d)
        for _ in range(int(m)):
            out = compose(out, op)
        return out


def parse_operator(text: str, algebra: LieAlgebraData | None = None, d: int | None = None) -> BlockBandOperator:
    """Parse an operator expression; the block size is the algebra dimension when ``ad`` appears."""
    if d is None:
        d = algebra.dim if (algebra is not None and "ad" in text) else 1
    return _OperatorParser(text, algebra, d).parse()
