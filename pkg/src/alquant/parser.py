"""Recursive-descent parser for prenex QPTL.

Grammar (lowest precedence first)::

    qptl    := ("exists" | "forall") IDENT "." qptl | iff
    iff     := implies ("<->" implies)*
    implies := or ("->" implies)?
    or      := and ("|" and)*
    and     := binary ("&" binary)*
    binary  := unary (("U" | "W" | "R") binary)?
    unary   := ("!" | "X" | "G" | "F") unary | atom
    atom    := "true" | "false" | IDENT | "(" iff ")"

Identifiers match ``[a-z][a-zA-Z0-9_]*``.  Upper-case letters are temporal
operators, so ``GFa`` reads as ``G F a``.  ``#`` starts a comment.  With
``quoted=True`` (the automaton text format) ``"..."`` is also an identifier.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import List, Optional

from . import ltl
from .errors import NonPrenexError, ParseError

KEYWORDS = {"exists", "forall", "true", "false"}
_UNARY = {"!": ltl.Not, "X": ltl.Next, "G": ltl.Globally, "F": ltl.Finally}
_TEMPORAL_BINARY = {"U": ltl.Until, "W": ltl.WeakUntil, "R": ltl.Release}
_SYMBOLS = ["<->", "->", "&&", "||", "&", "|", "!", "(", ")", "."]

IDENT_RE = re.compile(r"[a-z][a-zA-Z0-9_]*")


@dataclass
class Token:
    kind: str  # ident, op, kw, eof
    value: str
    line: int
    col: int


def tokenize(text: str, quoted: bool = False) -> List[Token]:
    tokens = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if c.isspace():
            i += 1
            col += 1
            continue
        if c == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if quoted and c == '"':
            j = text.find('"', i + 1)
            if j < 0:
                raise ParseError("unterminated quoted name", line, col)
            tokens.append(Token("ident", text[i + 1:j], line, col))
            col += j + 1 - i
            i = j + 1
            continue
        m = IDENT_RE.match(text, i)
        if m:
            word = m.group(0)
            kind = "kw" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, line, col))
            col += len(word)
            i = m.end()
            continue
        if c in _UNARY or c in _TEMPORAL_BINARY:
            tokens.append(Token("op", c, line, col))
            i += 1
            col += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                value = {"&&": "&", "||": "|"}.get(sym, sym)
                tokens.append(Token("op", value, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: List[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def at(self, value: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.value == value

    def expect(self, value: str) -> Token:
        if not self.at(value):
            self.error(f"expected {value!r}")
        return self.advance()

    def error(self, message: str):
        t = self.tok
        found = "end of input" if t.kind == "eof" else repr(t.value)
        raise ParseError(f"{message}, found {found}", t.line, t.col)

    def qptl(self) -> ltl.QptlFormula:
        prefix = []
        while self.at("exists") or self.at("forall"):
            q = self.advance()
            if self.tok.kind != "ident":
                self.error("expected a variable after the quantifier")
            name = self.advance()
            if name.value in [v for _, v in prefix]:
                raise ParseError(f"variable {name.value} is bound twice", name.line, name.col)
            prefix.append((q.value, name.value))
            self.expect(".")
        body = self.iff()
        if self.tok.kind != "eof":
            self.error("unexpected trailing input")
        return ltl.QptlFormula(tuple(prefix), body)

    def iff(self):
        left = self.implies()
        while self.at("<->"):
            t = self.advance()
            left = ltl.Iff(left, self.implies(), span=(t.line, t.col))
        return left

    def implies(self):
        left = self.or_()
        if self.at("->"):
            t = self.advance()
            return ltl.Implies(left, self.implies(), span=(t.line, t.col))
        return left

    def or_(self):
        left = self.and_()
        while self.at("|"):
            t = self.advance()
            left = ltl.Or(left, self.and_(), span=(t.line, t.col))
        return left

    def and_(self):
        left = self.binary()
        while self.at("&"):
            t = self.advance()
            left = ltl.And(left, self.binary(), span=(t.line, t.col))
        return left

    def binary(self):
        left = self.unary()
        if self.tok.kind == "op" and self.tok.value in _TEMPORAL_BINARY:
            t = self.advance()
            return _TEMPORAL_BINARY[t.value](left, self.binary(), span=(t.line, t.col))
        return left

    def unary(self):
        t = self.tok
        if t.kind == "op" and t.value in _UNARY:
            self.advance()
            return _UNARY[t.value](self.unary(), span=(t.line, t.col))
        return self.atom()

    def atom(self):
        t = self.tok
        if t.kind == "kw" and t.value in ("exists", "forall"):
            raise NonPrenexError("quantifiers are only allowed in the leading prefix", t.line, t.col)
        if t.kind == "kw":
            self.advance()
            return ltl.Const(t.value == "true", span=(t.line, t.col))
        if t.kind == "ident":
            self.advance()
            return ltl.Var(t.value, span=(t.line, t.col))
        if self.at("("):
            self.advance()
            inner = self.iff()
            self.expect(")")
            return inner
        self.error("expected a formula")


def parse_qptl(text: str) -> ltl.QptlFormula:
    return _Parser(tokenize(text)).qptl()


def parse_ltl(text: str, quoted: bool = False) -> ltl.Formula:
    p = _Parser(tokenize(text, quoted))
    f = p.iff()
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return f
