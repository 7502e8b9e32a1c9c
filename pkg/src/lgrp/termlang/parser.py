"""Recursive-descent parser for the term grammar.

    term  := join
    join  := meet { "\\/" meet }
    meet  := prod { "/\\" prod }
    prod  := unary { "*" unary }
    unary := atom [ "^-1" ]
    atom  := "e" | ident | "(" term ")" | ("abs" | "pos" | "neg") "(" term ")"

All binary operators associate to the left.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import StructuralError
from .terms import Abs, Inv, Join, Meet, Mul, Neg, Pos, Term, Unit, Var

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<join>\\/)
  | (?P<meet>/\\)
  | (?P<star>\*)
  | (?P<inv>\^\s*-\s*1)
  | (?P<lpar>\()
  | (?P<rpar>\))
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_FUNCS = {"abs": Abs, "pos": Pos, "neg": Neg}
_SHOW = {"join": "'\\/'", "meet": "'/\\'", "star": "'*'", "inv": "'^-1'", "lpar": "'('",
         "rpar": "')'", "ident": "identifier", "e": "'e'", "func": "abs(/pos(/neg(", "eof": "end of input"}
_ATOM_START = ("e", "ident", "lpar", "func")


class ParseError(StructuralError):
    def __init__(self, message, line, column, expected):
        self.line, self.column = line, column
        self.expected = tuple(sorted(expected))
        shown = ", ".join(_SHOW.get(k, k) for k in self.expected)
        super().__init__(f"line {line}, column {column}: {message}; expected one of: {shown}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


def tokenize(src: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            line, col = _where(src, pos)
            raise ParseError(f"unexpected character {src[pos]!r}", line, col, _ATOM_START)
        kind = m.lastgroup
        if kind != "ws":
            text = m.group()
            if kind == "ident" and text == "e":
                kind = "e"
            elif kind == "ident" and text in _FUNCS and re.compile(r"\s*\(").match(src, m.end()):
                kind = "func"
            out.append(Token(kind, text, pos))
        pos = m.end()
    out.append(Token("eof", "", len(src)))
    return out


def _where(src, offset):
    line = src.count("\n", 0, offset) + 1
    col = offset - (src.rfind("\n", 0, offset) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, src):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, expected):
        line, col = _where(self.src, self.tok.offset)
        found = repr(self.tok.text) if self.tok.kind != "eof" else "end of input"
        raise ParseError(f"unexpected {found}", line, col, expected)

    def accept(self, kind):
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def expect(self, kind, also=()):
        if not self.accept(kind):
            self.error((kind, *also))

    def term(self) -> Term:
        left = self.meet()
        while self.accept("join"):
            left = Join(left, self.meet())
        return left

    def meet(self):
        left = self.prod()
        while self.accept("meet"):
            left = Meet(left, self.prod())
        return left

    def prod(self):
        left = self.unary()
        while self.accept("star"):
            left = Mul(left, self.unary())
        return left

    def unary(self):
        a = self.atom()
        return Inv(a) if self.accept("inv") else a

    def atom(self):
        tok = self.tok
        if self.accept("e"):
            return Unit()
        if self.accept("ident"):
            return Var(tok.text)
        if self.accept("func"):
            self.expect("lpar")
            inner = self.term()
            self.expect("rpar", ("join", "meet", "star", "inv"))
            return _FUNCS[tok.text](inner)
        if self.accept("lpar"):
            inner = self.term()
            self.expect("rpar", ("join", "meet", "star", "inv"))
            return inner
        self.error(_ATOM_START)


def parse_term(src: str) -> Term:
    p = _Parser(src)
    t = p.term()
    if p.tok.kind != "eof":
        # whatever may legally follow a complete term at this point
        follow = ["join", "meet", "star", "eof"]
        if p.i > 0 and p.toks[p.i - 1].kind != "inv":
            follow.append("inv")
        p.error(follow)
    return t
