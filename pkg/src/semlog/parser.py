"""Parser and printer for the concrete formula syntax.

Grammar::

    formula := "true" | "false" | atom | "~" formula
             | formula "&" formula | formula "|" formula
             | ("E"|"A"|"E!"|"A!") var "." formula | "(" formula ")"
    atom    := NAME "(" var ("," var)* ")" | var "=" var | var "!=" var

`&` binds tighter than `|`; quantifiers extend maximally to the right.
Negation may appear on any subformula and is compiled away to NNF.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import SemlogError
from .formulas import (
    FALSE,
    TRUE,
    And,
    Atom,
    Bottom,
    Eq,
    Exists,
    Forall,
    Formula,
    Or,
    Top,
    negate,
)


class ParseError(SemlogError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" at line {line}, column {column}" if line is not None else ""
        super().__init__(message + where)


_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<neq>!=)
      | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
      | (?P<sym>[()&|~=.,!])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str):
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group(0)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            if self.tokens:
                last = self.tokens[-1]
                raise ParseError("unexpected end of input", last.line, last.column)
            raise ParseError("unexpected end of input", 1, 1)
        self.pos += 1
        return tok

    def expect(self, text):
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text!r}", tok.line, tok.column)
        return tok

    def at_quantifier(self):
        tok = self.peek()
        if tok is None or tok.kind != "name" or tok.text not in ("E", "A"):
            return False
        nxt = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
        # "E" / "A" start a quantifier when followed by "!"+var or a var
        if nxt is None:
            return False
        if nxt.text == "!":
            return True
        return nxt.kind == "name" and nxt.text not in ("E", "A")

    def parse_formula(self) -> Formula:
        if self.at_quantifier():
            return self.parse_quantified()
        return self.parse_or()

    def parse_quantified(self) -> Formula:
        tok = self.next()
        distinct = False
        if self.peek() is not None and self.peek().text == "!":
            self.next()
            distinct = True
        var_tok = self.next()
        if var_tok.kind != "name":
            raise ParseError("expected a variable", var_tok.line, var_tok.column)
        self.expect(".")
        body = self.parse_formula()
        cls = Exists if tok.text == "E" else Forall
        return cls(var_tok.text, body, distinct)

    def parse_or(self) -> Formula:
        left = self.parse_and()
        while self.peek() is not None and self.peek().text == "|":
            self.next()
            if self.at_quantifier():
                return Or(left, self.parse_quantified())
            left = Or(left, self.parse_and())
        return left

    def parse_and(self) -> Formula:
        left = self.parse_unary()
        while self.peek() is not None and self.peek().text == "&":
            self.next()
            if self.at_quantifier():
                return And(left, self.parse_quantified())
            left = And(left, self.parse_unary())
        return left

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok is None:
            self.next()  # raises with the last token's position
        if tok.text == "~":
            self.next()
            return negate(self.parse_unary())
        if tok.text == "(":
            self.next()
            inner = self.parse_formula()
            self.expect(")")
            return inner
        if self.at_quantifier():
            return self.parse_quantified()
        if tok.kind == "name":
            self.next()
            if tok.text == "true":
                return TRUE
            if tok.text == "false":
                return FALSE
            nxt = self.peek()
            if nxt is not None and nxt.text == "(":
                return self.parse_atom_args(tok)
            if nxt is not None and nxt.text in ("=", "!="):
                op = self.next()
                rhs = self.next()
                if rhs.kind != "name":
                    raise ParseError("expected a variable", rhs.line, rhs.column)
                return Eq(tok.text, rhs.text, positive=(op.text == "="))
            raise ParseError(
                f"bare variable {tok.text!r} is not a formula", tok.line, tok.column
            )
        raise ParseError(f"unexpected token {tok.text!r}", tok.line, tok.column)

    def parse_atom_args(self, name_tok) -> Formula:
        self.expect("(")
        args = []
        while True:
            arg = self.next()
            if arg.kind != "name":
                raise ParseError("expected a variable", arg.line, arg.column)
            args.append(arg.text)
            tok = self.next()
            if tok.text == ")":
                break
            if tok.text != ",":
                raise ParseError(f"expected ',' or ')', found {tok.text!r}", tok.line, tok.column)
        return Atom(name_tok.text, tuple(args))


def parse(text: str, vocabulary=None) -> Formula:
    """Parse a formula; with a vocabulary, check relation arities."""
    parser = _Parser(text)
    f = parser.parse_formula()
    tok = parser.peek()
    if tok is not None:
        raise ParseError(f"trailing input {tok.text!r}", tok.line, tok.column)
    if vocabulary is not None:
        vocabulary.check_formula(f)
    return f


_PREC_OR, _PREC_AND, _PREC_UNARY = 1, 2, 3


def render(f: Formula) -> str:
    """Print in the concrete syntax; parse(render(f)) == f for variable-only
    formulae."""

    def go(g: Formula, prec: int) -> str:
        if isinstance(g, Top):
            return "true"
        if isinstance(g, Bottom):
            return "false"
        if isinstance(g, Atom):
            body = f"{g.rel}({', '.join(str(a) for a in g.args)})"
            return body if g.positive else f"~{body}"
        if isinstance(g, Eq):
            op = "=" if g.positive else "!="
            return f"{g.left} {op} {g.right}"
        if isinstance(g, Or):
            s = f"{go(g.left, _PREC_OR)} | {go(g.right, _PREC_OR + 1)}"
            return f"({s})" if prec > _PREC_OR else s
        if isinstance(g, And):
            s = f"{go(g.left, _PREC_AND)} & {go(g.right, _PREC_AND + 1)}"
            return f"({s})" if prec > _PREC_AND else s
        if isinstance(g, (Exists, Forall)):
            q = "E" if isinstance(g, Exists) else "A"
            if g.distinct:
                q += "!"
            s = f"{q} {g.var}. {go(g.body, 0)}"
            return f"({s})" if prec > 0 else s
        raise SemlogError(f"not a formula: {g!r}")

    return go(f, 0)
