"""Proposition expressions over named projectors.

Grammar, loosest to tightest binding: ``=>`` (right associative), ``|``,
``&``, ``!``; parentheses group.  Leaves are identifiers naming projectors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError


@dataclass(frozen=True)
class Name:
    ident: str


@dataclass(frozen=True)
class Not:
    operand: "PropExpr"


@dataclass(frozen=True)
class And:
    left: "PropExpr"
    right: "PropExpr"


@dataclass(frozen=True)
class Or:
    left: "PropExpr"
    right: "PropExpr"


@dataclass(frozen=True)
class Implies:
    left: "PropExpr"
    right: "PropExpr"


PropExpr = Name | Not | And | Or | Implies

_TOKEN = re.compile(r"\s*(=>|[!&|()]|[A-Za-z_][A-Za-z0-9_]*)")


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            rest = text[pos:].lstrip()
            if not rest:
                break
            column = len(text) - len(rest) + 1
            raise ParseError(f"unexpected character {rest[0]!r}", f"column {column}")
        tokens.append((match.group(1), match.start(1) + 1))
        pos = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> str | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def column(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][1]
        return len(self.text) + 1

    def take(self) -> str:
        token = self.peek()
        self.pos += 1
        return token

    def parse(self) -> PropExpr:
        expr = self.implies()
        if self.peek() is not None:
            raise ParseError(f"unexpected token {self.peek()!r}",
                             f"column {self.column()}")
        return expr

    def implies(self) -> PropExpr:
        left = self.disjunction()
        if self.peek() == "=>":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> PropExpr:
        expr = self.conjunction()
        while self.peek() == "|":
            self.take()
            expr = Or(expr, self.conjunction())
        return expr

    def conjunction(self) -> PropExpr:
        expr = self.unary()
        while self.peek() == "&":
            self.take()
            expr = And(expr, self.unary())
        return expr

    def unary(self) -> PropExpr:
        if self.peek() == "!":
            self.take()
            return Not(self.unary())
        return self.atom()

    def atom(self) -> PropExpr:
        token = self.peek()
        if token is None:
            raise ParseError("unexpected end of expression",
                             f"column {self.column()}")
        if token == "(":
            self.take()
            expr = self.implies()
            if self.peek() != ")":
                raise ParseError("expected ')'", f"column {self.column()}")
            self.take()
            return expr
        if re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", token):
            self.take()
            return Name(token)
        raise ParseError(f"unexpected token {token!r}", f"column {self.column()}")


def parse_prop(text: str) -> PropExpr:
    """Parse a proposition expression; raises ParseError with a column."""
    return _Parser(text).parse()


_PRECEDENCE = {Implies: 0, Or: 1, And: 2, Not: 3, Name: 4}


def pretty(expr: PropExpr) -> str:
    """Render with minimal parentheses; parse_prop(pretty(e)) == e."""
    prec = _PRECEDENCE[type(expr)]
    if isinstance(expr, Name):
        return expr.ident
    if isinstance(expr, Not):
        inner = pretty(expr.operand)
        if _PRECEDENCE[type(expr.operand)] < prec:
            inner = f"({inner})"
        return f"!{inner}"
    if isinstance(expr, And):
        symbol, left_tight = " & ", False
    elif isinstance(expr, Or):
        symbol, left_tight = " | ", False
    else:
        symbol, left_tight = " => ", True
    left = pretty(expr.left)
    right = pretty(expr.right)
    # left-assoc operators need parens on an equal-precedence right child,
    # the right-assoc arrow on an equal-precedence left child
    if _PRECEDENCE[type(expr.left)] < prec or (
            left_tight and _PRECEDENCE[type(expr.left)] == prec):
        left = f"({left})"
    if _PRECEDENCE[type(expr.right)] < prec or (
            not left_tight and _PRECEDENCE[type(expr.right)] == prec):
        right = f"({right})"
    return f"{left}{symbol}{right}"


def leaf_names(expr: PropExpr) -> tuple[str, ...]:
    """Sorted identifiers appearing in the expression."""
    found: set[str] = set()

    def walk(node: PropExpr) -> None:
        if isinstance(node, Name):
            found.add(node.ident)
        elif isinstance(node, Not):
            walk(node.operand)
        else:
            walk(node.left)
            walk(node.right)

    walk(expr)
    return tuple(sorted(found))
