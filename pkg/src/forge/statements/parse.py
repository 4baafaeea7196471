"""Prefix (s-expression) parser for the statement grammar.

Grammar (EBNF, whitespace between tokens):

    statement ::= bool
    bool      ::= "(" "=" arith arith ")"
                | "(" AND bool bool ")"
                | "(" IMPLIES bool bool ")"
                | "(" NOT bool ")"
    arith     ::= FEATURE | INT
                | "(" ("+" | "-" | "*") arith arith ")"
    FEATURE   ::= r1 | r2 | n1 | n2 | h1 | w1 | h2 | w2
    INT       ::= optionally signed decimal integer
    AND       ::= "∧" | "and" | "&"
    IMPLIES   ::= "⟹" | "=>" | "->"
    NOT       ::= "¬" | "not" | "!"

Rendering always emits the Unicode connectives; the ASCII spellings are
accepted as aliases on input.
"""

from __future__ import annotations

import re

from .ast import (
    And,
    Arith,
    Const,
    Equals,
    Feature,
    FEATURE_INDEX,
    Implies,
    Node,
    Not,
    StatementTypeError,
    is_arith,
    is_boolean,
)

_AND_TOKENS = {"∧", "and", "&"}
_IMPLIES_TOKENS = {"⟹", "=>", "->"}
_NOT_TOKENS = {"¬", "not", "!"}
_INT_RE = re.compile(r"[+-]?\d+\Z")


class StatementSyntaxError(ValueError):
    """Malformed statement text; carries the offending token position."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at token {position})")
        self.position = position


def _tokenize(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def parse(text: str) -> Node:
    """Parse statement text into a well-typed Boolean tree.

    Raises :class:`StatementSyntaxError` on malformed input and
    :class:`StatementTypeError` when the tree is syntactically fine but
    ill-typed (for example an arithmetic operator over a Boolean child).
    """
    tokens = _tokenize(text)
    if not tokens:
        raise StatementSyntaxError("empty input", 0)
    node, pos = _parse_expr(tokens, 0)
    if pos != len(tokens):
        raise StatementSyntaxError("trailing tokens after statement", pos)
    if not is_boolean(node):
        raise StatementTypeError(f"statement root must be Boolean, got {node}")
    return node


def _parse_expr(tokens: list[str], pos: int) -> tuple[Node, int]:
    if pos >= len(tokens):
        raise StatementSyntaxError("unexpected end of input", pos)
    tok = tokens[pos]
    if tok == "(":
        if pos + 1 >= len(tokens):
            raise StatementSyntaxError("unexpected end after '('", pos + 1)
        op = tokens[pos + 1]
        args: list[Node] = []
        cur = pos + 2
        while cur < len(tokens) and tokens[cur] != ")":
            node, cur = _parse_expr(tokens, cur)
            args.append(node)
        if cur >= len(tokens):
            raise StatementSyntaxError("missing ')'", cur)
        return _build(op, args, pos + 1), cur + 1
    if tok == ")":
        raise StatementSyntaxError("unexpected ')'", pos)
    return _parse_leaf(tok, pos), pos + 1


def _parse_leaf(tok: str, pos: int) -> Node:
    if tok in FEATURE_INDEX:
        return Feature(tok)
    if _INT_RE.match(tok):
        return Const(int(tok))
    raise StatementSyntaxError(f"unknown token {tok!r}", pos)


def _build(op: str, args: list[Node], pos: int) -> Node:
    def need(n: int) -> None:
        if len(args) != n:
            raise StatementSyntaxError(
                f"operator {op!r} expects {n} argument(s), got {len(args)}", pos
            )

    if op in ("+", "-", "*"):
        need(2)
        return Arith(op, args[0], args[1])
    if op == "=":
        need(2)
        return Equals(args[0], args[1])
    if op in _AND_TOKENS:
        need(2)
        return And(args[0], args[1])
    if op in _IMPLIES_TOKENS:
        need(2)
        return Implies(args[0], args[1])
    if op in _NOT_TOKENS:
        need(1)
        return Not(args[0])
    # A bare arithmetic/Boolean expression in operator position is a syntax
    # error, not a type error: the grammar has no such production.
    raise StatementSyntaxError(f"unknown operator {op!r}", pos)
