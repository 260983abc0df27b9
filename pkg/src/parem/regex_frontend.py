"""Lexer, parser and printer for the pattern language.

Operators, loosest binding first::

    a|b        union
    ab         concatenation
    a* a+ a?   postfix quantifiers
    (ab)       grouping
    [0..9]     inclusive range of single characters, ASCII order

A backslash turns the next character into a plain symbol, so ``\\*`` matches a
literal star.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Union as _TypingUnion

from .errors import (
    EmptySubexpression,
    InvalidRange,
    StrayRangeDots,
    TrailingBackslash,
    UnbalancedParen,
)

__all__ = [
    "TokenKind",
    "Token",
    "Literal",
    "Concat",
    "Union",
    "Star",
    "Plus",
    "Optional",
    "Range",
    "RegexAst",
    "tokenize",
    "parse",
    "parse_pattern",
    "to_pattern",
    "concat",
    "union",
    "pattern_alphabet",
    "ast_depth",
]

METACHARACTERS = frozenset("*+?|()[]\\.")


class TokenKind(enum.Enum):
    SYMBOL = "symbol"
    STAR = "*"
    PLUS = "+"
    QUESTION = "?"
    PIPE = "|"
    LPAREN = "("
    RPAREN = ")"
    LBRACKET = "["
    RANGE_DOTS = ".."
    RBRACKET = "]"


_SINGLE = {
    "*": TokenKind.STAR,
    "+": TokenKind.PLUS,
    "?": TokenKind.QUESTION,
    "|": TokenKind.PIPE,
    "(": TokenKind.LPAREN,
    ")": TokenKind.RPAREN,
    "[": TokenKind.LBRACKET,
    "]": TokenKind.RBRACKET,
}

_QUANTIFIERS = (TokenKind.STAR, TokenKind.PLUS, TokenKind.QUESTION)


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    position: int
    symbol: str | None = None

    def __repr__(self) -> str:
        if self.kind is TokenKind.SYMBOL:
            return f"Token(SYMBOL {self.symbol!r} @{self.position})"
        return f"Token({self.kind.name} @{self.position})"


# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Literal:
    symbol: str


@dataclass(frozen=True)
class Concat:
    children: tuple


@dataclass(frozen=True)
class Union:
    children: tuple


@dataclass(frozen=True)
class Star:
    child: object


@dataclass(frozen=True)
class Plus:
    child: object


@dataclass(frozen=True)
class Optional:
    child: object


@dataclass(frozen=True)
class Range:
    lo: str
    hi: str

    def __post_init__(self):
        if len(self.lo) != 1 or len(self.hi) != 1:
            raise InvalidRange(f"range endpoints must be single characters, got {self.lo!r}..{self.hi!r}")
        if self.lo > self.hi:
            raise InvalidRange(f"descending range {self.lo!r}..{self.hi!r}")

    def symbols(self) -> list[str]:
        return [chr(c) for c in range(ord(self.lo), ord(self.hi) + 1)]


RegexAst = _TypingUnion[Literal, Concat, Union, Star, Plus, Optional, Range]

_QUANTIFIER_NODE = {TokenKind.STAR: Star, TokenKind.PLUS: Plus, TokenKind.QUESTION: Optional}


def concat(*parts: RegexAst) -> RegexAst:
    """Build a flattened concatenation; a single part is returned unchanged."""
    flat: list = []
    for part in parts:
        flat.extend(part.children if isinstance(part, Concat) else (part,))
    if not flat:
        raise EmptySubexpression("empty concatenation")
    return flat[0] if len(flat) == 1 else Concat(tuple(flat))


def union(*options: RegexAst) -> RegexAst:
    """Build a flattened union; a single option is returned unchanged."""
    flat: list = []
    for option in options:
        flat.extend(option.children if isinstance(option, Union) else (option,))
    if not flat:
        raise EmptySubexpression("empty union")
    return flat[0] if len(flat) == 1 else Union(tuple(flat))


# -- lexing -------------------------------------------------------------------


def tokenize(pattern: str) -> list[Token]:
    tokens: list[Token] = []
    in_brackets = False
    i, n = 0, len(pattern)
    while i < n:
        ch = pattern[i]
        if ch == "\\":
            if i + 1 >= n:
                raise TrailingBackslash("pattern ends with an escape", i)
            tokens.append(Token(TokenKind.SYMBOL, i, pattern[i + 1]))
            i += 2
            continue
        if ch == "." and i + 1 < n and pattern[i + 1] == ".":
            if not in_brackets:
                raise StrayRangeDots("'..' is only valid inside brackets", i)
            tokens.append(Token(TokenKind.RANGE_DOTS, i))
            i += 2
            continue
        kind = _SINGLE.get(ch)
        if kind is None:
            tokens.append(Token(TokenKind.SYMBOL, i, ch))
        else:
            if kind is TokenKind.LBRACKET:
                in_brackets = True
            elif kind is TokenKind.RBRACKET:
                in_brackets = False
            tokens.append(Token(kind, i))
        i += 1
    return tokens


# -- parsing ------------------------------------------------------------------


class _Parser:
    # union   := concat ('|' concat)*
    # concat  := postfix+
    # postfix := atom ('*' | '+' | '?')*
    # atom    := SYMBOL | '(' union ')' | '[' SYMBOL '..' SYMBOL ']'

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def where(self) -> int:
        tok = self.peek()
        if tok is not None:
            return tok.position
        return self.tokens[-1].position + 1 if self.tokens else 0

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> RegexAst:
        if not self.tokens:
            raise EmptySubexpression("empty pattern", 0)
        node = self.parse_union()
        tok = self.peek()
        if tok is not None:
            if tok.kind is TokenKind.RPAREN:
                raise UnbalancedParen("unmatched ')'", tok.position)
            raise InvalidRange(f"unexpected {tok.kind.value!r}", tok.position)
        return node

    def parse_union(self) -> RegexAst:
        options = [self.parse_concat()]
        while (tok := self.peek()) is not None and tok.kind is TokenKind.PIPE:
            self.take()
            options.append(self.parse_concat())
        return union(*options)

    def parse_concat(self) -> RegexAst:
        parts = []
        while (tok := self.peek()) is not None and tok.kind not in (TokenKind.PIPE, TokenKind.RPAREN):
            if tok.kind in (TokenKind.RBRACKET, TokenKind.RANGE_DOTS):
                raise InvalidRange(f"unexpected {tok.kind.value!r} outside a range", tok.position)
            parts.append(self.parse_postfix())
        if not parts:
            raise EmptySubexpression("empty alternative or group", self.where())
        return concat(*parts)

    def parse_postfix(self) -> RegexAst:
        node = self.parse_atom()
        while (tok := self.peek()) is not None and tok.kind in _QUANTIFIERS:
            self.take()
            node = _QUANTIFIER_NODE[tok.kind](node)
        return node

    def parse_atom(self) -> RegexAst:
        tok = self.take()
        if tok.kind is TokenKind.SYMBOL:
            return Literal(tok.symbol)
        if tok.kind is TokenKind.LPAREN:
            if (nxt := self.peek()) is not None and nxt.kind is TokenKind.RPAREN:
                raise EmptySubexpression("empty group", tok.position)
            node = self.parse_union()
            close = self.peek()
            if close is None or close.kind is not TokenKind.RPAREN:
                raise UnbalancedParen("'(' is never closed", tok.position)
            self.take()
            return node
        if tok.kind is TokenKind.LBRACKET:
            return self.parse_range(tok)
        if tok.kind in _QUANTIFIERS:
            raise EmptySubexpression(f"quantifier {tok.kind.value!r} has no operand", tok.position)
        raise InvalidRange(f"unexpected {tok.kind.value!r}", tok.position)

    def parse_range(self, opening: Token) -> Range:
        shape = (TokenKind.SYMBOL, TokenKind.RANGE_DOTS, TokenKind.SYMBOL, TokenKind.RBRACKET)
        body = self.tokens[self.pos:self.pos + 4]
        if len(body) < 4 or tuple(t.kind for t in body) != shape:
            raise InvalidRange("a range must look like [x..y] with single-character endpoints", opening.position)
        self.pos += 4
        lo, hi = body[0].symbol, body[2].symbol
        if lo > hi:
            raise InvalidRange(f"descending range {lo!r}..{hi!r}", opening.position)
        return Range(lo, hi)


def parse(tokens: list[Token]) -> RegexAst:
    return _Parser(list(tokens)).parse()


def parse_pattern(pattern: str) -> RegexAst:
    return parse(tokenize(pattern))


# -- printing and inspection --------------------------------------------------


def _escape(symbol: str) -> str:
    return "\\" + symbol if symbol in METACHARACTERS else symbol


def to_pattern(node: RegexAst) -> str:
    """Render an AST back to pattern text using as few parentheses as possible."""
    if isinstance(node, Literal):
        return _escape(node.symbol)
    if isinstance(node, Range):
        return f"[{_escape(node.lo)}..{_escape(node.hi)}]"
    if isinstance(node, Union):
        return "|".join(to_pattern(c) for c in node.children)
    if isinstance(node, Concat):
        return "".join(
            f"({to_pattern(c)})" if isinstance(c, Union) else to_pattern(c) for c in node.children
        )
    suffix = {Star: "*", Plus: "+", Optional: "?"}[type(node)]
    inner = to_pattern(node.child)
    if isinstance(node.child, (Union, Concat)):
        inner = f"({inner})"
    return inner + suffix


def _walk(node: RegexAst) -> Iterator[RegexAst]:
    yield node
    if isinstance(node, (Concat, Union)):
        for child in node.children:
            yield from _walk(child)
    elif isinstance(node, (Star, Plus, Optional)):
        yield from _walk(node.child)


def pattern_alphabet(node: RegexAst) -> list[str]:
    """Distinct symbols of the pattern in order of first appearance."""
    seen: dict[str, None] = {}
    for sub in _walk(node):
        if isinstance(sub, Literal):
            seen.setdefault(sub.symbol)
        elif isinstance(sub, Range):
            for symbol in sub.symbols():
                seen.setdefault(symbol)
    return list(seen)


def ast_depth(node: RegexAst) -> int:
    if isinstance(node, (Literal, Range)):
        return 1
    if isinstance(node, (Concat, Union)):
        return 1 + max(ast_depth(c) for c in node.children)
    return 1 + ast_depth(node.child)
