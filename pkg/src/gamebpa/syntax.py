"""Concrete text syntax for process terms and game declarations.

Term grammar, loosest binding first::

    play   := choice ('&' choice)*          left-associative
    choice := chain (('+' | '$') chain)*    left-associative, one level
    chain  := atom ('.' atom)*              right-associative
    atom   := IDENT | 'delta' | '(' play ')'

The mathematical glyphs ``·``, ``‡``, ``⊓`` and ``δ`` are accepted as aliases of
``.``, ``$``, ``&`` and ``delta``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .terms import (
    DELTA,
    LABEL_RE,
    RESERVED,
    Action,
    Alt,
    Deadlock,
    GameDeclaration,
    OppAlt,
    Play,
    Seq,
    Term,
)


@dataclass(frozen=True)
class SourceSpan:
    line: int
    column: int
    length: int = 1

    def __str__(self):
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    def __init__(self, span: SourceSpan, message: str, expected: list[str] | None = None):
        self.span = span
        self.message = message
        self.expected = list(expected or [])
        super().__init__(f"{span}: {message}")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


_SYMBOLS = {
    ".": "DOT", "·": "DOT",
    "+": "PLUS",
    "$": "OPP", "‡": "OPP",
    "&": "PLAY", "⊓": "PLAY",
    "(": "LPAREN", ")": "RPAREN",
    "δ": "DELTA",
}
_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


def _position_finder(src: str):
    starts = [0]
    for i, ch in enumerate(src):
        if ch == "\n":
            starts.append(i + 1)

    def span(offset: int, length: int = 1) -> SourceSpan:
        # clamp into the text so errors at end of input still point at a character
        offset = max(0, min(offset, len(src) - 1))
        line = 0
        lo, hi = 0, len(starts) - 1
        while lo <= hi:
            mid = (lo + hi) // 2
            if starts[mid] <= offset:
                line = mid
                lo = mid + 1
            else:
                hi = mid - 1
        return SourceSpan(line + 1, offset - starts[line] + 1, max(1, length))

    return span


def tokenize(src: str) -> list[Token]:
    span = _position_finder(src)
    tokens = []
    i = 0
    n = len(src)
    while i < n:
        ch = src[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SYMBOLS:
            tokens.append(Token(_SYMBOLS[ch], ch, span(i)))
            i += 1
            continue
        m = _IDENT.match(src, i)
        if m:
            word = m.group()
            kind = "DELTA" if word == "delta" else "IDENT"
            tokens.append(Token(kind, word, span(i, len(word))))
            i = m.end()
            continue
        raise ParseError(span(i), f"unexpected character {ch!r}", ["identifier", "delta", "'('"])
    # end of input is reported at the last visible character
    last = max(len(src.rstrip()) - 1, 0)
    tokens.append(Token("EOF", "", span(last)))
    return tokens


class _TermParser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: list[str]):
        tok = self.peek()
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise ParseError(tok.span, f"expected {' or '.join(expected)}, found {found}", expected)

    def parse(self) -> Term:
        term = self.play()
        if self.peek().kind != "EOF":
            self.fail(["'&'", "'+'", "'$'", "'.'", "end of input"])
        return term

    def play(self) -> Term:
        term = self.choice()
        while self.peek().kind == "PLAY":
            self.advance()
            term = Play(term, self.choice())
        return term

    def choice(self) -> Term:
        term = self.chain()
        while self.peek().kind in ("PLUS", "OPP"):
            op = self.advance().kind
            right = self.chain()
            term = Alt(term, right) if op == "PLUS" else OppAlt(term, right)
        return term

    def chain(self) -> Term:
        parts = [self.atom()]
        while self.peek().kind == "DOT":
            self.advance()
            parts.append(self.atom())
        term = parts[-1]
        for p in reversed(parts[:-1]):
            term = Seq(p, term)
        return term

    def atom(self) -> Term:
        tok = self.peek()
        if tok.kind == "IDENT":
            self.advance()
            if tok.text in RESERVED:
                raise ParseError(tok.span, f"{tok.text!r} is reserved", ["identifier"])
            return Action(tok.text)
        if tok.kind == "DELTA":
            self.advance()
            return DELTA
        if tok.kind == "LPAREN":
            self.advance()
            inner = self.play()
            if self.peek().kind != "RPAREN":
                self.fail(["')'"])
            self.advance()
            return inner
        self.fail(["identifier", "delta", "'('"])


def parse_term(src: str) -> Term:
    """Parse one process term; raises :class:`ParseError` on the first problem."""
    return _TermParser(src).parse()


# binding strength used by the printer
_LEVEL = {Play: 1, Alt: 2, OppAlt: 2, Seq: 3}

_ASCII = {Play: " & ", Alt: " + ", OppAlt: " $ ", Seq: " . "}
_GLYPHS = {Play: " ⊓ ", Alt: " + ", OppAlt: " ‡ ", Seq: "·"}


def print_term(t: Term, glyphs: bool = False) -> str:
    """Minimal-parenthesis rendering that :func:`parse_term` reads back to ``t``.

    With ``glyphs=True`` the mathematical glyphs are used instead of ASCII.
    """
    ops = _GLYPHS if glyphs else _ASCII
    delta = "δ" if glyphs else "delta"
    out: list[str] = []

    def emit(node: Term, min_level: int):
        level = _LEVEL.get(type(node), 4)
        wrap = level < min_level
        if wrap:
            out.append("(")
        if isinstance(node, Action):
            out.append(node.name)
        elif isinstance(node, Deadlock):
            out.append(delta)
        elif isinstance(node, Seq):
            # right spine iteratively: long chains must not exhaust the stack
            while isinstance(node, Seq):
                emit(node.left, 4)
                out.append(ops[Seq])
                node = node.right
            emit(node, 3)
        else:
            spine = []
            while _LEVEL.get(type(node)) == level:
                spine.append(node)
                node = node.left
            emit(node, level)
            for op in reversed(spine):
                out.append(ops[type(op)])
                emit(op.right, level + 1)
        if wrap:
            out.append(")")

    emit(t, 0)
    return "".join(out)


# --- game declarations ------------------------------------------------------

def parse_game_decl(src: str) -> GameDeclaration:
    """Parse the line-oriented ownership format::

        players P, O
        owner O: submit, cancel
        owner P: start, write, store

    ``#`` starts a comment. Unknown roles and duplicate labels are errors.
    """
    players: list[str] | None = None
    players_span: SourceSpan | None = None
    ownership: dict[str, str] = {}

    for lineno, raw in enumerate(src.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        col = len(line) - len(line.lstrip()) + 1
        body = line.strip()
        keyword = body.split(None, 1)[0]

        if keyword == "players":
            if players is not None:
                raise ParseError(SourceSpan(lineno, col, len(keyword)), "duplicate 'players' header")
            players_span = SourceSpan(lineno, col, len(keyword))
            rest_col = col + len(keyword)
            players = []
            for name, c in _split_names(line, rest_col - 1, lineno, "role"):
                if name in players:
                    raise ParseError(SourceSpan(lineno, c, len(name)), f"role {name!r} listed twice")
                players.append(name)
            if len(players) < 2:
                raise ParseError(players_span, "a game needs at least two roles", ["role"])
        elif keyword == "owner":
            if players is None:
                raise ParseError(SourceSpan(lineno, col, len(keyword)),
                                 "'owner' line before the 'players' header", ["players"])
            colon = line.find(":", col - 1 + len(keyword))
            if colon < 0:
                raise ParseError(SourceSpan(lineno, col, len(body)), "expected ':' after the role", ["':'"])
            role_text = line[col - 1 + len(keyword):colon]
            role = role_text.strip()
            role_col = col + len(keyword) + (len(role_text) - len(role_text.lstrip()))
            if not _IDENT.fullmatch(role):
                raise ParseError(SourceSpan(lineno, max(1, min(role_col, len(line))), max(1, len(role))),
                                 "expected a role name", ["role"])
            if role not in players:
                raise ParseError(SourceSpan(lineno, role_col, len(role)), f"unknown role {role!r}",
                                 list(players))
            for label, c in _split_names(line, colon + 1, lineno, "action label"):
                if label in RESERVED:
                    raise ParseError(SourceSpan(lineno, c, len(label)), f"{label!r} is reserved")
                if label in ownership:
                    raise ParseError(SourceSpan(lineno, c, len(label)),
                                     f"label {label!r} already owned by {ownership[label]}")
                ownership[label] = role
        else:
            raise ParseError(SourceSpan(lineno, col, len(keyword)), f"unknown directive {keyword!r}",
                             ["players", "owner"])

    if players is None:
        raise ParseError(SourceSpan(1, 1, 1), "missing 'players' header", ["players"])
    return GameDeclaration(tuple(players), ownership)


def _split_names(line: str, start: int, lineno: int, what: str):
    """Yield (name, 1-based column) for a comma-separated list in ``line[start:]``."""
    offset = start
    pieces = line[start:].split(",")
    for piece in pieces:
        stripped = piece.strip()
        col = offset + (len(piece) - len(piece.lstrip())) + 1
        if not stripped or not LABEL_RE.match(stripped):
            where = min(max(col, 1), max(len(line), 1))
            raise ParseError(SourceSpan(lineno, where, max(1, len(stripped))), f"expected {what}", [what])
        yield stripped, col
        offset += len(piece) + 1


def format_game_decl(g: GameDeclaration) -> str:
    lines = ["players " + ", ".join(g.players)]
    for role in g.players:
        owned = [l for l, r in g.ownership.items() if r == role]
        if owned:
            lines.append(f"owner {role}: " + ", ".join(owned))
    return "\n".join(lines) + "\n"
