"""Indentation-sensitive tokenizer for Python-like source.

Produces a flat token stream with explicit INDENT/DEDENT/NEWLINE structure:

- NEWLINE is emitted only at the end of a *logical* line; blank lines and
  comment-only lines emit nothing besides their COMMENT token.
- INDENT/DEDENT are balanced over every successful tokenization (pending
  dedents are flushed before EOF).
- Brackets and a trailing backslash suppress NEWLINE/INDENT (implicit and
  explicit line joining).
- String literals, including prefixed (r/b/f/u and combinations) and
  triple-quoted forms, are single STRING tokens; no expression parsing is
  performed inside f-strings.
"""

from __future__ import annotations

import itertools
import keyword
from dataclasses import dataclass
from enum import Enum


class TokenKind(Enum):
    NAME = "NAME"
    KEYWORD = "KEYWORD"
    NUMBER = "NUMBER"
    STRING = "STRING"
    OP = "OP"
    COMMENT = "COMMENT"
    NEWLINE = "NEWLINE"
    INDENT = "INDENT"
    DEDENT = "DEDENT"
    EOF = "EOF"

    def __repr__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str
    line: int  # 1-based
    col: int   # 0-based

    def __repr__(self) -> str:
        return f"Token({self.kind.name}, {self.text!r}, {self.line}:{self.col})"


class LexicalError(ValueError):
    """Source cannot be tokenized; carries the offending position."""

    def __init__(self, message: str, line: int, col: int) -> None:
        super().__init__(f"{message} (line {line}, col {col})")
        self.message = message
        self.line = line
        self.col = col


KEYWORDS = frozenset(keyword.kwlist)

# Multi-character operators, longest first so greedy matching is correct.
_OPERATORS_3 = ("**=", "//=", ">>=", "<<=", "...")
_OPERATORS_2 = (
    "**", "//", ">>", "<<", "<=", ">=", "==", "!=", "->", ":=",
    "+=", "-=", "*=", "/=", "%=", "@=", "&=", "|=", "^=",
)
_OPERATORS_1 = "+-*/%@&|^~<>=()[]{},:.;"

_OPEN = {"(": ")", "[": "]", "{": "}"}
_CLOSE = {")", "]", "}"}

_STRING_PREFIXES = frozenset(
    "".join(chars)
    for base in ("r", "b", "u", "f", "rb", "br", "fr", "rf")
    for chars in itertools.product(*[(c, c.upper()) for c in base])
)

_TABSIZE = 8


def _indent_width(ws: str) -> int:
    width = 0
    for ch in ws:
        if ch == "\t":
            width = (width // _TABSIZE + 1) * _TABSIZE
        else:
            width += 1
    return width


class _Lexer:
    def __init__(self, source: str) -> None:
        self.src = source.replace("\r\n", "\n").replace("\r", "\n")
        self.pos = 0
        self.line = 1
        self.col = 0
        self.tokens: list[Token] = []
        self.indents = [0]
        self.bracket_stack: list[Token] = []
        self.line_has_tokens = False  # any non-COMMENT token on the current logical line

    # -- low-level cursor ---------------------------------------------------

    def _peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.src[i] if i < len(self.src) else ""

    def _advance(self, count: int = 1) -> str:
        text = self.src[self.pos : self.pos + count]
        for ch in text:
            if ch == "\n":
                self.line += 1
                self.col = 0
            else:
                self.col += 1
        self.pos += count
        return text

    def _emit(self, kind: TokenKind, text: str, line: int, col: int) -> None:
        self.tokens.append(Token(kind, text, line, col))
        if kind not in (TokenKind.COMMENT, TokenKind.NEWLINE, TokenKind.INDENT, TokenKind.DEDENT):
            self.line_has_tokens = True

    # -- line structure -----------------------------------------------------

    def _handle_line_start(self) -> None:
        """Measure indentation of the next logical line; emit INDENT/DEDENT.

        Blank and comment-only lines are skipped without touching the
        indent stack.
        """
        while True:
            ws = ""
            while self._peek() in (" ", "\t"):
                ws += self._advance()
            nxt = self._peek()
            if nxt == "\n":
                self._advance()
                continue
            if nxt == "":
                return
            if nxt == "#":
                line, col = self.line, self.col
                comment = ""
                while self._peek() not in ("", "\n"):
                    comment += self._advance()
                self._emit(TokenKind.COMMENT, comment, line, col)
                if self._peek() == "\n":
                    self._advance()
                    continue
                return
            if nxt == "\\" and self._peek(1) == "\n":
                self._advance(2)
                continue
            break

        width = _indent_width(ws)
        if width > self.indents[-1]:
            self.indents.append(width)
            self._emit(TokenKind.INDENT, ws, self.line, 0)
        else:
            while width < self.indents[-1]:
                self.indents.pop()
                self._emit(TokenKind.DEDENT, "", self.line, 0)
            if width != self.indents[-1]:
                raise LexicalError("inconsistent dedent", self.line, self.col)

    def _end_logical_line(self, line: int, col: int) -> None:
        if self.line_has_tokens:
            self._emit(TokenKind.NEWLINE, "\n", line, col)
        self.line_has_tokens = False

    # -- token scanners -----------------------------------------------------

    def _scan_string(self) -> None:
        start_line, start_col = self.line, self.col
        start_pos = self.pos

        prefix = ""
        while len(prefix) < 2 and self._peek(len(prefix)).isalpha():
            prefix += self._peek(len(prefix))
        if prefix in _STRING_PREFIXES and self._peek(len(prefix)) in ("'", '"'):
            self._advance(len(prefix))
        elif prefix[:1] in _STRING_PREFIXES and self._peek(1) in ("'", '"'):
            prefix = prefix[:1]
            self._advance(1)
        else:
            prefix = ""

        quote = self._peek()
        if self._peek(1) == quote and self._peek(2) == quote:
            closer = quote * 3
            self._advance(3)
        else:
            closer = quote
            self._advance(1)

        while True:
            ch = self._peek()
            if ch == "":
                raise LexicalError("unterminated string", start_line, start_col)
            if len(closer) == 1 and ch == "\n":
                raise LexicalError("unterminated string", start_line, start_col)
            if ch == "\\":
                if self._peek(1) == "":
                    raise LexicalError("unterminated string", start_line, start_col)
                self._advance(2)
                continue
            if self.src.startswith(closer, self.pos):
                self._advance(len(closer))
                break
            self._advance()

        self._emit(TokenKind.STRING, self.src[start_pos : self.pos], start_line, start_col)

    def _scan_number(self) -> None:
        start_line, start_col = self.line, self.col
        start_pos = self.pos

        def take(pred) -> None:
            while self._peek() and (pred(self._peek()) or self._peek() == "_"):
                self._advance()

        if self._peek() == "0" and self._peek(1) in tuple("xXoObB"):
            self._advance(2)
            take(str.isalnum)
        else:
            take(str.isdigit)
            if self._peek() == "." and self._peek(1).isdigit():
                self._advance()
                take(str.isdigit)
            elif self._peek() == "." and self._peek(1) != "." and not (
                self._peek(1).isalpha() or self._peek(1) == "_"
            ):
                self._advance()
            if self._peek() in ("e", "E") and (
                self._peek(1).isdigit() or (self._peek(1) in ("+", "-") and self._peek(2).isdigit())
            ):
                self._advance(2)
                take(str.isdigit)
        if self._peek() in ("j", "J"):
            self._advance()

        self._emit(TokenKind.NUMBER, self.src[start_pos : self.pos], start_line, start_col)

    def _scan_name(self) -> None:
        start_line, start_col = self.line, self.col
        start_pos = self.pos
        while self._peek().isalnum() or self._peek() == "_":
            self._advance()
        text = self.src[start_pos : self.pos]
        kind = TokenKind.KEYWORD if text in KEYWORDS else TokenKind.NAME
        self._emit(kind, text, start_line, start_col)

    def _scan_operator(self) -> None:
        start_line, start_col = self.line, self.col
        for group in (_OPERATORS_3, _OPERATORS_2):
            for op in group:
                if self.src.startswith(op, self.pos):
                    self._advance(len(op))
                    self._emit(TokenKind.OP, op, start_line, start_col)
                    return
        ch = self._peek()
        if ch in _OPERATORS_1:
            self._advance()
            self._emit(TokenKind.OP, ch, start_line, start_col)
            if ch in _OPEN:
                self.bracket_stack.append(self.tokens[-1])
            elif ch in _CLOSE:
                if not self.bracket_stack:
                    raise LexicalError(f"unmatched {ch!r}", start_line, start_col)
                opener = self.bracket_stack.pop()
                if _OPEN[opener.text] != ch:
                    raise LexicalError(
                        f"closing {ch!r} does not match {opener.text!r}", start_line, start_col
                    )
            return
        raise LexicalError(f"illegal character {ch!r}", start_line, start_col)

    # -- main loop ----------------------------------------------------------

    def run(self) -> list[Token]:
        self._handle_line_start()
        while self.pos < len(self.src):
            ch = self._peek()
            if ch == "\n":
                line, col = self.line, self.col
                self._advance()
                if self.bracket_stack:
                    continue
                self._end_logical_line(line, col)
                self._handle_line_start()
            elif ch in " \t\f":
                self._advance()
            elif ch == "\\" and self._peek(1) == "\n":
                self._advance(2)
            elif ch == "#":
                line, col = self.line, self.col
                text = ""
                while self._peek() not in ("", "\n"):
                    text += self._advance()
                self._emit(TokenKind.COMMENT, text, line, col)
            elif ch in "'\"":
                self._scan_string()
            elif ch.isdigit() or (ch == "." and self._peek(1).isdigit()):
                self._scan_number()
            elif ch.isalpha() or ch == "_":
                two = self.src[self.pos : self.pos + 2]
                if (two[:1] in _STRING_PREFIXES and self._peek(1) in ("'", '"')) or (
                    two in _STRING_PREFIXES and self._peek(2) in ("'", '"')
                ):
                    self._scan_string()
                else:
                    self._scan_name()
            else:
                self._scan_operator()

        self._end_logical_line(self.line, self.col)
        while len(self.indents) > 1:
            self.indents.pop()
            self._emit(TokenKind.DEDENT, "", self.line, 0)
        self._emit(TokenKind.EOF, "", self.line, self.col)
        return self.tokens


def tokenize(source: str) -> list[Token]:
    """Tokenize ``source``; raise :class:`LexicalError` on malformed input.

    The returned stream always ends with EOF and has balanced INDENT/DEDENT.
    Open brackets at end of input are *not* a lexical error (the syntax
    checker reports them); use :func:`lex` to obtain the leftover openers.
    """
    tokens, _ = lex(source)
    return tokens


def lex(source: str) -> tuple[list[Token], list[Token]]:
    """Tokenize and also return bracket openers left unclosed at EOF."""
    lexer = _Lexer(source)
    tokens = lexer.run()
    return tokens, list(lexer.bracket_stack)
