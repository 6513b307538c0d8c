"""Statement/suite tree built from the token stream.

The tree is deliberately shallow in ambition: it groups logical lines into
statements, attaches suites to compound statements, and attaches trailing
clauses (elif/else/except/finally) to the statement that owns them. That is
enough structure for the maintainability and readability checks without a
full grammar.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .tokens import Token, TokenKind, tokenize

COMPOUND_KEYWORDS = frozenset(
    {"def", "class", "if", "elif", "else", "for", "while", "try", "with",
     "except", "finally"}
)

# clause keyword -> statement kinds it may attach to
_CLAUSE_OWNERS = {
    "elif": {"if"},
    "else": {"if", "for", "while", "try"},
    "except": {"try"},
    "finally": {"try"},
}


@dataclass
class Stmt:
    """One statement: a logical line, plus its suite if it opens one."""

    kind: str                      # 'if', 'for', 'def', ... or 'simple'
    header: list[Token]            # tokens up to and including the suite colon
    depth: int                     # 0 at module level
    body: list["Stmt"] = field(default_factory=list)
    clauses: list["Stmt"] = field(default_factory=list)
    dangling: bool = False         # compound header with no suite at all

    @property
    def start_line(self) -> int:
        return self.header[0].line if self.header else 0

    @property
    def end_line(self) -> int:
        last = self.start_line
        if self.header:
            last = max(last, self.header[-1].line)
        for child in self.body + self.clauses:
            last = max(last, child.end_line)
        return last

    def iter_tree(self):
        yield self
        for child in self.body:
            yield from child.iter_tree()
        for clause in self.clauses:
            yield from clause.iter_tree()


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = [t for t in tokens if t.kind is not TokenKind.COMMENT]
        self.pos = 0

    def _peek(self) -> Token:
        return self.tokens[self.pos]

    def _next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse_suite(self, depth: int) -> list[Stmt]:
        stmts: list[Stmt] = []
        while True:
            tok = self._peek()
            if tok.kind in (TokenKind.DEDENT, TokenKind.EOF):
                return stmts
            stmt = self.parse_statement(depth)
            if stmt is None:
                continue
            owner = self._clause_owner(stmts, stmt)
            if owner is not None:
                owner.clauses.append(stmt)
            else:
                stmts.append(stmt)

    @staticmethod
    def _clause_owner(stmts: list[Stmt], stmt: Stmt) -> Stmt | None:
        owners = _CLAUSE_OWNERS.get(stmt.kind)
        if not owners or not stmts:
            return None
        candidate = stmts[-1]
        return candidate if candidate.kind in owners else None

    def parse_statement(self, depth: int) -> Stmt | None:
        header: list[Token] = []
        first = self._peek()

        kind = "simple"
        if first.kind is TokenKind.KEYWORD and first.text in COMPOUND_KEYWORDS:
            kind = first.text
        elif first.kind is TokenKind.KEYWORD and first.text == "async":
            nxt = self.tokens[self.pos + 1] if self.pos + 1 < len(self.tokens) else None
            if nxt is not None and nxt.kind is TokenKind.KEYWORD and nxt.text in ("def", "for", "with"):
                kind = nxt.text

        if kind == "simple":
            while self._peek().kind not in (TokenKind.NEWLINE, TokenKind.EOF):
                if self._peek().kind in (TokenKind.INDENT, TokenKind.DEDENT):
                    break
                header.append(self._next())
            if self._peek().kind is TokenKind.NEWLINE:
                self._next()
            if not header:
                # Unexpected INDENT (malformed input): consume and move on.
                if self._peek().kind is TokenKind.INDENT:
                    self._next()
                return None
            return Stmt(kind="simple", header=header, depth=depth)

        # Compound statement: consume up to the suite colon at bracket depth 0.
        bracket = 0
        lambda_depth: list[int] = []
        saw_colon = False
        while self._peek().kind not in (TokenKind.NEWLINE, TokenKind.EOF):
            tok = self._next()
            header.append(tok)
            if tok.kind is TokenKind.OP and tok.text in "([{":
                bracket += 1
            elif tok.kind is TokenKind.OP and tok.text in ")]}":
                bracket -= 1
            elif tok.kind is TokenKind.KEYWORD and tok.text == "lambda":
                lambda_depth.append(bracket)
            elif tok.kind is TokenKind.OP and tok.text == ":" and bracket == 0:
                if lambda_depth and lambda_depth[-1] == bracket:
                    lambda_depth.pop()
                    continue
                saw_colon = True
                break

        stmt = Stmt(kind=kind, header=header, depth=depth)
        if not saw_colon:
            if self._peek().kind is TokenKind.NEWLINE:
                self._next()
            stmt.dangling = True
            return stmt

        # Inline suite: statements on the same line after the colon.
        if self._peek().kind not in (TokenKind.NEWLINE, TokenKind.EOF):
            stmt.body = self._parse_inline_suite(depth + 1)
            if self._peek().kind is TokenKind.NEWLINE:
                self._next()
            return stmt

        if self._peek().kind is TokenKind.NEWLINE:
            self._next()
        if self._peek().kind is TokenKind.INDENT:
            self._next()
            stmt.body = self.parse_suite(depth + 1)
            if self._peek().kind is TokenKind.DEDENT:
                self._next()
        else:
            stmt.dangling = True
        return stmt

    def _parse_inline_suite(self, depth: int) -> list[Stmt]:
        stmts: list[Stmt] = []
        current: list[Token] = []
        while self._peek().kind not in (TokenKind.NEWLINE, TokenKind.EOF):
            tok = self._next()
            if tok.kind is TokenKind.OP and tok.text == ";":
                if current:
                    stmts.append(Stmt(kind="simple", header=current, depth=depth))
                    current = []
                continue
            current.append(tok)
        if current:
            stmts.append(Stmt(kind="simple", header=current, depth=depth))
        return stmts

    def parse_module(self) -> list[Stmt]:
        stmts: list[Stmt] = []
        while self._peek().kind is not TokenKind.EOF:
            if self._peek().kind in (TokenKind.DEDENT, TokenKind.INDENT):
                self._next()  # malformed input tolerance
                continue
            stmts.extend(self.parse_suite(0))
        return stmts


def parse_blocks(source: str) -> list[Stmt]:
    """Parse ``source`` into a statement tree (tolerant of odd constructs).

    Raises LexicalError when the source does not tokenize.
    """
    return _Parser(tokenize(source)).parse_module()


def iter_statements(stmts: list[Stmt]):
    for stmt in stmts:
        yield from stmt.iter_tree()
