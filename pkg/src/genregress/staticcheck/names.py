"""Binding-site and name-use extraction from the statement tree.

The analysis is flow-insensitive and snippet-scoped: a name bound anywhere
counts as bound everywhere. Binding forms covered:

- assignment targets (plain, chained, tuple/list/star, augmented, annotated)
- walrus targets
- def/class names, parameters, lambda parameters
- import and from-import names (including aliases)
- for targets (statements and comprehensions), with/except ``as`` targets
- global/nonlocal declarations

``from x import *`` makes the binding set unknowable; the collector flags it
and the missing-name check reports nothing for such snippets.
"""

from __future__ import annotations

from dataclasses import dataclass

from .blocks import Stmt, iter_statements, parse_blocks
from .tokens import Token, TokenKind

_AUGMENTED_OPS = frozenset(
    {"+=", "-=", "*=", "/=", "//=", "**=", "%=", "@=", "&=", "|=", "^=", ">>=", "<<="}
)


@dataclass(frozen=True)
class BindingSite:
    name: str
    line: int
    col: int
    context: str  # assign | walrus | def | class | param | lambda_param |
    #               for_target | comprehension | as_target | import | global


@dataclass(frozen=True)
class NameUse:
    name: str
    line: int
    col: int


@dataclass
class NameTable:
    sites: list[BindingSite]
    uses: list[NameUse]
    has_wildcard_import: bool

    @property
    def bound_names(self) -> set[str]:
        return {s.name for s in self.sites}


def _depths(tokens: list[Token]) -> list[int]:
    depths = []
    depth = 0
    for tok in tokens:
        if tok.kind is TokenKind.OP and tok.text in ("(", "[", "{"):
            depths.append(depth)
            depth += 1
        elif tok.kind is TokenKind.OP and tok.text in (")", "]", "}"):
            depth = max(0, depth - 1)
            depths.append(depth)
        else:
            depths.append(depth)
    return depths


def _is_plain_target(tokens: list[Token], i: int) -> bool:
    """A NAME in target position binds unless it is an attribute/subscript/call."""
    prev = tokens[i - 1] if i > 0 else None
    if prev is not None and prev.kind is TokenKind.OP and prev.text == ".":
        return False
    nxt = tokens[i + 1] if i + 1 < len(tokens) else None
    if nxt is not None and nxt.kind is TokenKind.OP and nxt.text in (".", "[", "("):
        return False
    return True


class _Collector:
    def __init__(self) -> None:
        self.sites: list[BindingSite] = []
        self.seen: set[tuple[int, int]] = set()
        self.wildcard = False

    def add(self, tok: Token, context: str) -> None:
        if (tok.line, tok.col) in self.seen:
            return
        self.seen.add((tok.line, tok.col))
        self.sites.append(BindingSite(tok.text, tok.line, tok.col, context))

    # -- per-statement handlers ----------------------------------------------

    def collect_stmt(self, stmt: Stmt) -> None:
        header = stmt.header
        if not header:
            return
        first = header[0]

        if first.kind is TokenKind.KEYWORD and first.text in ("import", "from"):
            self._imports(header)
            return
        if first.kind is TokenKind.KEYWORD and first.text in ("global", "nonlocal"):
            for tok in header[1:]:
                if tok.kind is TokenKind.NAME:
                    self.add(tok, "global")
            return

        depths = _depths(header)

        if stmt.kind in ("def", "class"):
            self._def_or_class(stmt, header, depths)
        elif stmt.kind == "simple":
            self._assignment_targets(header, depths)

        self._generic(stmt, header, depths)

    def _def_or_class(self, stmt: Stmt, header: list[Token], depths: list[int]) -> None:
        kw = next(i for i, t in enumerate(header) if t.text == stmt.kind)
        for i in range(kw + 1, len(header)):
            if header[i].kind is TokenKind.NAME:
                self.add(header[i], stmt.kind)
                break
        if stmt.kind != "def":
            return
        expect = False
        for i, tok in enumerate(header):
            d = depths[i]
            if tok.kind is TokenKind.OP and tok.text == "(" and d == 0:
                expect = True
            elif d == 0 and tok.kind is TokenKind.OP and tok.text == ")":
                break
            elif d == 1:
                if tok.kind is TokenKind.OP and tok.text == ",":
                    expect = True
                elif tok.kind is TokenKind.OP and tok.text in ("*", "**", "/"):
                    continue
                elif tok.kind is TokenKind.NAME and expect:
                    self.add(tok, "param")
                    expect = False
                elif tok.kind is TokenKind.OP and tok.text in ("=", ":"):
                    expect = False

    def _assignment_targets(self, header: list[Token], depths: list[int]) -> None:
        eq_positions = [
            i
            for i, tok in enumerate(header)
            if tok.kind is TokenKind.OP and tok.text == "=" and depths[i] == 0
        ]
        aug_positions = [
            i
            for i, tok in enumerate(header)
            if tok.kind is TokenKind.OP and tok.text in _AUGMENTED_OPS and depths[i] == 0
        ]

        segments: list[tuple[int, int]] = []
        if eq_positions:
            start = 0
            for pos in eq_positions:
                segments.append((start, pos))
                start = pos + 1
        elif aug_positions:
            segments.append((0, aug_positions[0]))
        else:
            # Bare annotation: NAME ':' ...
            if (
                len(header) >= 2
                and header[0].kind is TokenKind.NAME
                and header[1].kind is TokenKind.OP
                and header[1].text == ":"
                and depths[1] == 0
            ):
                self.add(header[0], "assign")
            return

        for start, stop in segments:
            seg = header[start:stop]
            # Annotated target: bind only the part before the top-level colon.
            for j, tok in enumerate(seg):
                if tok.kind is TokenKind.OP and tok.text == ":" and depths[start + j] == 0:
                    seg = seg[:j]
                    break
            for j, tok in enumerate(seg):
                if tok.kind is TokenKind.NAME and _is_plain_target(seg, j):
                    self.add(tok, "assign")

    def _imports(self, header: list[Token]) -> None:
        is_from = header[0].text == "from"
        try:
            import_idx = next(
                i for i, t in enumerate(header) if t.kind is TokenKind.KEYWORD and t.text == "import"
            )
        except StopIteration:
            return
        names = header[import_idx + 1 :]
        if any(t.kind is TokenKind.OP and t.text == "*" for t in names):
            self.wildcard = True
            return

        # Split on top-level commas; each segment may carry an alias.
        segment: list[Token] = []
        segments: list[list[Token]] = []
        for tok in names:
            if tok.kind is TokenKind.OP and tok.text == ",":
                segments.append(segment)
                segment = []
            elif tok.kind is TokenKind.OP and tok.text in ("(", ")"):
                continue
            else:
                segment.append(tok)
        if segment:
            segments.append(segment)

        for seg in segments:
            alias = None
            for j, tok in enumerate(seg):
                if tok.kind is TokenKind.KEYWORD and tok.text == "as" and j + 1 < len(seg):
                    alias = seg[j + 1]
                    break
            if alias is not None:
                self.add(alias, "import")
            elif is_from:
                for tok in seg:
                    if tok.kind is TokenKind.NAME:
                        self.add(tok, "import")
                        break
            else:
                # `import a.b.c` binds the top package name.
                for tok in seg:
                    if tok.kind is TokenKind.NAME:
                        self.add(tok, "import")
                        break

    def _generic(self, stmt: Stmt, header: list[Token], depths: list[int]) -> None:
        """Walrus, lambda params, for/comprehension targets, `as` targets."""
        n = len(header)
        for i, tok in enumerate(header):
            if tok.kind is TokenKind.OP and tok.text == ":=" and i > 0:
                prev = header[i - 1]
                if prev.kind is TokenKind.NAME:
                    self.add(prev, "walrus")

            elif tok.kind is TokenKind.KEYWORD and tok.text == "lambda":
                d = depths[i]
                expect = True
                for j in range(i + 1, n):
                    if depths[j] < d:
                        break
                    tj = header[j]
                    if depths[j] != d:
                        continue
                    if tj.kind is TokenKind.OP and tj.text == ":":
                        break
                    if tj.kind is TokenKind.OP and tj.text == ",":
                        expect = True
                    elif tj.kind is TokenKind.OP and tj.text in ("*", "**"):
                        continue
                    elif tj.kind is TokenKind.NAME and expect:
                        self.add(tj, "lambda_param")
                        expect = False
                    elif tj.kind is TokenKind.OP and tj.text == "=":
                        expect = False

            elif tok.kind is TokenKind.KEYWORD and tok.text == "for":
                d = depths[i]
                end = None
                for j in range(i + 1, n):
                    if depths[j] == d and header[j].kind is TokenKind.KEYWORD and header[j].text == "in":
                        end = j
                        break
                if end is None:
                    continue
                context = "for_target" if d == 0 and stmt.kind == "for" else "comprehension"
                target = header[i + 1 : end]
                for j, tj in enumerate(target):
                    if tj.kind is TokenKind.NAME and _is_plain_target(target, j):
                        self.add(tj, context)

            elif tok.kind is TokenKind.KEYWORD and tok.text == "as":
                if header[0].kind is TokenKind.KEYWORD and header[0].text in ("import", "from"):
                    continue
                d = depths[i]
                for j in range(i + 1, n):
                    if depths[j] < d:
                        break
                    tj = header[j]
                    if depths[j] == d and tj.kind is TokenKind.OP and tj.text in (",", ":"):
                        break
                    if tj.kind is TokenKind.NAME and _is_plain_target(header, j):
                        self.add(tj, "as_target")


def _collect_uses(stmts: list[Stmt], binding_positions: set[tuple[int, int]]) -> list[NameUse]:
    uses: list[NameUse] = []
    for stmt in iter_statements(stmts):
        header = stmt.header
        if not header:
            continue
        first = header[0]
        if first.kind is TokenKind.KEYWORD and first.text in ("import", "from", "global", "nonlocal"):
            continue
        depths = _depths(header)
        for i, tok in enumerate(header):
            if tok.kind is not TokenKind.NAME:
                continue
            if (tok.line, tok.col) in binding_positions:
                continue
            prev = header[i - 1] if i > 0 else None
            if prev is not None and prev.kind is TokenKind.OP and prev.text == ".":
                continue
            nxt = header[i + 1] if i + 1 < len(header) else None
            if (
                nxt is not None
                and nxt.kind is TokenKind.OP
                and nxt.text == "="
                and depths[i] >= 1
                and prev is not None
                and prev.kind is TokenKind.OP
                and prev.text in ("(", ",")
            ):
                continue  # keyword argument
            uses.append(NameUse(tok.text, tok.line, tok.col))
    uses.sort(key=lambda u: (u.line, u.col))
    return uses


def build_name_table(source: str) -> NameTable:
    """Parse ``source`` and return binding sites plus name uses.

    Raises LexicalError when the source does not tokenize.
    """
    stmts = parse_blocks(source)
    collector = _Collector()
    for stmt in iter_statements(stmts):
        collector.collect_stmt(stmt)
    collector.sites.sort(key=lambda s: (s.line, s.col))
    uses = _collect_uses(stmts, {(s.line, s.col) for s in collector.sites})
    return NameTable(sites=collector.sites, uses=uses, has_wildcard_import=collector.wildcard)
