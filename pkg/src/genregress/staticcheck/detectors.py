"""Static quality checks over generated snippets.

Each check is registered in ``DETECTOR_REGISTRY`` and reports zero or more
:class:`Finding` values. ``analyze_snippet`` runs the syntax gate first and
short-circuits to a single SyntaxError finding when the snippet does not
parse; the remaining checks assume a parseable snippet.

Trigger conditions here are the tool's contract. They are intentionally
simple, deterministic rules rather than reconstructions of any particular
linter's behavior.
"""

from __future__ import annotations

import logging
import re
from typing import Callable, Optional

from .blocks import Stmt, iter_statements, parse_blocks
from .findings import Finding, Subcategory, sort_findings
from .names import build_name_table
from .tables import AMBIGUOUS_NAMES, BUILTIN_NAMES, MODULE_DUNDERS, SHORT_NAME_ALLOWLIST
from .tokens import LexicalError, Token, TokenKind, lex, tokenize

logger = logging.getLogger(__name__)

MAX_LINE_LENGTH = 100
MAX_NESTING_DEPTH = 4
COMMENT_MIN_CHARS = 3
DEFAULT_DUPLICATION_MIN_TOKENS = 10

_CONTROL_EXIT = frozenset({"return", "raise", "break", "continue"})

# A callable running an exact compile check out of process:
# returns (ok, detail); detail holds the error text when ok is False.
CompileFn = Callable[[str], tuple[bool, str]]


# ---------------------------------------------------------------------------
# syntax
# ---------------------------------------------------------------------------

def check_syntax(
    source: str,
    backend: str = "native",
    compile_fn: Optional[CompileFn] = None,
) -> Optional[Finding]:
    """Return a SyntaxError finding, or None when the snippet parses.

    backend="interp" delegates to ``compile_fn`` (an out-of-process compile
    check); backend="native" applies approximate lexical/structural rules:
    lexical errors, unclosed brackets, suite headers without a body, and
    indentation that does not follow a colon.
    """
    if backend == "interp":
        if compile_fn is None:
            raise ValueError("backend='interp' requires compile_fn")
        ok, detail = compile_fn(source)
        if ok:
            return None
        line = 1
        match = re.search(r"line (\d+)", detail)
        if match:
            line = int(match.group(1))
        return Finding(Subcategory.SYNTAX_ERROR, line, line, f"does not compile: {detail}")
    if backend != "native":
        raise ValueError(f"unknown syntax backend {backend!r}")

    try:
        tokens, unclosed = lex(source)
    except LexicalError as err:
        return Finding(Subcategory.SYNTAX_ERROR, err.line, err.line, err.message)

    if unclosed:
        opener = unclosed[0]
        return Finding(
            Subcategory.SYNTAX_ERROR,
            opener.line,
            opener.line,
            f"bracket {opener.text!r} is never closed",
        )

    # An INDENT is only legal after a logical line ending in ':'.
    last_significant: Optional[Token] = None
    for tok in tokens:
        if tok.kind is TokenKind.INDENT:
            if last_significant is None or not (
                last_significant.kind is TokenKind.OP and last_significant.text == ":"
            ):
                return Finding(Subcategory.SYNTAX_ERROR, tok.line, tok.line, "unexpected indent")
        elif tok.kind not in (TokenKind.NEWLINE, TokenKind.DEDENT, TokenKind.COMMENT, TokenKind.EOF):
            last_significant = tok

    for stmt in iter_statements(parse_blocks(source)):
        if stmt.dangling:
            return Finding(
                Subcategory.SYNTAX_ERROR,
                stmt.start_line,
                stmt.start_line,
                f"suite header {stmt.kind!r} has no body",
            )
    return None


# ---------------------------------------------------------------------------
# missing declarations / imports
# ---------------------------------------------------------------------------

def detect_missing_names(source: str) -> list[Finding]:
    """One finding per distinct name used but bound nowhere in the snippet."""
    table = build_name_table(source)
    if table.has_wildcard_import:
        return []
    bound = table.bound_names
    findings: list[Finding] = []
    reported: set[str] = set()
    for use in table.uses:
        if use.name in reported or use.name in bound:
            continue
        if use.name in BUILTIN_NAMES or use.name in MODULE_DUNDERS:
            continue
        reported.add(use.name)
        findings.append(
            Finding(
                Subcategory.MISSING_DECL_IMPORT,
                use.line,
                use.line,
                f"name {use.name!r} is used but never defined or imported",
                detail={"name": use.name},
            )
        )
    return findings


# ---------------------------------------------------------------------------
# token-level duplication
# ---------------------------------------------------------------------------

def _normalized_stream(tokens: list[Token]) -> list[tuple[str, Token]]:
    """Comment- and layout-free stream with identifier/literal classes."""
    out: list[tuple[str, Token]] = []
    for tok in tokens:
        if tok.kind is TokenKind.NAME:
            out.append(("ID", tok))
        elif tok.kind is TokenKind.NUMBER:
            out.append(("NUM", tok))
        elif tok.kind is TokenKind.STRING:
            out.append(("STR", tok))
        elif tok.kind in (TokenKind.KEYWORD, TokenKind.OP):
            out.append((tok.text, tok))
    return out


def _collapse_overlaps(positions: list[int], length: int) -> list[int]:
    kept: list[int] = []
    for pos in positions:
        if not kept or pos >= kept[-1] + length:
            kept.append(pos)
    return kept


def _repeat_groups_of_length(
    norm: list[str], alive: list[bool], length: int
) -> list[tuple[int, ...]]:
    groups: dict[tuple[str, ...], list[int]] = {}
    n = len(norm)
    for pos in range(n - length + 1):
        if not all(alive[pos : pos + length]):
            continue
        key = tuple(norm[pos : pos + length])
        groups.setdefault(key, []).append(pos)
    out = []
    for positions in groups.values():
        kept = _collapse_overlaps(positions, length)
        if len(kept) >= 2:
            out.append(tuple(kept))
    out.sort()
    return out


def _longest_repeat(
    norm: list[str], alive: list[bool], min_tokens: int
) -> Optional[tuple[int, tuple[int, ...]]]:
    n = len(norm)
    lo, hi = min_tokens, n // 2
    if hi < lo or not _repeat_groups_of_length(norm, alive, lo):
        return None
    # Largest L with a repeated window; existence is monotone decreasing in L.
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _repeat_groups_of_length(norm, alive, mid):
            lo = mid
        else:
            hi = mid - 1
    groups = _repeat_groups_of_length(norm, alive, lo)
    return lo, groups[0]


def detect_code_duplication(
    source: str, min_tokens: int = DEFAULT_DUPLICATION_MIN_TOKENS
) -> list[Finding]:
    """Token-based clone groups of at least ``min_tokens`` normalized tokens.

    Identifiers and literals are normalized to classes, so clones that differ
    only in variable names or literal values are still grouped. Longest
    groups are reported first; their occurrences are then excluded from
    further matching, so nested sub-windows are not re-reported.
    """
    if min_tokens < 2:
        raise ValueError("min_tokens must be >= 2")
    stream = _normalized_stream(tokenize(source))
    norm = [text for text, _ in stream]
    alive = [True] * len(norm)

    findings: list[Finding] = []
    while True:
        best = _longest_repeat(norm, alive, min_tokens)
        if best is None:
            break
        length, positions = best
        for pos in positions:
            for i in range(pos, pos + length):
                alive[i] = False
        occ_lines = [stream[pos][1].line for pos in positions]
        first = positions[0]
        start_line = stream[first][1].line
        end_line = stream[first + length - 1][1].line
        findings.append(
            Finding(
                Subcategory.CODE_DUPLICATION,
                start_line,
                end_line,
                f"{length}-token sequence repeated {len(positions)} times "
                f"(starting on lines {', '.join(map(str, occ_lines))})",
                detail={
                    "token_length": length,
                    "occurrence_count": len(positions),
                    "occurrence_lines": occ_lines,
                },
            )
        )
    findings.sort(key=lambda f: (f.start_line, f.end_line))
    return findings


# ---------------------------------------------------------------------------
# comment duplication
# ---------------------------------------------------------------------------

def _normalize_comment(text: str) -> str:
    return " ".join(text.lstrip("#").split()).casefold()


def detect_comment_duplication(source: str) -> list[Finding]:
    """Duplicate comments after whitespace/case normalization."""
    occurrences: dict[str, list[int]] = {}
    for tok in tokenize(source):
        if tok.kind is not TokenKind.COMMENT:
            continue
        normalized = _normalize_comment(tok.text)
        if len(normalized) < COMMENT_MIN_CHARS:
            continue
        occurrences.setdefault(normalized, []).append(tok.line)

    findings = []
    for text, lines in sorted(occurrences.items(), key=lambda kv: kv[1][0]):
        if len(lines) < 2:
            continue
        findings.append(
            Finding(
                Subcategory.COMMENT_DUPLICATION,
                lines[0],
                lines[0],
                f"comment {text!r} is repeated on lines {', '.join(map(str, lines))}",
                detail={"text": text, "occurrence_lines": lines},
            )
        )
    return findings


# ---------------------------------------------------------------------------
# unnecessary else / unnecessary conditional block
# ---------------------------------------------------------------------------

def _suite_exits(body: list[Stmt]) -> bool:
    if not body:
        return False
    last = body[-1]
    first_tok = last.header[0] if last.header else None
    return (
        first_tok is not None
        and first_tok.kind is TokenKind.KEYWORD
        and first_tok.text in _CONTROL_EXIT
    )


def _suite_span(stmt: Stmt) -> tuple[int, int]:
    if stmt.body:
        return stmt.body[0].start_line, stmt.body[-1].end_line
    return stmt.start_line, stmt.start_line


def detect_unnecessary_else(source: str) -> list[Finding]:
    """Flag else suites whose if/elif branches all end in a control exit."""
    findings = []
    for stmt in iter_statements(parse_blocks(source)):
        if stmt.kind != "if":
            continue
        else_clause = next((c for c in stmt.clauses if c.kind == "else"), None)
        if else_clause is None:
            continue
        branches = [stmt] + [c for c in stmt.clauses if c.kind == "elif"]
        if all(_suite_exits(branch.body) for branch in branches):
            start, end = _suite_span(else_clause)
            findings.append(
                Finding(
                    Subcategory.UNNECESSARY_ELSE,
                    start,
                    end,
                    "else suite is redundant: every preceding branch already exits",
                )
            )
    findings.sort(key=lambda f: f.span)
    return findings


def _returned_bool(body: list[Stmt]) -> Optional[str]:
    """'True'/'False' when the suite is exactly ``return True|False``."""
    if len(body) != 1:
        return None
    header = body[0].header
    if (
        len(header) == 2
        and header[0].kind is TokenKind.KEYWORD
        and header[0].text == "return"
        and header[1].kind is TokenKind.KEYWORD
        and header[1].text in ("True", "False")
    ):
        return header[1].text
    return None


def detect_unnecessary_conditional(source: str) -> list[Finding]:
    """Flag ``if cond: return True|False`` directly followed by the opposite return."""
    findings = []

    def scan_suite(suite: list[Stmt]) -> None:
        for idx, stmt in enumerate(suite):
            if stmt.kind == "if":
                value = _returned_bool(stmt.body)
                if value is not None:
                    opposite = "False" if value == "True" else "True"
                    if not stmt.clauses and idx + 1 < len(suite):
                        follower = suite[idx + 1]
                        if _returned_bool([follower]) == opposite:
                            findings.append(
                                Finding(
                                    Subcategory.UNNECESSARY_CONDITIONAL,
                                    stmt.body[0].start_line,
                                    follower.start_line,
                                    "conditional returns of opposite boolean literals "
                                    "can be a single return",
                                )
                            )
                    elif (
                        len(stmt.clauses) == 1
                        and stmt.clauses[0].kind == "else"
                        and _returned_bool(stmt.clauses[0].body) == opposite
                    ):
                        findings.append(
                            Finding(
                                Subcategory.UNNECESSARY_CONDITIONAL,
                                stmt.body[0].start_line,
                                stmt.clauses[0].body[0].start_line,
                                "conditional returns of opposite boolean literals "
                                "can be a single return",
                            )
                        )
            scan_suite(stmt.body)
            for clause in stmt.clauses:
                scan_suite(clause.body)

    scan_suite(parse_blocks(source))
    findings.sort(key=lambda f: f.span)
    return findings


# ---------------------------------------------------------------------------
# confusing names
# ---------------------------------------------------------------------------

def detect_confusing_names(source: str) -> list[Finding]:
    """Naming hazards at binding sites.

    Rules, first match wins per site: visually ambiguous single letters
    (l/I/O); other single letters outside the loop/math allowlist when not a
    loop or comprehension target; any binding shadowing a builtin.
    """
    table = build_name_table(source)
    findings = []
    for site in table.sites:
        if site.name in AMBIGUOUS_NAMES:
            message = f"name {site.name!r} is easily confused with a digit"
        elif (
            len(site.name) == 1
            and site.name not in SHORT_NAME_ALLOWLIST
            and site.context not in ("for_target", "comprehension")
        ):
            message = f"single-character name {site.name!r} outside a loop target"
        elif site.name in BUILTIN_NAMES:
            message = f"name {site.name!r} shadows a builtin"
        else:
            continue
        findings.append(
            Finding(
                Subcategory.CONFUSING_NAMING,
                site.line,
                site.line,
                message,
                detail={"name": site.name, "context": site.context},
            )
        )
    return findings


# ---------------------------------------------------------------------------
# sub-readable code
# ---------------------------------------------------------------------------

def detect_sub_readable(source: str) -> list[Finding]:
    """Long lines, deep nesting, and ';'-joined statements."""
    findings = []

    normalized = source.replace("\r\n", "\n").replace("\r", "\n")
    for lineno, line in enumerate(normalized.split("\n"), start=1):
        if len(line) > MAX_LINE_LENGTH:
            findings.append(
                Finding(
                    Subcategory.SUB_READABLE,
                    lineno,
                    lineno,
                    f"line is {len(line)} characters long (limit {MAX_LINE_LENGTH})",
                    detail={"reason": "line-length", "length": len(line)},
                )
            )

    for stmt in iter_statements(parse_blocks(source)):
        if stmt.depth == MAX_NESTING_DEPTH and stmt.body:
            start, end = _suite_span(stmt)
            findings.append(
                Finding(
                    Subcategory.SUB_READABLE,
                    start,
                    end,
                    f"suite nested deeper than {MAX_NESTING_DEPTH} levels",
                    detail={"reason": "nesting", "depth": MAX_NESTING_DEPTH + 1},
                )
            )

    tokens = tokenize(source)
    depth = 0
    flagged_lines: set[int] = set()
    for i, tok in enumerate(tokens):
        if tok.kind is TokenKind.OP and tok.text in ("(", "[", "{"):
            depth += 1
        elif tok.kind is TokenKind.OP and tok.text in (")", "]", "}"):
            depth = max(0, depth - 1)
        elif tok.kind is TokenKind.OP and tok.text == ";" and depth == 0:
            nxt = tokens[i + 1] if i + 1 < len(tokens) else None
            if (
                nxt is not None
                and nxt.kind not in (TokenKind.NEWLINE, TokenKind.EOF, TokenKind.COMMENT)
                and tok.line not in flagged_lines
            ):
                flagged_lines.add(tok.line)
                findings.append(
                    Finding(
                        Subcategory.SUB_READABLE,
                        tok.line,
                        tok.line,
                        "multiple statements on one line",
                        detail={"reason": "compound-line"},
                    )
                )

    findings.sort(key=lambda f: (f.start_line, f.end_line, f.message))
    return findings


# ---------------------------------------------------------------------------
# orchestration
# ---------------------------------------------------------------------------

DETECTOR_REGISTRY: dict[str, Callable[[str, dict], list[Finding]]] = {
    "missing_names": lambda src, opts: detect_missing_names(src),
    "code_duplication": lambda src, opts: detect_code_duplication(
        src, opts.get("duplication_min_tokens", DEFAULT_DUPLICATION_MIN_TOKENS)
    ),
    "comment_duplication": lambda src, opts: detect_comment_duplication(src),
    "unnecessary_else": lambda src, opts: detect_unnecessary_else(src),
    "unnecessary_conditional": lambda src, opts: detect_unnecessary_conditional(src),
    "confusing_names": lambda src, opts: detect_confusing_names(src),
    "sub_readable": lambda src, opts: detect_sub_readable(src),
}


def analyze_snippet(
    source: str,
    cfg=None,
    *,
    compile_fn: Optional[CompileFn] = None,
) -> list[Finding]:
    """Run the syntax gate, then every registered check; sorted findings.

    A snippet that fails the syntax gate yields exactly one SyntaxError
    finding. A check that errors out on an otherwise parseable snippet is
    skipped with a warning rather than aborting the analysis.
    """
    backend = "interp" if compile_fn is not None else "native"
    syntax = check_syntax(source, backend=backend, compile_fn=compile_fn)
    if syntax is not None:
        return [syntax]

    opts = {
        "duplication_min_tokens": getattr(
            cfg, "duplication_min_tokens", DEFAULT_DUPLICATION_MIN_TOKENS
        )
        if cfg is not None
        else DEFAULT_DUPLICATION_MIN_TOKENS,
    }
    findings: list[Finding] = []
    for name, detector in DETECTOR_REGISTRY.items():
        try:
            findings.extend(detector(source, opts))
        except LexicalError as err:
            logger.warning("check %s could not tokenize snippet: %s", name, err)
        except Exception:
            logger.warning("check %s failed on snippet", name, exc_info=True)
    return sort_findings(findings)
