"""Structural equivalence of snippets at the normalized-token level.

Used to skip performance measurement for pairs that cannot differ at
runtime: comments, blank lines, indentation width, and string quote style
are ignored; identifiers, literals, and block structure are not.

``alpha_equivalent`` additionally canonicalizes identifier names (first
occurrence order). It never short-circuits measurement; it only annotates
reports, since renamings are still distinct programs structurally.
"""

from __future__ import annotations

import logging

from .tokens import LexicalError, Token, TokenKind, tokenize

logger = logging.getLogger(__name__)

_QUOTES = ("'''", '"""', "'", '"')


def _canonical_string(text: str) -> tuple[str, str]:
    """(canonical prefix, body) for a string literal lexeme.

    Quote style is erased; escape sequences are kept verbatim. The ``u``
    prefix is dropped (it has no effect); prefix letters are lowered and
    sorted so ``Rb'..'`` equals ``bR'..'``.
    """
    i = 0
    while i < len(text) and text[i] not in "'\"":
        i += 1
    prefix = "".join(sorted(text[:i].lower().replace("u", "")))
    rest = text[i:]
    for quote in _QUOTES:
        if rest.startswith(quote) and rest.endswith(quote) and len(rest) >= 2 * len(quote):
            return prefix, rest[len(quote) : -len(quote)]
    return prefix, rest


def _normalized(tokens: list[Token], rename: bool) -> list[tuple]:
    stream: list[tuple] = []
    name_ids: dict[str, int] = {}
    for tok in tokens:
        if tok.kind is TokenKind.COMMENT:
            continue
        if tok.kind in (TokenKind.NEWLINE, TokenKind.INDENT, TokenKind.DEDENT, TokenKind.EOF):
            stream.append((tok.kind.name,))
        elif tok.kind is TokenKind.STRING:
            stream.append(("STRING", *_canonical_string(tok.text)))
        elif tok.kind is TokenKind.NAME and rename:
            stream.append(("NAME", name_ids.setdefault(tok.text, len(name_ids))))
        else:
            stream.append((tok.kind.name, tok.text))
    return stream


def _streams_equal(a: str, b: str, rename: bool) -> bool:
    try:
        tokens_a = tokenize(a)
        tokens_b = tokenize(b)
    except LexicalError as err:
        logger.warning("equivalence check fell back to 'not equivalent': %s", err)
        return False
    return _normalized(tokens_a, rename) == _normalized(tokens_b, rename)


def normalized_equivalent(a: str, b: str) -> bool:
    """True iff the two sources have identical normalized token streams."""
    return _streams_equal(a, b, rename=False)


def alpha_equivalent(a: str, b: str) -> bool:
    """Equivalence up to consistent identifier renaming."""
    return _streams_equal(a, b, rename=True)
