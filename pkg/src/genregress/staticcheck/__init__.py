"""Native static analysis for generated Python snippets."""

from .blocks import Stmt, parse_blocks
from .detectors import (
    DETECTOR_REGISTRY,
    analyze_snippet,
    check_syntax,
    detect_code_duplication,
    detect_comment_duplication,
    detect_confusing_names,
    detect_missing_names,
    detect_sub_readable,
    detect_unnecessary_conditional,
    detect_unnecessary_else,
)
from .equivalence import alpha_equivalent, normalized_equivalent
from .findings import (
    ALL_SUBCATEGORIES,
    CATEGORY_OF,
    CATEGORY_ORDER,
    INCORRECT_CODE,
    Finding,
    Subcategory,
    sort_findings,
)
from .tokens import LexicalError, Token, TokenKind, tokenize

__all__ = [
    "ALL_SUBCATEGORIES",
    "CATEGORY_OF",
    "CATEGORY_ORDER",
    "DETECTOR_REGISTRY",
    "Finding",
    "INCORRECT_CODE",
    "LexicalError",
    "Stmt",
    "Subcategory",
    "Token",
    "TokenKind",
    "alpha_equivalent",
    "analyze_snippet",
    "check_syntax",
    "detect_code_duplication",
    "detect_comment_duplication",
    "detect_confusing_names",
    "detect_missing_names",
    "detect_sub_readable",
    "detect_unnecessary_conditional",
    "detect_unnecessary_else",
    "normalized_equivalent",
    "parse_blocks",
    "sort_findings",
    "tokenize",
]
