"""Finding record shared by all static checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Subcategory(Enum):
    """Closed set of static quality aspects a check can report."""

    SYNTAX_ERROR = "SyntaxError"
    MISSING_DECL_IMPORT = "MissingDeclImport"
    CODE_DUPLICATION = "CodeDuplication"
    COMMENT_DUPLICATION = "CommentDuplication"
    UNNECESSARY_ELSE = "UnnecessaryElse"
    UNNECESSARY_CONDITIONAL = "UnnecessaryConditionalBlock"
    CONFUSING_NAMING = "ConfusingVariableNaming"
    SUB_READABLE = "SubReadableCode"


# Pseudo-subcategory used only in aggregation: snippets failing their task's
# unit tests. Never produced by the static checks themselves.
INCORRECT_CODE = "IncorrectCode"

ALL_SUBCATEGORIES = tuple(s.value for s in Subcategory)

CATEGORY_OF = {
    INCORRECT_CODE: "General Logic",
    Subcategory.SYNTAX_ERROR.value: "Errors",
    Subcategory.MISSING_DECL_IMPORT.value: "Errors",
    Subcategory.CODE_DUPLICATION.value: "Maintainability",
    Subcategory.COMMENT_DUPLICATION.value: "Maintainability",
    Subcategory.UNNECESSARY_ELSE.value: "Maintainability",
    Subcategory.UNNECESSARY_CONDITIONAL.value: "Maintainability",
    Subcategory.CONFUSING_NAMING.value: "Readability",
    Subcategory.SUB_READABLE.value: "Readability",
}

CATEGORY_ORDER = ("General Logic", "Errors", "Maintainability", "Readability")


@dataclass(frozen=True)
class Finding:
    subcategory: Subcategory
    start_line: int
    end_line: int
    message: str
    detail: dict[str, Any] | None = field(default=None)

    def __post_init__(self) -> None:
        if self.start_line > self.end_line:
            raise ValueError("finding span is inverted")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start_line, self.end_line)

    def to_json(self) -> dict[str, Any]:
        return {
            "subcategory": self.subcategory.value,
            "start_line": self.start_line,
            "end_line": self.end_line,
            "message": self.message,
            "detail": self.detail,
        }

    @classmethod
    def from_json(cls, payload: dict[str, Any]) -> "Finding":
        return cls(
            subcategory=Subcategory(payload["subcategory"]),
            start_line=payload["start_line"],
            end_line=payload["end_line"],
            message=payload["message"],
            detail=payload.get("detail"),
        )


def sort_findings(findings: list[Finding]) -> list[Finding]:
    return sorted(findings, key=lambda f: (f.subcategory.value, f.start_line, f.end_line, f.message))
