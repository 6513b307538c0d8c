"""Regression report assembly and canonical rendering.

``render_json`` is byte-deterministic: keys sorted, percents rounded to two
decimals, LF endings. ``render_markdown`` mirrors the same numbers as a
table grouped by taxonomy category, so the two renderings can be
cross-checked mechanically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .staticcheck.findings import ALL_SUBCATEGORIES, CATEGORY_OF, CATEGORY_ORDER, INCORRECT_CODE
from .stats import AspectDelta, TaskPerfVerdict, perf_ratios

SCHEMA_VERSION = 1

_GLYPH = {"improvement": "▲", "regression": "▼", "unchanged": "·", "no_difference": "·", "equivalent": "="}


class ReportError(ValueError):
    pass


@dataclass(frozen=True)
class RegressionReport:
    metadata: dict[str, Any]
    aspect_deltas: tuple[AspectDelta, ...]
    perf_summary: dict[str, dict[str, float]]
    perf_verdicts: tuple[TaskPerfVerdict, ...]
    warnings: tuple[str, ...]


def build_report(
    deltas: list[AspectDelta],
    verdicts: list[TaskPerfVerdict],
    metadata: dict[str, Any],
    warnings: list[str],
) -> RegressionReport:
    """Assemble the final report; aspect rows ordered by category then name."""
    total_tasks = int(metadata["benchmark"]["total_tasks"])
    if total_tasks < 1:
        raise ReportError("benchmark has no tasks")

    expected = {INCORRECT_CODE, *ALL_SUBCATEGORIES}
    present = {d.subcategory for d in deltas}
    if present != expected:
        missing = sorted(expected - present)
        surplus = sorted(present - expected)
        raise ReportError(f"aspect rows inconsistent: missing={missing} surplus={surplus}")

    ordered = sorted(
        deltas,
        key=lambda d: (CATEGORY_ORDER.index(CATEGORY_OF[d.subcategory]), d.subcategory),
    )
    verdicts_sorted = sorted(verdicts, key=lambda v: (v.task_id, v.metric))
    summary = perf_ratios(verdicts_sorted, total_tasks)
    return RegressionReport(
        metadata=metadata,
        aspect_deltas=tuple(ordered),
        perf_summary=summary,
        perf_verdicts=tuple(verdicts_sorted),
        warnings=tuple(sorted(warnings)),
    )


def _round2(value: float) -> float:
    rounded = round(value, 2)
    return 0.0 if rounded == 0 else rounded


def report_to_dict(report: RegressionReport) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "metadata": report.metadata,
        "aspect_deltas": [
            {
                "category": CATEGORY_OF[d.subcategory],
                "subcategory": d.subcategory,
                "baseline_mean": round(d.baseline_mean, 6),
                "candidate_mean": round(d.candidate_mean, 6),
                "percent": _round2(d.percent),
                "direction": d.direction,
            }
            for d in report.aspect_deltas
        ],
        "perf_summary": {
            metric: {key: _round2(value) for key, value in ratios.items()}
            for metric, ratios in report.perf_summary.items()
        },
        "perf_verdicts": [
            {
                "task_id": v.task_id,
                "metric": v.metric,
                "verdict": v.verdict,
                "p_value": None if v.p_value is None else round(v.p_value, 10),
            }
            for v in report.perf_verdicts
        ],
        "warnings": list(report.warnings),
    }


def render_json(report: RegressionReport) -> bytes:
    doc = report_to_dict(report)
    return (json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def render_markdown(report: RegressionReport) -> str:
    meta = report.metadata
    lines = [
        "# Code Generation Regression Report",
        "",
        f"- benchmark: `{meta['benchmark']['name']}` ({meta['benchmark']['total_tasks']} tasks)",
        f"- baseline: `{meta['models']['baseline']}`",
        f"- candidate: `{meta['models']['candidate']}`",
        f"- aggregation: {meta['aggregation_mode']}, {meta['reps']} repetitions per task",
        "",
        "Positive percentages mean the candidate improves on the baseline.",
        "",
        "## Correctness and Static Quality",
        "",
        "| Category | Aspect | Baseline mean | Candidate mean | Difference | Direction |",
        "|---|---|---:|---:|---:|---|",
    ]
    for delta in report.aspect_deltas:
        lines.append(
            f"| {CATEGORY_OF[delta.subcategory]} "
            f"| {delta.subcategory} "
            f"| {delta.baseline_mean:.2f} "
            f"| {delta.candidate_mean:.2f} "
            f"| {_round2(delta.percent):.2f}% "
            f"| {_GLYPH[delta.direction]} {delta.direction} |"
        )

    lines += ["", "## Performance", ""]
    lines += [
        "| Metric | Improvement ratio | Regression ratio |",
        "|---|---:|---:|",
    ]
    for metric in ("time", "memory"):
        ratios = report.perf_summary[metric]
        lines.append(
            f"| {metric} | {_round2(ratios['improvement_ratio']):.2f}% "
            f"| {_round2(ratios['regression_ratio']):.2f}% |"
        )

    if report.perf_verdicts:
        lines += ["", "### Per-task verdicts", "", "| Task | Metric | Verdict | p |", "|---|---|---|---:|"]
        for verdict in report.perf_verdicts:
            p_text = "" if verdict.p_value is None else f"{verdict.p_value:.4g}"
            lines.append(
                f"| {verdict.task_id} | {verdict.metric} "
                f"| {_GLYPH[verdict.verdict]} {verdict.verdict} | {p_text} |"
            )

    if report.warnings:
        lines += ["", "## Warnings", ""]
        lines += [f"- {w}" for w in report.warnings]

    return "\n".join(lines) + "\n"
