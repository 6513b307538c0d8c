import json
import re

import pytest

from genregress.report import ReportError, build_report, render_json, render_markdown
from genregress.stats import AspectCounts, TaskPerfVerdict, aspect_deltas

ASPECTS = [
    "IncorrectCode", "SyntaxError", "MissingDeclImport", "CodeDuplication",
    "CommentDuplication", "UnnecessaryElse", "UnnecessaryConditionalBlock",
    "ConfusingVariableNaming", "SubReadableCode",
]


def counts(role, means=None):
    c = AspectCounts(role=role, reps=2, mode="affected_tasks")
    c.means = {name: 0.0 for name in ASPECTS}
    c.means.update(means or {})
    return c


def metadata(total=20):
    return {
        "tool_version": "0.1.0",
        "benchmark": {"name": "mini", "total_tasks": total, "sha256": "0" * 64},
        "models": {"baseline": "store_a", "candidate": "store_b"},
        "reps": 2,
        "aggregation_mode": "affected_tasks",
        "run_config": {"gens": 2, "perf_reps": 5, "timeout_s": 30,
                       "duplication_min_tokens": 10, "alpha": 0.05},
        "timestamps": {"baseline_store_latest": "", "candidate_store_latest": ""},
    }


def sample_report(verdicts=()):
    deltas = aspect_deltas(
        counts("baseline", {"SyntaxError": 1.0}),
        counts("candidate", {"CodeDuplication": 2.0}),
        20,
    )
    return build_report(deltas, list(verdicts), metadata(), ["late snippet for task t9"])


def test_report_has_nine_rows_in_category_order():
    report = sample_report()
    subcats = [d.subcategory for d in report.aspect_deltas]
    assert len(subcats) == 9
    assert subcats[0] == "IncorrectCode"
    assert subcats[1:3] == ["MissingDeclImport", "SyntaxError"]  # Errors, name order
    assert set(subcats) == set(ASPECTS)


def test_missing_aspect_row_rejected():
    deltas = aspect_deltas(counts("baseline"), counts("candidate"), 20)
    with pytest.raises(ReportError, match="missing"):
        build_report(deltas[:-1], [], metadata(), [])


def test_zero_task_benchmark_rejected():
    deltas = aspect_deltas(counts("baseline"), counts("candidate"), 20)
    with pytest.raises(ReportError, match="no tasks"):
        build_report(deltas, [], metadata(total=0), [])


def test_render_json_deterministic():
    verdicts = [TaskPerfVerdict("t1", "time", "improvement", 0.004)]
    assert render_json(sample_report(verdicts)) == render_json(sample_report(verdicts))


def test_render_json_shape_and_rounding():
    doc = json.loads(render_json(sample_report()))
    assert doc["schema_version"] == 1
    rows = {r["subcategory"]: r for r in doc["aspect_deltas"]}
    assert rows["SyntaxError"]["percent"] == 5.0
    assert rows["SyntaxError"]["direction"] == "improvement"
    assert rows["CodeDuplication"]["percent"] == -10.0
    assert rows["CodeDuplication"]["direction"] == "regression"
    assert doc["warnings"] == ["late snippet for task t9"]


def test_verdicts_sorted_by_task_then_metric():
    verdicts = [
        TaskPerfVerdict("t2", "time", "regression", 0.01),
        TaskPerfVerdict("t1", "time", "no_difference", 0.4),
        TaskPerfVerdict("t1", "memory", "equivalent", None),
    ]
    doc = json.loads(render_json(sample_report(verdicts)))
    keys = [(v["task_id"], v["metric"]) for v in doc["perf_verdicts"]]
    assert keys == [("t1", "memory"), ("t1", "time"), ("t2", "time")]


def test_markdown_mirrors_json_numbers():
    verdicts = [TaskPerfVerdict("t3", "memory", "regression", 0.012)]
    report = sample_report(verdicts)
    doc = json.loads(render_json(report))
    text = render_markdown(report)

    for row in doc["aspect_deltas"]:
        pattern = rf"\| {re.escape(row['subcategory'])} \|.*\| {row['percent']:.2f}% \|"
        assert re.search(pattern, text), row["subcategory"]
    for metric in ("time", "memory"):
        ratios = doc["perf_summary"][metric]
        assert f"| {metric} | {ratios['improvement_ratio']:.2f}% | {ratios['regression_ratio']:.2f}% |" in text


def test_markdown_marks_regressions_with_glyph():
    text = render_markdown(sample_report())
    assert "▼ regression" in text
    assert "▲ improvement" in text


def test_percent_formatting_two_decimals():
    text = render_markdown(sample_report())
    assert "| 5.00% |" in text
    assert "| -10.00% |" in text


def test_equivalent_verdict_has_no_p():
    doc = json.loads(render_json(sample_report([TaskPerfVerdict("t1", "time", "equivalent", None)])))
    (verdict,) = doc["perf_verdicts"]
    assert verdict["verdict"] == "equivalent"
    assert verdict["p_value"] is None
