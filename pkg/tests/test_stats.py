import random

import pytest
from hypothesis import given, settings, strategies as st

from genregress.stats import (
    AspectCounts,
    TaskPerfVerdict,
    aggregate_findings,
    aspect_deltas,
    classify_perf,
    mann_whitney_u,
    percentage_difference,
    perf_ratios,
)

from .oracles import mw_bruteforce


def test_separated_samples_exact():
    result = mann_whitney_u([1, 2, 3], [4, 5, 6])
    assert result.u_a == 0
    assert result.method == "exact"
    assert result.p_two_sided == pytest.approx(0.1, abs=1e-12)


def test_complete_ties():
    result = mann_whitney_u([5, 5], [5, 5])
    assert result.u_a == 2
    assert result.p_two_sided == 1.0


def test_u_identity_holds():
    rng = random.Random(7)
    for _ in range(50):
        a = [rng.randint(0, 5) for _ in range(rng.randint(1, 9))]
        b = [rng.randint(0, 5) for _ in range(rng.randint(1, 9))]
        result = mann_whitney_u(a, b)
        assert result.u_a + result.u_b == len(a) * len(b)


def test_matches_bruteforce_with_ties():
    rng = random.Random(3)
    for _ in range(25):
        a = [float(rng.randint(0, 3)) for _ in range(rng.randint(1, 6))]
        b = [float(rng.randint(0, 3)) for _ in range(rng.randint(1, 6))]
        result = mann_whitney_u(a, b)
        u_ref, p_ref = mw_bruteforce(a, b)
        assert result.u_a == pytest.approx(u_ref, abs=1e-12)
        assert result.p_two_sided == pytest.approx(p_ref, abs=1e-9)


def test_empty_sample_rejected():
    with pytest.raises(ValueError):
        mann_whitney_u([], [1.0])


def test_large_samples_use_normal_approx():
    result = mann_whitney_u(list(range(20)), list(range(5, 25)))
    assert result.method == "normal_approx"
    assert 0 < result.p_two_sided <= 1


@given(
    st.lists(st.floats(min_value=0.1, max_value=1e6, allow_nan=False), min_size=1, max_size=20),
    st.lists(st.floats(min_value=0.1, max_value=1e6, allow_nan=False), min_size=1, max_size=20),
)
@settings(max_examples=60, deadline=None)
def test_p_in_range_and_identity(a, b):
    result = mann_whitney_u(a, b)
    assert 0 < result.p_two_sided <= 1
    assert result.u_a + result.u_b == pytest.approx(len(a) * len(b), abs=1e-9)


@given(
    st.lists(st.integers(1, 50), min_size=2, max_size=10),
    st.lists(st.integers(1, 50), min_size=2, max_size=10),
    st.floats(min_value=0.001, max_value=1000.0),
)
@settings(max_examples=40, deadline=None)
def test_verdicts_scale_invariant(a, b, scale):
    base = classify_perf([float(v) for v in a], [float(v) for v in b], "t", "time", 0.05)
    scaled = classify_perf([v * scale for v in a], [v * scale for v in b], "t", "time", 0.05)
    assert base.verdict == scaled.verdict


# -- percentage difference ------------------------------------------------------

def test_percentage_difference_spec_values():
    assert percentage_difference(10, 5, 100) == pytest.approx(5.0)
    assert percentage_difference(5, 10, 100) == pytest.approx(-5.0)
    assert percentage_difference(0, 0, 164) == 0.0


def test_percentage_difference_zero_tasks():
    with pytest.raises(ValueError):
        percentage_difference(1, 1, 0)


@given(
    st.floats(min_value=0, max_value=500, allow_nan=False),
    st.floats(min_value=0, max_value=500, allow_nan=False),
    st.integers(min_value=1, max_value=2000),
)
def test_percentage_difference_swap_negates(mean_a, mean_b, total):
    forward = percentage_difference(mean_a, mean_b, total)
    backward = percentage_difference(mean_b, mean_a, total)
    assert forward == pytest.approx(-backward, abs=1e-9)


# -- aggregation ----------------------------------------------------------------

def _counts(role, means, reps=2):
    counts = AspectCounts(role=role, reps=reps, mode="affected_tasks")
    counts.means = {name: 0.0 for name in _ALL}
    counts.means.update(means)
    return counts


from genregress.stats import ALL_ASPECTS as _ALL  # noqa: E402


def test_aggregate_affected_tasks_mean():
    findings = {
        ("baseline", "a", 0): ["UnnecessaryElse", "UnnecessaryElse"],
        ("baseline", "b", 0): ["UnnecessaryElse"],
        ("baseline", "c", 0): ["UnnecessaryElse"],
        ("baseline", "a", 1): ["UnnecessaryElse"],
    }
    statuses = {
        (role, task, rep): "passed"
        for role in ("baseline",)
        for task in "abc"
        for rep in (0, 1)
    }
    counts = aggregate_findings(findings, statuses, ["a", "b", "c"], 2, "baseline")
    assert counts.means["UnnecessaryElse"] == 2.0  # (3 + 1) / 2
    assert counts.means["IncorrectCode"] == 0.0


def test_aggregate_occurrence_mode_counts_all():
    findings = {("baseline", "a", 0): ["CodeDuplication", "CodeDuplication"]}
    statuses = {("baseline", "a", 0): "passed"}
    affected = aggregate_findings(findings, statuses, ["a"], 1, "baseline", "affected_tasks")
    occurrences = aggregate_findings(findings, statuses, ["a"], 1, "baseline", "occurrences")
    assert affected.means["CodeDuplication"] == 1.0
    assert occurrences.means["CodeDuplication"] == 2.0


def test_aggregate_missing_snippet_counts_incorrect_only():
    counts = aggregate_findings({}, {}, ["a"], 1, "candidate")
    assert counts.means["IncorrectCode"] == 1.0
    assert sum(v for k, v in counts.means.items() if k != "IncorrectCode") == 0
    assert counts.warnings


def test_rep_mismatch_between_roles_rejected():
    base = _counts("baseline", {}, reps=2)
    cand = _counts("candidate", {}, reps=3)
    with pytest.raises(ValueError):
        aspect_deltas(base, cand, 10)


def test_deltas_cover_all_aspects_and_directions():
    base = _counts("baseline", {"SyntaxError": 2.0})
    cand = _counts("candidate", {"CodeDuplication": 1.0})
    deltas = aspect_deltas(base, cand, 20)
    by_name = {d.subcategory: d for d in deltas}
    assert len(deltas) == 9
    assert by_name["SyntaxError"].percent == pytest.approx(10.0)
    assert by_name["SyntaxError"].direction == "improvement"
    assert by_name["CodeDuplication"].percent == pytest.approx(-5.0)
    assert by_name["CodeDuplication"].direction == "regression"
    assert by_name["IncorrectCode"].direction == "unchanged"


# -- perf classification ----------------------------------------------------------

def test_classify_perf_improvement():
    baseline = [10.0] * 12 + [11.0] * 13
    candidate = [5.0] * 12 + [5.5] * 13
    verdict = classify_perf(baseline, candidate, "t", "time", 0.05)
    assert verdict.verdict == "improvement"
    assert verdict.p_value < 0.05


def test_classify_perf_identical_no_difference():
    verdict = classify_perf([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], "t", "memory", 0.05)
    assert verdict.verdict == "no_difference"
    assert verdict.p_value == 1.0


def test_classify_perf_requires_samples():
    with pytest.raises(ValueError):
        classify_perf([], [1.0], "t", "time", 0.05)


def test_perf_ratios_spec_arithmetic():
    verdicts = (
        [TaskPerfVerdict(f"t{i}", "time", "improvement", 0.01) for i in range(43)]
        + [TaskPerfVerdict("t99", "time", "regression", 0.01)]
    )
    ratios = perf_ratios(verdicts, 164)
    assert ratios["time"]["improvement_ratio"] == pytest.approx(26.2195, abs=1e-3)
    assert ratios["time"]["regression_ratio"] == pytest.approx(0.6097, abs=1e-3)
    assert ratios["memory"]["improvement_ratio"] == 0.0


def test_perf_ratios_swap_exchanges_counts():
    verdicts = [
        TaskPerfVerdict("a", "time", "improvement", 0.01),
        TaskPerfVerdict("b", "time", "regression", 0.02),
        TaskPerfVerdict("c", "memory", "improvement", 0.01),
    ]
    swapped = [
        TaskPerfVerdict(v.task_id, v.metric,
                        {"improvement": "regression", "regression": "improvement"}[v.verdict],
                        v.p_value)
        for v in verdicts
    ]
    forward = perf_ratios(verdicts, 10)
    backward = perf_ratios(swapped, 10)
    for metric in ("time", "memory"):
        assert forward[metric]["improvement_ratio"] == backward[metric]["regression_ratio"]
        assert forward[metric]["regression_ratio"] == backward[metric]["improvement_ratio"]
