"""Comparison mathematics: rank test, difference rates, aggregation.

The Mann-Whitney U statistic for sample ``a`` counts pairs where a > b plus
half of the ties. Small pooled samples get an exact two-sided p-value by
enumerating every assignment of labels to the pooled observations; larger
samples use the normal approximation with tie-corrected variance and a
continuity correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from statistics import median
from typing import Iterable, Optional, Sequence

from .staticcheck.findings import ALL_SUBCATEGORIES, INCORRECT_CODE

EXACT_MAX_POOLED = 14  # full enumeration up to C(14, 7) = 3432 subsets

BASELINE = "baseline"
CANDIDATE = "candidate"
ROLES = (BASELINE, CANDIDATE)

ALL_ASPECTS = (INCORRECT_CODE,) + ALL_SUBCATEGORIES


@dataclass(frozen=True)
class UTestResult:
    u_a: float
    u_b: float
    p_two_sided: float
    method: str  # "exact" | "normal_approx"


def _ranks(values: Sequence[float]) -> list[float]:
    """Mid-ranks (ties share the mean of their rank positions)."""
    order = sorted(range(len(values)), key=values.__getitem__)
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = rank
        i = j + 1
    return ranks


def _tie_term(values: Sequence[float]) -> float:
    counts: dict[float, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    return sum(t**3 - t for t in counts.values())


def _normal_sf(z: float) -> float:
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> UTestResult:
    """Two-sided Mann-Whitney U test for two independent samples.

    Exact p-value (label enumeration over the pooled observations) when
    len(a) + len(b) <= EXACT_MAX_POOLED, otherwise a tie-corrected normal
    approximation with continuity correction. p is clamped to (0, 1].
    """
    n_a, n_b = len(a), len(b)
    if n_a == 0 or n_b == 0:
        raise ValueError("mann_whitney_u requires non-empty samples")

    pooled = list(a) + list(b)
    ranks = _ranks(pooled)
    rank_sum_a = sum(ranks[:n_a])
    u_a = rank_sum_a - n_a * (n_a + 1) / 2
    u_b = n_a * n_b - u_a

    if n_a + n_b <= EXACT_MAX_POOLED:
        p = _exact_two_sided(ranks, n_a, u_a)
        return UTestResult(u_a=u_a, u_b=u_b, p_two_sided=p, method="exact")

    mu = n_a * n_b / 2
    n = n_a + n_b
    tie = _tie_term(pooled)
    var = (n_a * n_b / 12) * ((n + 1) - tie / (n * (n - 1)))
    if var <= 0:
        return UTestResult(u_a=u_a, u_b=u_b, p_two_sided=1.0, method="normal_approx")
    z = (abs(u_a - mu) - 0.5) / math.sqrt(var)
    z = max(z, 0.0)
    p = 2 * _normal_sf(z)
    p = min(1.0, max(p, 5e-324))
    return UTestResult(u_a=u_a, u_b=u_b, p_two_sided=p, method="normal_approx")


def _exact_two_sided(pooled_ranks: Sequence[float], n_a: int, u_obs: float) -> float:
    """p = 2 * min(P(U <= u_obs), P(U >= u_obs)) over all label assignments."""
    n = len(pooled_ranks)
    offset = n_a * (n_a + 1) / 2
    eps = 1e-9
    total = 0
    le = 0
    ge = 0
    for subset in combinations(range(n), n_a):
        u = sum(pooled_ranks[i] for i in subset) - offset
        total += 1
        if u <= u_obs + eps:
            le += 1
        if u >= u_obs - eps:
            ge += 1
    p = 2 * min(le, ge) / total
    return min(1.0, max(p, 5e-324))


# ---------------------------------------------------------------------------
# difference rate
# ---------------------------------------------------------------------------

def percentage_difference(mean_llm: float, mean_llm_prime: float, total_tasks: int) -> float:
    """Difference of mean inefficiency counts, normalized by benchmark size.

    Positive values mean the candidate improves on the baseline.
    """
    if total_tasks < 1:
        raise ValueError("total_tasks must be >= 1")
    value = (mean_llm - mean_llm_prime) / total_tasks * 100
    return 0.0 if value == 0 else value


# ---------------------------------------------------------------------------
# aggregation
# ---------------------------------------------------------------------------

@dataclass
class AspectCounts:
    """Mean per-repetition counts per aspect for one model role."""

    role: str
    reps: int
    mode: str  # "affected_tasks" | "occurrences"
    means: dict[str, float] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class AspectDelta:
    subcategory: str
    baseline_mean: float
    candidate_mean: float
    percent: float
    direction: str  # improvement | regression | unchanged


def direction_of(percent: float) -> str:
    if percent > 0:
        return "improvement"
    if percent < 0:
        return "regression"
    return "unchanged"


def aggregate_findings(
    findings: dict[tuple[str, str, int], list[str]],
    statuses: dict[tuple[str, str, int], str],
    task_ids: Sequence[str],
    reps: int,
    role: str,
    mode: str = "affected_tasks",
) -> AspectCounts:
    """Average per-repetition aspect counts for one role.

    ``findings`` maps (role, task_id, rep) to the subcategory names found in
    that snippet; ``statuses`` maps the same key to the correctness status.
    A missing (task, rep) cell counts only under IncorrectCode and is
    reported as a warning.

    mode="affected_tasks" counts tasks with at least one occurrence per rep;
    mode="occurrences" counts total occurrences per rep.
    """
    if mode not in ("affected_tasks", "occurrences"):
        raise ValueError(f"unknown aggregation mode {mode!r}")
    if reps < 1:
        raise ValueError("reps must be >= 1")

    counts = AspectCounts(role=role, reps=reps, mode=mode)
    per_rep: dict[str, list[float]] = {aspect: [0.0] * reps for aspect in ALL_ASPECTS}

    for task_id in task_ids:
        for rep in range(reps):
            key = (role, task_id, rep)
            status = statuses.get(key)
            if status is None:
                per_rep[INCORRECT_CODE][rep] += 1
                counts.warnings.append(
                    f"missing snippet for role={role} task={task_id} rep={rep}; "
                    f"counted as {INCORRECT_CODE}"
                )
                continue
            if status != "passed":
                per_rep[INCORRECT_CODE][rep] += 1
            snippet_findings = findings.get(key, [])
            if mode == "affected_tasks":
                for aspect in set(snippet_findings):
                    per_rep[aspect][rep] += 1
            else:
                for aspect in snippet_findings:
                    per_rep[aspect][rep] += 1

    counts.means = {aspect: sum(vals) / reps for aspect, vals in per_rep.items()}
    return counts


def aspect_deltas(
    baseline: AspectCounts, candidate: AspectCounts, total_tasks: int
) -> list[AspectDelta]:
    if baseline.reps != candidate.reps:
        raise ValueError(
            f"repetition counts differ between roles: "
            f"{baseline.reps} (baseline) vs {candidate.reps} (candidate)"
        )
    deltas = []
    for aspect in ALL_ASPECTS:
        mean_base = baseline.means.get(aspect, 0.0)
        mean_cand = candidate.means.get(aspect, 0.0)
        percent = percentage_difference(mean_base, mean_cand, total_tasks)
        deltas.append(
            AspectDelta(
                subcategory=aspect,
                baseline_mean=mean_base,
                candidate_mean=mean_cand,
                percent=percent,
                direction=direction_of(percent),
            )
        )
    return deltas


# ---------------------------------------------------------------------------
# performance classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TaskPerfVerdict:
    task_id: str
    metric: str  # "time" | "memory"
    verdict: str  # improvement | regression | no_difference | equivalent
    p_value: Optional[float] = None


def classify_perf(
    samples_baseline: Sequence[float],
    samples_candidate: Sequence[float],
    task_id: str,
    metric: str,
    alpha: float,
) -> TaskPerfVerdict:
    """Verdict for one task/metric from pooled per-execution measurements.

    Lower is better for both metrics. Equal medians with a significant p are
    classified as no_difference (defensively).
    """
    if not samples_baseline or not samples_candidate:
        raise ValueError("classify_perf requires samples for both roles")
    result = mann_whitney_u(list(samples_baseline), list(samples_candidate))
    p = result.p_two_sided
    if p >= alpha:
        return TaskPerfVerdict(task_id, metric, "no_difference", p)
    med_base = median(samples_baseline)
    med_cand = median(samples_candidate)
    if med_cand < med_base:
        return TaskPerfVerdict(task_id, metric, "improvement", p)
    if med_cand > med_base:
        return TaskPerfVerdict(task_id, metric, "regression", p)
    return TaskPerfVerdict(task_id, metric, "no_difference", p)


def equivalent_verdict(task_id: str, metric: str) -> TaskPerfVerdict:
    return TaskPerfVerdict(task_id, metric, "equivalent", None)


def perf_ratios(
    verdicts: Iterable[TaskPerfVerdict], total_tasks: int
) -> dict[str, dict[str, float]]:
    """Improvement/regression ratios per metric, as percents of the benchmark."""
    if total_tasks < 1:
        raise ValueError("total_tasks must be >= 1")
    verdicts = list(verdicts)
    out: dict[str, dict[str, float]] = {}
    for metric in ("time", "memory"):
        improvements = sum(1 for v in verdicts if v.metric == metric and v.verdict == "improvement")
        regressions = sum(1 for v in verdicts if v.metric == metric and v.verdict == "regression")
        out[metric] = {
            "improvement_ratio": improvements / total_tasks * 100,
            "regression_ratio": regressions / total_tasks * 100,
        }
    return out
