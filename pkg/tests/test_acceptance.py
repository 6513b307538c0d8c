"""Acceptance suite: one test per release criterion, at pinned tolerances.

Each test prints a [PASS]/[FAIL] line via the conftest hook. The end-to-end
criteria run the real CLI against the bundled mini-benchmark fixtures.
"""

import json
import random
import time
from types import SimpleNamespace

import pytest

from genregress.cli import main
from genregress.runner import SandboxPolicy, default_harness_path, run_correctness
from genregress.staticcheck import analyze_snippet
from genregress.stats import mann_whitney_u, percentage_difference
from genregress.benchmark import Task
from genregress.genclient import Snippet

from .corpus import CASES
from .oracles import mw_bruteforce, mw_exact_p_tiefree

EXPECTED_MINIBENCH_PERCENTS = {
    "IncorrectCode": -20.0,
    "SyntaxError": -5.0,
    "MissingDeclImport": -5.0,
    "CodeDuplication": -5.0,
    "CommentDuplication": -5.0,
    "UnnecessaryElse": -5.0,
    "UnnecessaryConditionalBlock": -5.0,
    "ConfusingVariableNaming": -2.5,
    "SubReadableCode": -5.0,
}


def test_mann_whitney_exact_matches_enumeration_oracle():
    """Exact path == brute-force enumeration for all n_a, n_b <= 7; fast."""
    started = time.monotonic()
    rng = random.Random(20260808)
    checked = 0
    for n_a in range(1, 8):
        for n_b in range(1, 8):
            datasets = [
                [rng.uniform(0, 100) for _ in range(n_a + n_b)],  # tie-free w.p. 1
                [float(rng.randint(0, 3)) for _ in range(n_a + n_b)],  # heavy ties
            ]
            for pooled in datasets:
                a, b = pooled[:n_a], pooled[n_a:]
                result = mann_whitney_u(a, b)
                assert result.method == "exact"
                assert result.u_a + result.u_b == n_a * n_b  # U-identity, exact
                u_ref, p_ref = mw_bruteforce(a, b)
                assert abs(result.u_a - u_ref) <= 1e-12
                assert abs(result.p_two_sided - p_ref) <= 1e-9
                checked += 1

    # Normal approximation within 0.02 of the exact p for tie-free sizes
    # 8..12, exhaustively over every achievable U value. Tie-free samples
    # realizing a target u: b sits on even integers, each a element between
    # two b's (c_i smaller b's below it), so u = sum(c_i) by construction.
    def samples_with_u(n_a, n_b, u):
        full, rest = divmod(u, n_b)
        cs = [n_b] * full + ([rest] if rest else []) + [0] * (n_a - full - (1 if rest else 0))
        b = [float(2 * (j + 1)) for j in range(n_b)]
        a = [2 * c + 1 - 0.01 * j for j, c in enumerate(cs)]
        return a, b

    approx_checked = 0
    for n_a, n_b in [(8, 8), (8, 12), (10, 10), (12, 8), (12, 12)]:
        for u in range(n_a * n_b + 1):
            a, b = samples_with_u(n_a, n_b, u)
            result = mann_whitney_u(a, b)
            assert result.method == "normal_approx"
            assert result.u_a == u
            exact = mw_exact_p_tiefree(n_a, n_b, result.u_a)
            assert abs(result.p_two_sided - exact) <= 0.02, (n_a, n_b, u)
            approx_checked += 1

    elapsed = time.monotonic() - started
    assert checked == 49 * 2
    assert approx_checked == sum(n * m + 1 for n, m in [(8, 8), (8, 12), (10, 10), (12, 8), (12, 12)])
    assert elapsed < 30, f"Mann-Whitney acceptance took {elapsed:.1f}s"


def test_detector_corpus_exact_agreement():
    """>= 40 labeled snippets; exact subcategory and span agreement."""
    assert len(CASES) >= 40
    per_subcategory: dict[str, int] = {}
    for case in CASES:
        prefix = case.name.split("_")[0]
        per_subcategory[prefix] = per_subcategory.get(prefix, 0) + 1
    # cases per detector family, negatives included
    assert all(count >= 4 for count in per_subcategory.values()), per_subcategory

    names = {c.name for c in CASES}
    assert "ucb_sibling_return" in names  # the custom if/return-literal rule
    assert {"dup_boundary_at_10", "dup_boundary_at_12", "dup_boundary_absent_at_13"} <= names

    mismatches = []
    for case in CASES:
        cfg = SimpleNamespace(duplication_min_tokens=case.min_tokens)
        got = sorted(
            (f.subcategory.value, f.start_line, f.end_line)
            for f in analyze_snippet(case.source, cfg)
        )
        if got != sorted(case.expected):
            mismatches.append((case.name, got, sorted(case.expected)))
    assert not mismatches, mismatches


def test_percentage_difference_suite():
    assert percentage_difference(10, 5, 100) == pytest.approx(5.00, abs=1e-12)
    assert percentage_difference(5, 10, 100) == pytest.approx(-5.00, abs=1e-12)
    assert percentage_difference(0, 0, 164) == 0.0

    rng = random.Random(99)
    for _ in range(1000):
        mean_a = rng.uniform(0, 200)
        mean_b = rng.uniform(0, 200)
        total = rng.randint(1, 1200)
        forward = percentage_difference(mean_a, mean_b, total)
        backward = percentage_difference(mean_b, mean_a, total)
        assert forward == pytest.approx(-backward, abs=1e-9)


def _analyze(fixtures_dir, out_dir, swap=False):
    store_a = fixtures_dir / ("store_b" if swap else "store_a")
    store_b = fixtures_dir / ("store_a" if swap else "store_b")
    rc = main(
        [
            "analyze",
            "--benchmark", str(fixtures_dir / "benchmark.jsonl"),
            "--store-a", str(store_a),
            "--store-b", str(store_b),
            "--out", str(out_dir),
        ]
    )
    assert rc == 0
    return json.loads((out_dir / "report.json").read_text(encoding="utf-8"))


def test_end_to_end_offline_analysis(fixtures_dir, tmp_path):
    """Byte-identical reports; injected defects at hand-computed percents."""
    started = time.monotonic()

    doc = _analyze(fixtures_dir, tmp_path / "first")
    _analyze(fixtures_dir, tmp_path / "second")
    first = (tmp_path / "first" / "report.json").read_bytes()
    second = (tmp_path / "second" / "report.json").read_bytes()
    assert first == second, "report.json differs between identical analyze runs"

    rows = {r["subcategory"]: r for r in doc["aspect_deltas"]}
    assert set(rows) == set(EXPECTED_MINIBENCH_PERCENTS)
    for name, expected in EXPECTED_MINIBENCH_PERCENTS.items():
        assert rows[name]["percent"] == expected, name  # counts are integers: exact
        assert rows[name]["direction"] == "regression", name

    swapped = _analyze(fixtures_dir, tmp_path / "swapped", swap=True)
    swapped_rows = {r["subcategory"]: r for r in swapped["aspect_deltas"]}
    for name, expected in EXPECTED_MINIBENCH_PERCENTS.items():
        assert swapped_rows[name]["percent"] == -expected, name
        assert swapped_rows[name]["direction"] == "improvement", name

    elapsed = time.monotonic() - started
    assert elapsed < 120, f"offline analysis took {elapsed:.1f}s (budget 120s)"


def test_gate_soundness_and_equivalence_guard(fixtures_dir, tmp_path):
    """Profiled run: gate excludes one-sided tasks; equivalent pairs skip sampling."""
    started = time.monotonic()
    out = tmp_path / "perf_run"
    rc = main(
        [
            "run", "--offline",
            "--benchmark", str(fixtures_dir / "benchmark.jsonl"),
            "--store-a", str(fixtures_dir / "store_a"),
            "--store-b", str(fixtures_dir / "store_b"),
            "--out", str(out),
        ]
    )
    assert rc == 0
    doc = json.loads((out / "report.json").read_text(encoding="utf-8"))
    perf = json.loads((out / "perf_samples.json").read_text(encoding="utf-8"))

    verdicts = {(v["task_id"], v["metric"]): v for v in doc["perf_verdicts"]}
    sampled_tasks = {s["task_id"] for s in perf["samples"]}

    # Tasks where only one store passes produce no verdicts and no samples.
    for gated in ("t01", "t02", "t09", "t11"):
        assert not [k for k in verdicts if k[0] == gated], gated
        assert gated not in sampled_tasks, gated

    # Snippets identical modulo comments/blank lines: equivalent, never sampled.
    for task_id in ("t10", "t16", "t17", "t18", "t19", "t20"):
        for metric in ("time", "memory"):
            verdict = verdicts[(task_id, metric)]
            assert verdict["verdict"] == "equivalent", (task_id, metric)
            assert verdict["p_value"] is None
        assert task_id not in sampled_tasks, task_id

    # Engineered performance differences classify as expected at perf_reps=5.
    assert verdicts[("t12", "time")]["verdict"] == "regression"
    assert verdicts[("t13", "time")]["verdict"] == "improvement"
    assert verdicts[("t14", "memory")]["verdict"] == "regression"
    for key in (("t12", "time"), ("t13", "time"), ("t14", "memory")):
        assert verdicts[key]["p_value"] < 0.05

    # The large-inputs path was exercised for the task that provides them.
    assert perf["input_sets"]["t15"] == "large_inputs"
    assert any(s["task_id"] == "t15" and s["input_set"] == "large_inputs" for s in perf["samples"])

    elapsed = time.monotonic() - started
    assert elapsed < 600, f"profiled run took {elapsed:.1f}s (budget 600s)"


def test_timeout_enforcement():
    """An endless snippet times out promptly and does not block the rest."""
    policy = SandboxPolicy(timeout_s=2, harness_path=default_harness_path())
    task = Task("t_spin", "p", "spin", "assert spin(1) == 1")
    hanging = Snippet.create("baseline", "t_spin", 0, "def spin(v):\n    while True:\n        pass\n")
    honest = Snippet.create("baseline", "t_spin", 1, "def spin(v):\n    return v\n")

    started = time.monotonic()
    result = run_correctness(hanging, task, policy)
    elapsed = time.monotonic() - started
    assert result.status == "timeout"
    assert elapsed <= policy.timeout_s + 2, f"timeout took {elapsed:.1f}s"

    follow_up = run_correctness(honest, task, policy)
    assert follow_up.status == "passed"
