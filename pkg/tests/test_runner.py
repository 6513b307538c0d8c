import time

import pytest

from genregress.benchmark import Task
from genregress.genclient import Snippet
from genregress.runner import (
    CorrectnessResult,
    HarnessError,
    PrePerfGate,
    ProfilingError,
    SandboxPolicy,
    compile_check,
    default_harness_path,
    extract_call_inputs,
    plan_perf_tasks,
    profile_snippet,
    run_correctness,
)


@pytest.fixture(scope="module")
def policy():
    path = default_harness_path()
    assert path.exists(), f"harness missing at {path}"
    return SandboxPolicy(timeout_s=4, harness_path=path)


TASK = Task(
    "t_add",
    "Write add(a, b) returning the sum.",
    "add",
    "assert add(1, 2) == 3\nassert add(-1, 1) == 0\n",
)


def snippet(source, role="baseline", rep=0, task_id="t_add"):
    return Snippet.create(role, task_id, rep, f"```python\n{source.rstrip()}\n```")


def test_passing_snippet(policy):
    result = run_correctness(snippet("def add(a, b):\n    return a + b\n"), TASK, policy)
    assert result.status == "passed"
    assert (result.model_role, result.task_id, result.rep_index) == ("baseline", "t_add", 0)


def test_failing_assertion(policy):
    result = run_correctness(snippet("def add(a, b):\n    return a - b\n"), TASK, policy)
    assert result.status == "failed"
    assert "AssertionError" in result.failure_detail


def test_runtime_error(policy):
    result = run_correctness(snippet("def add(a, b):\n    return a / 0\n"), TASK, policy)
    assert result.status == "runtime_error"
    assert "ZeroDivisionError" in result.failure_detail


def test_syntax_error(policy):
    result = run_correctness(snippet("def add(a, b:\n    return 1\n"), TASK, policy)
    assert result.status == "syntax_error"


def test_timeout_and_recovery(policy):
    looper = snippet("def add(a, b):\n    while True:\n        pass\n")
    start = time.monotonic()
    result = run_correctness(looper, TASK, policy)
    elapsed = time.monotonic() - start
    assert result.status == "timeout"
    assert elapsed < policy.timeout_s + 2

    # A hanging snippet must not poison subsequent executions.
    after = run_correctness(snippet("def add(a, b):\n    return a + b\n"), TASK, policy)
    assert after.status == "passed"


def test_missing_harness_is_infrastructure_error(tmp_path):
    bad = SandboxPolicy(timeout_s=2, harness_path=tmp_path / "nope.py")
    with pytest.raises(HarnessError):
        run_correctness(snippet("x = 1\n"), TASK, bad)


def test_compile_check(policy):
    assert compile_check("x = 1\n", policy) == (True, "")
    ok, detail = compile_check("def f(:", policy)
    assert not ok
    assert "line 1" in detail


def test_plan_perf_tasks_intersection():
    results = [
        CorrectnessResult("baseline", "a", 0, "passed"),
        CorrectnessResult("candidate", "a", 0, "passed"),
        CorrectnessResult("baseline", "b", 0, "passed"),
        CorrectnessResult("candidate", "b", 0, "failed"),
        CorrectnessResult("candidate", "c", 0, "passed"),
    ]
    assert plan_perf_tasks(results, ["a", "b", "c"]) == ["a"]
    assert plan_perf_tasks([], ["a"]) == []


def test_extract_call_inputs_literals():
    tests = (
        "assert add(1, 2) == 3\n"
        "assert add(-1, 1) == 0\n"
        'assert add("a", "b") == "ab"\n'
        "assert add([1], [2]) == [1, 2]\n"
    )
    assert extract_call_inputs(tests, "add") == [[1, 2], [-1, 1], ["a", "b"], [[1], [2]]]


def test_extract_call_inputs_skips_nonliteral():
    tests = "assert add(helper(1), 2) == 3\nassert add(3, 4) == 7\n"
    assert extract_call_inputs(tests, "add") == [[3, 4]]


def test_extract_call_inputs_ignores_attribute_calls():
    tests = "assert obj.add(1, 2) == 3\n"
    assert extract_call_inputs(tests, "add") == []


def test_profile_produces_requested_samples(policy):
    snip = snippet("def add(a, b):\n    return a + b\n")
    correctness = run_correctness(snip, TASK, policy)
    samples = profile_snippet(snip, TASK, 5, policy, correctness=correctness)
    assert len(samples) == 5
    assert [s.exec_index for s in samples] == list(range(5))
    assert all(s.wall_ns > 0 and s.peak_bytes >= 0 for s in samples)
    assert all(s.input_set == "unit_tests" for s in samples)


def test_profile_tracks_large_allocations(policy):
    task = Task("t_buf", "Allocate n bytes.", "make_buffer", "assert len(make_buffer(10000000)) == 10000000")
    snip = snippet("def make_buffer(n):\n    return bytearray(n)\n", task_id="t_buf")
    correctness = run_correctness(snip, task, policy)
    assert correctness.status == "passed"
    samples = profile_snippet(snip, task, 3, policy, correctness=correctness)
    assert all(10_000_000 <= s.peak_bytes <= 12_000_000 for s in samples)


def test_gate_violation_raises(policy):
    snip = snippet("def add(a, b):\n    return a - b\n")
    failing = run_correctness(snip, TASK, policy)
    with pytest.raises(PrePerfGate):
        profile_snippet(snip, TASK, 2, policy, correctness=failing)


def test_gate_rejects_mismatched_result(policy):
    snip = snippet("def add(a, b):\n    return a + b\n")
    other = CorrectnessResult("baseline", "other_task", 0, "passed")
    with pytest.raises(PrePerfGate):
        profile_snippet(snip, TASK, 2, policy, correctness=other)


def test_profiling_failure_discards_samples(policy):
    task = Task("t_flaky", "p", "flaky", "assert flaky(1) == 1")
    snip = snippet(
        "calls = []\n"
        "def flaky(v):\n"
        "    calls.append(v)\n"
        "    if len(calls) > 2:\n"
        "        raise RuntimeError('worn out')\n"
        "    return v\n",
        task_id="t_flaky",
    )
    correctness = run_correctness(snip, task, policy)
    assert correctness.status == "passed"
    with pytest.raises(ProfilingError):
        profile_snippet(snip, task, 5, policy, correctness=correctness)
