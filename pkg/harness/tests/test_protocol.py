"""Protocol conformance for the execution shim.

Golden transcripts: for fixed request fixtures, the exact event sequence
(event name, passed flag, presence of fields) is pinned. Volatile values
(timings, memory, error text) are checked by shape and bounds instead.
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest

HARNESS = Path(__file__).resolve().parents[1] / "harness.py"


def invoke(request, timeout=30):
    proc = subprocess.run(
        [sys.executable, str(HARNESS)],
        input=json.dumps(request),
        capture_output=True,
        text=True,
        timeout=timeout,
    )
    events = [json.loads(line) for line in proc.stdout.splitlines() if line.strip()]
    return proc, events


def transcript(events):
    """Stable view of an event stream: event name plus verdict flag."""
    out = []
    for event in events:
        if "passed" in event:
            out.append((event["event"], event["passed"]))
        else:
            out.append((event["event"],))
    return out


GOLDEN = [
    (
        "compile_ok",
        {"mode": "compile", "source": "def threes(n):\n    return n * 3\n"},
        [("compiled", True)],
    ),
    (
        "compile_broken",
        {"mode": "compile", "source": "def threes(n:\n    return n * 3\n"},
        [("compiled", False)],
    ),
    (
        "compile_empty_module",
        {"mode": "compile", "source": ""},
        [("compiled", True)],
    ),
    (
        "test_passing",
        {
            "mode": "test",
            "source": "def threes(n):\n    return n * 3\n",
            "test_source": "assert threes(2) == 6\nassert threes(0) == 0\n",
            "entry_point": "threes",
        },
        [("compiled", True), ("test_result", True)],
    ),
    (
        "test_failing_assertion",
        {
            "mode": "test",
            "source": "def threes(n):\n    return n + 3\n",
            "test_source": "assert threes(2) == 6\n",
            "entry_point": "threes",
        },
        [("compiled", True), ("test_result", False)],
    ),
    (
        "perf_two_reps",
        {
            "mode": "perf",
            "source": "def threes(n):\n    return n * 3\n",
            "entry_point": "threes",
            "inputs": [[2], [5]],
            "reps": 2,
        },
        [("perf_sample",), ("perf_sample",)],
    ),
]


@pytest.mark.parametrize("name,request_doc,expected", GOLDEN, ids=[g[0] for g in GOLDEN])
def test_golden_transcripts(name, request_doc, expected):
    proc, events = invoke(request_doc)
    assert proc.returncode == 0
    assert transcript(events) == expected


def test_stdout_is_json_lines_only_even_when_user_code_prints():
    proc, events = invoke(
        {
            "mode": "test",
            "source": 'print("chatty snippet")\nflag = True\n',
            "test_source": 'print("chatty test")\nassert flag\n',
            "entry_point": "flag",
        }
    )
    assert proc.returncode == 0
    for line in proc.stdout.splitlines():
        json.loads(line)  # every stdout line parses in isolation
    assert "chatty" not in proc.stdout
    assert "chatty snippet" in proc.stderr
    assert transcript(events) == [("compiled", True), ("test_result", True)]


def test_runtime_exception_names_the_type():
    _, events = invoke(
        {
            "mode": "test",
            "source": "def boom(n):\n    return n / 0\n",
            "test_source": "assert boom(1) == 1\n",
            "entry_point": "boom",
        }
    )
    assert events[-1]["event"] == "test_result"
    assert events[-1]["passed"] is False
    assert events[-1]["detail"].startswith("ZeroDivisionError")


def test_nonzero_system_exit_is_failure():
    _, events = invoke(
        {
            "mode": "test",
            "source": "value = 1\n",
            "test_source": "import sys\nsys.exit(3)\n",
            "entry_point": "value",
        }
    )
    assert events[-1] == {"event": "test_result", "passed": False, "detail": "SystemExit: 3"}


def test_perf_emits_exactly_reps_samples():
    for reps in (1, 5, 9):
        _, events = invoke(
            {
                "mode": "perf",
                "source": "def echo(v):\n    return v\n",
                "entry_point": "echo",
                "inputs": [[1]],
                "reps": reps,
            }
        )
        samples = [e for e in events if e["event"] == "perf_sample"]
        assert len(samples) == reps
        assert [s["exec_index"] for s in samples] == list(range(reps))
        assert all(s["wall_ns"] >= 1 for s in samples)


def test_perf_peak_bytes_tracks_allocation():
    _, events = invoke(
        {
            "mode": "perf",
            "source": "def grab(n):\n    return bytearray(n)\n",
            "entry_point": "grab",
            "inputs": [[10_000_000]],
            "reps": 3,
        }
    )
    samples = [e for e in events if e["event"] == "perf_sample"]
    assert len(samples) == 3
    for sample in samples:
        assert 10_000_000 <= sample["peak_bytes"] <= 12_000_000


def test_perf_missing_entry_point_is_single_error():
    proc, events = invoke(
        {
            "mode": "perf",
            "source": "x = 1\n",
            "entry_point": "nope",
            "inputs": [[1]],
            "reps": 4,
        }
    )
    assert proc.returncode == 0
    assert transcript(events) == [("error",)]
    assert events[0]["detail"] == "entry point not found"


def test_perf_exception_mid_run_aborts_with_error():
    _, events = invoke(
        {
            "mode": "perf",
            "source": (
                "seen = []\n"
                "def tick(v):\n"
                "    seen.append(v)\n"
                "    if len(seen) >= 3:\n"
                "        raise RuntimeError('spent')\n"
                "    return v\n"
            ),
            "entry_point": "tick",
            "inputs": [[1]],
            "reps": 10,
        }
    )
    assert [e["event"] for e in events] == ["error"]


def test_unreadable_request_exits_nonzero():
    proc = subprocess.run(
        [sys.executable, str(HARNESS)],
        input="this is not json",
        capture_output=True,
        text=True,
        timeout=30,
    )
    assert proc.returncode == 2
    events = [json.loads(line) for line in proc.stdout.splitlines()]
    assert events[0]["event"] == "error"


def test_unknown_mode_exits_nonzero():
    proc, events = invoke({"mode": "dance", "source": ""})
    assert proc.returncode == 2
    assert events[0]["event"] == "error"


def test_wall_time_scales_with_work():
    def median_wall(inner):
        _, events = invoke(
            {
                "mode": "perf",
                "source": (
                    "def spin(n):\n"
                    "    total = 0\n"
                    "    for i in range(n):\n"
                    "        total += i\n"
                    "    return total\n"
                ),
                "entry_point": "spin",
                "inputs": [[inner]],
                "reps": 5,
            }
        )
        walls = sorted(e["wall_ns"] for e in events if e["event"] == "perf_sample")
        return walls[len(walls) // 2]

    assert median_wall(200_000) > median_wall(100) * 5
