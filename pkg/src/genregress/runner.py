"""Sandboxed snippet execution: correctness runs and performance profiling.

Every execution is one harness subprocess in its own session (process
group), a fresh temporary working directory, and a minimal environment.
Timeouts kill the whole group, so a hanging snippet cannot stall the run or
leak children. Profiling additionally serializes through a module-wide lock:
at most one measured execution machine-wide.
"""

from __future__ import annotations

import ast
import json
import logging
import os
import shutil
import signal
import subprocess
import sys
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .benchmark import Task, load_large_inputs
from .genclient import Snippet
from .staticcheck.tokens import LexicalError, TokenKind, tokenize

logger = logging.getLogger(__name__)

_MEASUREMENT_LOCK = threading.Lock()

HARNESS_ENV_VAR = "GENREGRESS_HARNESS"


class HarnessError(RuntimeError):
    """Infrastructure fault: spawn failure or malformed harness output."""


class PrePerfGate(RuntimeError):
    """Profiling was requested for a snippet that never passed correctness."""


class ProfilingError(RuntimeError):
    """A profiled execution failed or timed out; its samples are discarded."""


def default_harness_path() -> Path:
    """Harness location: env override, else the repo-relative default."""
    env = os.environ.get(HARNESS_ENV_VAR)
    if env:
        return Path(env)
    return Path(__file__).resolve().parents[2] / "harness" / "harness.py"


@dataclass(frozen=True)
class SandboxPolicy:
    timeout_s: int = 30
    harness_path: Path = field(default_factory=default_harness_path)
    interpreter: str = sys.executable

    def __post_init__(self) -> None:
        if self.timeout_s < 1:
            raise ValueError("timeout_s must be >= 1")


@dataclass(frozen=True)
class CorrectnessResult:
    model_role: str
    task_id: str
    rep_index: int
    status: str  # passed | failed | syntax_error | runtime_error | timeout
    failure_detail: str = ""

    def to_json(self) -> dict[str, Any]:
        return {
            "model_role": self.model_role,
            "task_id": self.task_id,
            "rep_index": self.rep_index,
            "status": self.status,
            "failure_detail": self.failure_detail,
        }

    @classmethod
    def from_json(cls, payload: dict[str, Any]) -> "CorrectnessResult":
        return cls(
            model_role=payload["model_role"],
            task_id=payload["task_id"],
            rep_index=int(payload["rep_index"]),
            status=payload["status"],
            failure_detail=payload.get("failure_detail", ""),
        )


@dataclass(frozen=True)
class PerfSample:
    model_role: str
    task_id: str
    rep_index: int
    input_set: str  # "unit_tests" | "large_inputs"
    exec_index: int
    wall_ns: int
    peak_bytes: int

    def to_json(self) -> dict[str, Any]:
        return {
            "model_role": self.model_role,
            "task_id": self.task_id,
            "rep_index": self.rep_index,
            "input_set": self.input_set,
            "exec_index": self.exec_index,
            "wall_ns": self.wall_ns,
            "peak_bytes": self.peak_bytes,
        }

    @classmethod
    def from_json(cls, payload: dict[str, Any]) -> "PerfSample":
        return cls(
            model_role=payload["model_role"],
            task_id=payload["task_id"],
            rep_index=int(payload["rep_index"]),
            input_set=payload["input_set"],
            exec_index=int(payload["exec_index"]),
            wall_ns=int(payload["wall_ns"]),
            peak_bytes=int(payload["peak_bytes"]),
        )


# ---------------------------------------------------------------------------
# subprocess plumbing
# ---------------------------------------------------------------------------

def _sandbox_env(workdir: str) -> dict[str, str]:
    env = {
        "PATH": os.environ.get("PATH", "/usr/bin:/bin"),
        "HOME": workdir,
        "TMPDIR": workdir,
        "PYTHONDONTWRITEBYTECODE": "1",
        "PYTHONHASHSEED": "0",
        "LC_ALL": "C.UTF-8",
    }
    return env


def _invoke_harness(
    request: dict[str, Any], policy: SandboxPolicy
) -> Optional[list[dict[str, Any]]]:
    """Run one harness request; parsed events, or None on timeout.

    Raises HarnessError for spawn failures, non-zero harness exits, and
    unparseable output.
    """
    if not policy.harness_path.exists():
        raise HarnessError(f"harness not found at {policy.harness_path}")

    workdir = tempfile.mkdtemp(prefix="genregress-run-")
    try:
        try:
            proc = subprocess.Popen(
                [policy.interpreter, str(policy.harness_path)],
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.PIPE,
                cwd=workdir,
                env=_sandbox_env(workdir),
                start_new_session=True,
                text=True,
            )
        except OSError as err:
            raise HarnessError(f"cannot spawn harness: {err}") from err

        try:
            stdout, stderr = proc.communicate(json.dumps(request), timeout=policy.timeout_s)
        except subprocess.TimeoutExpired:
            _kill_process_group(proc)
            return None

        if proc.returncode != 0:
            raise HarnessError(
                f"harness exited with {proc.returncode}: {stderr.strip()[:300]}"
            )
        events = []
        for line in stdout.splitlines():
            if not line.strip():
                continue
            try:
                events.append(json.loads(line))
            except json.JSONDecodeError as err:
                raise HarnessError(f"malformed harness output line: {line[:200]}") from err
        if not events:
            raise HarnessError("harness produced no events")
        return events
    finally:
        shutil.rmtree(workdir, ignore_errors=True)


def _kill_process_group(proc: subprocess.Popen) -> None:
    try:
        os.killpg(os.getpgid(proc.pid), signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        pass
    try:
        proc.communicate(timeout=5)
    except subprocess.TimeoutExpired:  # pragma: no cover - SIGKILL cannot be ignored
        proc.kill()


# ---------------------------------------------------------------------------
# correctness
# ---------------------------------------------------------------------------

_TEST_FAILURE_PREFIXES = ("AssertionError", "SystemExit")


def run_correctness(snippet: Snippet, task: Task, policy: SandboxPolicy) -> CorrectnessResult:
    """Execute the snippet against the task's unit tests in a sandbox."""
    request = {
        "mode": "test",
        "source": snippet.source,
        "test_source": task.test_source,
        "entry_point": task.entry_point,
    }
    events = _invoke_harness(request, policy)
    ref = (snippet.model_role, task.task_id, snippet.rep_index)
    if events is None:
        return CorrectnessResult(*ref, status="timeout", failure_detail=f"no result within {policy.timeout_s}s")

    compiled = next((e for e in events if e.get("event") == "compiled"), None)
    if compiled is not None and not compiled.get("passed", False):
        return CorrectnessResult(*ref, status="syntax_error", failure_detail=compiled.get("detail", ""))

    result = next((e for e in events if e.get("event") == "test_result"), None)
    if result is None:
        raise HarnessError(f"no test_result event for {ref}: {events}")
    if result.get("passed", False):
        return CorrectnessResult(*ref, status="passed")
    detail = result.get("detail", "")
    if detail.startswith(_TEST_FAILURE_PREFIXES):
        return CorrectnessResult(*ref, status="failed", failure_detail=detail)
    return CorrectnessResult(*ref, status="runtime_error", failure_detail=detail)


def compile_check(source: str, policy: SandboxPolicy) -> tuple[bool, str]:
    """Exact compile verdict via the harness; backs the interp syntax backend."""
    events = _invoke_harness({"mode": "compile", "source": source}, policy)
    if events is None:
        return False, f"compile check timed out after {policy.timeout_s}s"
    compiled = next((e for e in events if e.get("event") == "compiled"), None)
    if compiled is None:
        raise HarnessError(f"no compiled event: {events}")
    return bool(compiled.get("passed", False)), compiled.get("detail", "")


# ---------------------------------------------------------------------------
# perf planning and profiling
# ---------------------------------------------------------------------------

def plan_perf_tasks(results: list[CorrectnessResult], task_ids: list[str]) -> list[str]:
    """Tasks where both roles have at least one passing snippet, sorted."""
    passed: dict[str, set[str]] = {}
    for result in results:
        if result.status == "passed":
            passed.setdefault(result.task_id, set()).add(result.model_role)
    return sorted(
        task_id
        for task_id in task_ids
        if passed.get(task_id, set()) >= {"baseline", "candidate"}
    )


def extract_call_inputs(test_source: str, entry_point: str) -> list[list[Any]]:
    """Literal positional argument lists of direct entry-point calls.

    Calls with non-literal or keyword arguments are skipped; duplicates are
    kept (each call is one input).
    """
    try:
        tokens = [t for t in tokenize(test_source) if t.kind is not TokenKind.COMMENT]
    except LexicalError:
        return []
    inputs: list[list[Any]] = []
    for i, tok in enumerate(tokens):
        if tok.kind is not TokenKind.NAME or tok.text != entry_point:
            continue
        prev = tokens[i - 1] if i > 0 else None
        if prev is not None and prev.kind is TokenKind.OP and prev.text == ".":
            continue
        nxt = tokens[i + 1] if i + 1 < len(tokens) else None
        if nxt is None or nxt.kind is not TokenKind.OP or nxt.text != "(":
            continue

        depth = 0
        arg_tokens = []
        for j in range(i + 1, len(tokens)):
            t = tokens[j]
            if t.kind is TokenKind.OP and t.text in ("(", "[", "{"):
                depth += 1
            elif t.kind is TokenKind.OP and t.text in (")", "]", "}"):
                depth -= 1
                if depth == 0:
                    break
            if j > i + 1:
                arg_tokens.append(t)
        else:
            continue

        pieces: list[list[str]] = [[]]
        inner_depth = 0
        for t in arg_tokens:
            if t.kind is TokenKind.OP and t.text in ("(", "[", "{"):
                inner_depth += 1
            elif t.kind is TokenKind.OP and t.text in (")", "]", "}"):
                inner_depth -= 1
            if t.kind is TokenKind.OP and t.text == "," and inner_depth == 0:
                pieces.append([])
            else:
                pieces[-1].append(t.text)
        pieces = [p for p in pieces if p]

        args = []
        ok = True
        for piece in pieces:
            text = " ".join(piece)
            try:
                args.append(ast.literal_eval(text))
            except (ValueError, SyntaxError):
                ok = False
                break
        if ok:
            inputs.append(args)
    return inputs


def perf_inputs_for_task(task: Task) -> tuple[list[list[Any]], str]:
    """(argument arrays, input-set label) for profiling one task."""
    if task.large_inputs_path is not None:
        return load_large_inputs(task.large_inputs_path), "large_inputs"
    return extract_call_inputs(task.test_source, task.entry_point), "unit_tests"


def profile_snippet(
    snippet: Snippet,
    task: Task,
    reps: int,
    policy: SandboxPolicy,
    *,
    correctness: CorrectnessResult,
    inputs: Optional[list[list[Any]]] = None,
    input_set: Optional[str] = None,
) -> list[PerfSample]:
    """Measure `reps` serialized executions of the entry point.

    The correctness gate is enforced here: profiling a snippet that did not
    pass its unit tests raises PrePerfGate. Executions hold a module-wide
    lock so only one measurement runs at a time.
    """
    ref = (snippet.model_role, task.task_id, snippet.rep_index)
    if (
        correctness.status != "passed"
        or (correctness.model_role, correctness.task_id, correctness.rep_index) != ref
    ):
        raise PrePerfGate(f"snippet {ref} has no passing correctness result")
    if reps < 1:
        raise ValueError("reps must be >= 1")

    if inputs is None:
        inputs, input_set = perf_inputs_for_task(task)
    if not inputs:
        raise ProfilingError(f"no usable performance inputs for task {task.task_id}")
    assert input_set is not None

    request = {
        "mode": "perf",
        "source": snippet.source,
        "entry_point": task.entry_point,
        "inputs": inputs,
        "reps": reps,
    }
    with _MEASUREMENT_LOCK:
        events = _invoke_harness(request, policy)
    if events is None:
        raise ProfilingError(f"profiling timed out for {ref} after {policy.timeout_s}s")

    error = next((e for e in events if e.get("event") == "error"), None)
    if error is not None:
        raise ProfilingError(f"profiling failed for {ref}: {error.get('detail', '')}")
    compiled = next((e for e in events if e.get("event") == "compiled"), None)
    if compiled is not None and not compiled.get("passed", False):
        raise ProfilingError(f"profiling failed for {ref}: {compiled.get('detail', '')}")

    samples = [
        PerfSample(
            model_role=snippet.model_role,
            task_id=task.task_id,
            rep_index=snippet.rep_index,
            input_set=input_set,
            exec_index=int(e["exec_index"]),
            wall_ns=int(e["wall_ns"]),
            peak_bytes=int(e["peak_bytes"]),
        )
        for e in events
        if e.get("event") == "perf_sample"
    ]
    if len(samples) != reps:
        raise HarnessError(f"expected {reps} perf samples for {ref}, got {len(samples)}")
    return samples
