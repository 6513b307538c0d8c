"""Benchmark loading: JSON-lines task files with unit tests.

File format: one JSON object per line with fields ``task_id``, ``prompt``,
``entry_point``, ``test_source`` and optional ``large_inputs`` (a path,
relative to the benchmark file, to a JSON-lines file where each line is an
array of positional arguments for the entry point). Unknown fields are
preserved on the task and ignored by the pipeline.
"""

from __future__ import annotations

import json
import keyword
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional


class BenchmarkError(ValueError):
    pass


_REQUIRED_FIELDS = ("task_id", "prompt", "entry_point", "test_source")


@dataclass(frozen=True)
class Task:
    task_id: str
    prompt: str
    entry_point: str
    test_source: str
    large_inputs_path: Optional[Path] = None
    extra: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Benchmark:
    name: str
    tasks: tuple[Task, ...]

    @property
    def total_tasks(self) -> int:
        return len(self.tasks)

    def task(self, task_id: str) -> Task:
        for task in self.tasks:
            if task.task_id == task_id:
                return task
        raise KeyError(task_id)


def validate_task(task: Task) -> list[str]:
    """All invariant violations for one task; empty when well-formed."""
    violations = []
    if not task.task_id:
        violations.append("task_id empty")
    if not task.test_source.strip():
        violations.append("test_source empty")
    if not task.entry_point.isidentifier() or keyword.iskeyword(task.entry_point):
        violations.append("entry_point not an identifier")
    return violations


def load_benchmark(path: Path | str) -> Benchmark:
    """Parse a JSON-lines benchmark; tasks come back sorted by task_id."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise BenchmarkError(f"cannot read benchmark {path}: {err}") from err

    tasks: list[Task] = []
    seen: set[str] = set()
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as err:
            raise BenchmarkError(f"{path}:{lineno}: malformed JSON: {err}") from err
        if not isinstance(obj, dict):
            raise BenchmarkError(f"{path}:{lineno}: task must be a JSON object")

        task_id = obj.get("task_id", f"<line {lineno}>")
        for fieldname in _REQUIRED_FIELDS:
            if fieldname not in obj:
                raise BenchmarkError(f"{path}:{lineno}: task {task_id!r} missing field {fieldname!r}")
        if obj["task_id"] in seen:
            raise BenchmarkError(f"{path}:{lineno}: duplicate task_id {obj['task_id']!r}")
        seen.add(obj["task_id"])

        large = obj.get("large_inputs")
        extra = {
            k: v for k, v in obj.items() if k not in _REQUIRED_FIELDS and k != "large_inputs"
        }
        task = Task(
            task_id=obj["task_id"],
            prompt=obj["prompt"],
            entry_point=obj["entry_point"],
            test_source=obj["test_source"],
            large_inputs_path=(path.parent / large) if large else None,
            extra=extra,
        )
        violations = validate_task(task)
        if violations:
            raise BenchmarkError(
                f"{path}:{lineno}: task {task.task_id!r} invalid: {'; '.join(violations)}"
            )
        tasks.append(task)

    if not tasks:
        raise BenchmarkError(f"{path}: empty benchmark")

    tasks.sort(key=lambda t: t.task_id)
    return Benchmark(name=path.stem, tasks=tuple(tasks))


def serialize_benchmark(benchmark: Benchmark, base_dir: Optional[Path] = None) -> str:
    """JSON-lines text that loads back to an equal benchmark."""
    lines = []
    for task in benchmark.tasks:
        obj: dict[str, Any] = {
            "task_id": task.task_id,
            "prompt": task.prompt,
            "entry_point": task.entry_point,
            "test_source": task.test_source,
        }
        if task.large_inputs_path is not None:
            rel = task.large_inputs_path
            if base_dir is not None:
                try:
                    rel = rel.relative_to(base_dir)
                except ValueError:
                    pass
            obj["large_inputs"] = str(rel)
        obj.update(task.extra)
        lines.append(json.dumps(obj, sort_keys=True))
    return "\n".join(lines) + "\n"


def load_large_inputs(path: Path) -> list[list[Any]]:
    """Each line of a large-inputs file is an array of positional arguments."""
    rows: list[list[Any]] = []
    text = path.read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        row = json.loads(line)
        if not isinstance(row, list):
            raise BenchmarkError(f"{path}:{lineno}: large input line must be an array")
        rows.append(row)
    return rows
