"""End-to-end stages: generation, execution, analysis, reporting.

Stage outputs are persisted as JSON artifacts in the output directory, each
stamped with a digest of the effective configuration (run settings,
benchmark bytes, store contents). A later stage refuses to consume an
artifact whose digest does not match the inputs it was given, and reuses
matching artifacts instead of recomputing them, so `analyze` and `report`
can resume a run at any point.

Performance sampling happens only in the execution stage (`run`); `analyze`
emits measured verdicts when a matching samples artifact exists and
otherwise limits itself to the statically decidable "equivalent" verdicts.
"""

from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Optional

from . import __version__
from .benchmark import Benchmark, load_benchmark
from .genclient import (
    ModelConfig,
    RunConfig,
    Snippet,
    generate_snippets,
    load_snippet_store,
    store_snippets,
)
from .report import RegressionReport, build_report, render_json, render_markdown
from .runner import (
    CorrectnessResult,
    PerfSample,
    PrePerfGate,
    ProfilingError,
    SandboxPolicy,
    perf_inputs_for_task,
    plan_perf_tasks,
    profile_snippet,
    run_correctness,
)
from .staticcheck import (
    Finding,
    Subcategory,
    alpha_equivalent,
    analyze_snippet,
    normalized_equivalent,
)
from .stats import (
    BASELINE,
    CANDIDATE,
    TaskPerfVerdict,
    aggregate_findings,
    aspect_deltas,
    classify_perf,
    equivalent_verdict,
)

logger = logging.getLogger(__name__)

ARTIFACT_SCHEMA_VERSION = 1


class PipelineError(RuntimeError):
    pass


@dataclasses.dataclass
class LoadedStores:
    """Snippets keyed by (task_id, rep) after positional role rebinding."""

    by_role: dict[str, dict[tuple[str, int], Snippet]]
    reps: int
    labels: dict[str, str]
    latest_created: dict[str, str]
    warnings: list[str]


def _rebind_role(snippets: dict, role: str, label: str, warnings: list[str]) -> dict[tuple[str, int], Snippet]:
    out: dict[tuple[str, int], Snippet] = {}
    recorded_roles = {s.model_role for s in snippets.values()}
    if len(recorded_roles) > 1:
        raise PipelineError(f"store {label!r} mixes roles {sorted(recorded_roles)}")
    if recorded_roles and recorded_roles != {role}:
        warnings.append(
            f"store {label!r} was recorded as {recorded_roles.pop()!r}; treating it as {role!r}"
        )
    for (_, task_id, rep), snippet in snippets.items():
        out[(task_id, rep)] = dataclasses.replace(snippet, model_role=role)
    return out


def load_stores(store_a: Path, store_b: Path) -> LoadedStores:
    warnings: list[str] = []
    raw_a = load_snippet_store(store_a)
    raw_b = load_snippet_store(store_b)
    if not raw_a:
        raise PipelineError(f"store {store_a} is empty or missing")
    if not raw_b:
        raise PipelineError(f"store {store_b} is empty or missing")

    by_role = {
        BASELINE: _rebind_role(raw_a, BASELINE, str(store_a), warnings),
        CANDIDATE: _rebind_role(raw_b, CANDIDATE, str(store_b), warnings),
    }
    reps_per_role = {
        role: 1 + max(rep for (_, rep) in snippets)
        for role, snippets in by_role.items()
    }
    if reps_per_role[BASELINE] != reps_per_role[CANDIDATE]:
        raise PipelineError(
            "repetition counts differ between stores: "
            f"{reps_per_role[BASELINE]} vs {reps_per_role[CANDIDATE]}"
        )
    latest = {
        role: max((s.created_at for s in snippets.values()), default="")
        for role, snippets in by_role.items()
    }
    return LoadedStores(
        by_role=by_role,
        reps=reps_per_role[BASELINE],
        labels={BASELINE: Path(store_a).name, CANDIDATE: Path(store_b).name},
        latest_created=latest,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# config digest and artifacts
# ---------------------------------------------------------------------------

def config_digest(cfg: RunConfig, benchmark_path: Path, stores: LoadedStores) -> str:
    content: dict[str, Any] = {
        "run_config": dataclasses.asdict(cfg),
        "benchmark_sha256": hashlib.sha256(Path(benchmark_path).read_bytes()).hexdigest(),
        "stores": {
            role: sorted(
                (task_id, rep, snippet.source_hash)
                for (task_id, rep), snippet in stores.by_role[role].items()
            )
            for role in (BASELINE, CANDIDATE)
        },
    }
    canonical = json.dumps(content, sort_keys=True).encode("utf-8")
    return hashlib.sha256(canonical).hexdigest()


def _write_artifact(path: Path, digest: str, payload: dict[str, Any]) -> None:
    doc = {"schema_version": ARTIFACT_SCHEMA_VERSION, "config_digest": digest, **payload}
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _read_artifact(path: Path, digest: Optional[str]) -> Optional[dict[str, Any]]:
    """Load an artifact; None when absent. Digest mismatch is an error."""
    if not path.exists():
        return None
    doc = json.loads(path.read_text(encoding="utf-8"))
    if digest is not None and doc.get("config_digest") != digest:
        raise PipelineError(
            f"artifact {path.name} was produced by a different configuration "
            f"(digest {doc.get('config_digest', '?')[:12]}… != {digest[:12]}…); "
            "remove it or rerun the earlier stage"
        )
    return doc


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

def stage_generate(
    benchmark: Benchmark,
    model_a: ModelConfig,
    model_b: ModelConfig,
    cfg: RunConfig,
    out_dir: Path,
    jobs: int = 1,
) -> tuple[Path, Path]:
    """Query both models for every task; returns the two store paths."""
    store_a = out_dir / "stores" / "a"
    store_b = out_dir / "stores" / "b"

    def generate_for(model: ModelConfig, store: Path) -> None:
        def one_task(task):
            return generate_snippets(model, task, cfg.gens)

        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                for snippets in pool.map(one_task, benchmark.tasks):
                    store_snippets(store, snippets)
        else:
            for task in benchmark.tasks:
                store_snippets(store, one_task(task))

    generate_for(model_a, store_a)
    generate_for(model_b, store_b)
    return store_a, store_b


def stage_correctness(
    benchmark: Benchmark,
    stores: LoadedStores,
    policy: SandboxPolicy,
    jobs: int = 1,
) -> list[CorrectnessResult]:
    work: list[tuple[Snippet, Any]] = []
    for role in (BASELINE, CANDIDATE):
        for (task_id, rep), snippet in sorted(stores.by_role[role].items()):
            try:
                task = benchmark.task(task_id)
            except KeyError:
                logger.warning("snippet for unknown task %r ignored", task_id)
                continue
            work.append((snippet, task))

    def run_one(item):
        snippet, task = item
        return run_correctness(snippet, task, policy)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_one, work))
    else:
        results = [run_one(item) for item in work]
    results.sort(key=lambda r: (r.model_role, r.task_id, r.rep_index))
    return results


_SYNTAX_OK = (True, "")


def stage_static(
    stores: LoadedStores,
    results: list[CorrectnessResult],
    cfg: RunConfig,
) -> dict[tuple[str, str, int], list[Finding]]:
    """Static findings per snippet, reusing the execution compile verdict.

    Snippets the harness refused to compile get exactly the SyntaxError
    finding; snippets known to compile skip the (approximate) native syntax
    gate. Timeouts fall back to the native gate, since no compile verdict
    exists for them.
    """
    status_by_key = {(r.model_role, r.task_id, r.rep_index): r for r in results}
    findings: dict[tuple[str, str, int], list[Finding]] = {}
    for role in (BASELINE, CANDIDATE):
        for (task_id, rep), snippet in sorted(stores.by_role[role].items()):
            key = (role, task_id, rep)
            result = status_by_key.get(key)
            if result is None:
                continue
            if result.status == "syntax_error":
                line = 1
                match = re.search(r"line (\d+)", result.failure_detail)
                if match:
                    line = int(match.group(1))
                findings[key] = [
                    Finding(
                        Subcategory.SYNTAX_ERROR,
                        line,
                        line,
                        f"does not compile: {result.failure_detail}",
                    )
                ]
            elif result.status == "timeout":
                findings[key] = analyze_snippet(snippet.source, cfg)
            else:
                findings[key] = analyze_snippet(
                    snippet.source, cfg, compile_fn=lambda _src: _SYNTAX_OK
                )
    return findings


def _passed_by_task(results: list[CorrectnessResult]) -> dict[str, dict[str, list[CorrectnessResult]]]:
    out: dict[str, dict[str, list[CorrectnessResult]]] = {}
    for result in results:
        if result.status == "passed":
            out.setdefault(result.task_id, {}).setdefault(result.model_role, []).append(result)
    return out


def equivalence_verdicts(
    benchmark: Benchmark,
    stores: LoadedStores,
    results: list[CorrectnessResult],
) -> tuple[list[TaskPerfVerdict], list[str], list[str]]:
    """Statically decidable verdicts plus notes; also returns the remaining
    task ids that need measured comparison."""
    plan = plan_perf_tasks(results, [t.task_id for t in benchmark.tasks])
    passed = _passed_by_task(results)
    verdicts: list[TaskPerfVerdict] = []
    notes: list[str] = []
    to_measure: list[str] = []

    if not plan:
        notes.append(
            "performance comparison skipped: no task has passing snippets from both models"
        )
        for role in (BASELINE, CANDIDATE):
            if not any(r.model_role == role and r.status == "passed" for r in results):
                notes.append(f"the {role} store has no passing snippets at all")

    for task_id in plan:
        sources = [
            stores.by_role[role][(task_id, r.rep_index)].source
            for role in (BASELINE, CANDIDATE)
            for r in sorted(passed[task_id][role], key=lambda r: r.rep_index)
        ]
        reference = sources[0]
        if all(normalized_equivalent(reference, other) for other in sources[1:]):
            verdicts.append(equivalent_verdict(task_id, "time"))
            verdicts.append(equivalent_verdict(task_id, "memory"))
        else:
            if all(alpha_equivalent(reference, other) for other in sources[1:]):
                notes.append(
                    f"task {task_id}: passing snippets differ only by identifier names; "
                    "measured anyway"
                )
            to_measure.append(task_id)
    return verdicts, notes, to_measure


def _unmeasured_perf_view(
    benchmark: Benchmark,
    stores: LoadedStores,
    results: list[CorrectnessResult],
) -> tuple[list[TaskPerfVerdict], list[str]]:
    """Perf section when no samples exist: equivalence verdicts plus a hint."""
    verdicts, warnings, to_measure = equivalence_verdicts(benchmark, stores, results)
    if to_measure:
        warnings.append(
            f"{len(to_measure)} task(s) need measured performance comparison; "
            "run the execution stage (`run --offline`) to collect samples"
        )
    return verdicts, warnings


def stage_perf(
    benchmark: Benchmark,
    stores: LoadedStores,
    results: list[CorrectnessResult],
    cfg: RunConfig,
    policy: SandboxPolicy,
) -> tuple[list[PerfSample], list[TaskPerfVerdict], dict[str, str], list[str]]:
    """Profile every passing snippet on gated tasks; classify per task.

    Baseline and candidate snippets are interleaved per task to decorrelate
    machine drift; profiled executions are strictly sequential.
    """
    verdicts, warnings, to_measure = equivalence_verdicts(benchmark, stores, results)
    passed = _passed_by_task(results)
    samples: list[PerfSample] = []
    input_sets: dict[str, str] = {}

    for task_id in to_measure:
        task = benchmark.task(task_id)
        inputs, input_set = perf_inputs_for_task(task)
        if not inputs:
            warnings.append(
                f"task {task_id}: no usable performance inputs "
                "(no large-inputs file and no literal unit-test calls); skipped"
            )
            continue
        input_sets[task_id] = input_set

        base = sorted(passed[task_id][BASELINE], key=lambda r: r.rep_index)
        cand = sorted(passed[task_id][CANDIDATE], key=lambda r: r.rep_index)
        pooled: dict[str, list[PerfSample]] = {BASELINE: [], CANDIDATE: []}
        interleaved: list[CorrectnessResult] = []
        for i in range(max(len(base), len(cand))):
            if i < len(base):
                interleaved.append(base[i])
            if i < len(cand):
                interleaved.append(cand[i])

        for result in interleaved:
            snippet = stores.by_role[result.model_role][(task_id, result.rep_index)]
            try:
                got = profile_snippet(
                    snippet,
                    task,
                    cfg.perf_reps,
                    policy,
                    correctness=result,
                    inputs=inputs,
                    input_set=input_set,
                )
            except (ProfilingError, PrePerfGate) as err:
                warnings.append(f"task {task_id}: {err}; snippet samples discarded")
                continue
            pooled[result.model_role].extend(got)
            samples.extend(got)

        if not pooled[BASELINE] or not pooled[CANDIDATE]:
            warnings.append(
                f"task {task_id}: missing samples for one role after profiling failures; "
                "no verdict"
            )
            continue
        for metric, attr in (("time", "wall_ns"), ("memory", "peak_bytes")):
            verdicts.append(
                classify_perf(
                    [getattr(s, attr) for s in pooled[BASELINE]],
                    [getattr(s, attr) for s in pooled[CANDIDATE]],
                    task_id,
                    metric,
                    cfg.alpha,
                )
            )
    return samples, verdicts, input_sets, warnings


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def assemble_report(
    benchmark: Benchmark,
    benchmark_path: Path,
    stores: LoadedStores,
    results: list[CorrectnessResult],
    findings: dict[tuple[str, str, int], list[Finding]],
    verdicts: list[TaskPerfVerdict],
    extra_warnings: list[str],
    cfg: RunConfig,
    aggregation_mode: str = "affected_tasks",
) -> RegressionReport:
    task_ids = [t.task_id for t in benchmark.tasks]
    statuses = {(r.model_role, r.task_id, r.rep_index): r.status for r in results}
    finding_names = {
        key: [f.subcategory.value for f in snippet_findings]
        for key, snippet_findings in findings.items()
    }

    counts = {}
    warnings = list(extra_warnings) + list(stores.warnings)
    for role in (BASELINE, CANDIDATE):
        counts[role] = aggregate_findings(
            finding_names, statuses, task_ids, stores.reps, role, aggregation_mode
        )
        warnings.extend(counts[role].warnings)

    deltas = aspect_deltas(counts[BASELINE], counts[CANDIDATE], benchmark.total_tasks)
    metadata = {
        "tool_version": __version__,
        "benchmark": {
            "name": benchmark.name,
            "total_tasks": benchmark.total_tasks,
            "sha256": hashlib.sha256(Path(benchmark_path).read_bytes()).hexdigest(),
        },
        "models": dict(stores.labels),
        "reps": stores.reps,
        "aggregation_mode": aggregation_mode,
        "run_config": dataclasses.asdict(cfg),
        "timestamps": {
            "baseline_store_latest": stores.latest_created[BASELINE],
            "candidate_store_latest": stores.latest_created[CANDIDATE],
        },
    }
    return build_report(deltas, verdicts, metadata, warnings)


# ---------------------------------------------------------------------------
# top-level flows
# ---------------------------------------------------------------------------

def _persist_correctness(out_dir: Path, digest: str, results: list[CorrectnessResult], reps: int) -> None:
    _write_artifact(
        out_dir / "correctness.json",
        digest,
        {"reps": reps, "results": [r.to_json() for r in results]},
    )


def _persist_static(out_dir: Path, digest: str, findings: dict[tuple[str, str, int], list[Finding]]) -> None:
    payload = [
        {
            "model_role": role,
            "task_id": task_id,
            "rep_index": rep,
            "findings": [f.to_json() for f in snippet_findings],
        }
        for (role, task_id, rep), snippet_findings in sorted(findings.items())
    ]
    _write_artifact(out_dir / "static_findings.json", digest, {"snippets": payload})


def _persist_perf(
    out_dir: Path,
    digest: str,
    samples: list[PerfSample],
    verdicts: list[TaskPerfVerdict],
    input_sets: dict[str, str],
    warnings: list[str],
) -> None:
    _write_artifact(
        out_dir / "perf_samples.json",
        digest,
        {
            "samples": [s.to_json() for s in samples],
            "verdicts": [dataclasses.asdict(v) for v in verdicts],
            "input_sets": input_sets,
            "perf_warnings": warnings,
        },
    )


def _load_findings(doc: dict[str, Any]) -> dict[tuple[str, str, int], list[Finding]]:
    return {
        (entry["model_role"], entry["task_id"], int(entry["rep_index"])): [
            Finding.from_json(f) for f in entry["findings"]
        ]
        for entry in doc["snippets"]
    }


def run_offline(
    benchmark_path: Path,
    store_a: Path,
    store_b: Path,
    out_dir: Path,
    cfg: RunConfig,
    policy: SandboxPolicy,
    *,
    with_perf: bool,
    jobs: int = 1,
    aggregation_mode: str = "affected_tasks",
    labels: Optional[dict[str, str]] = None,
) -> RegressionReport:
    """Correctness + static analysis (+ optional profiling) over two stores.

    Reuses digest-matching artifacts found in ``out_dir``; writes all stage
    artifacts plus report.json / report.md. ``labels`` overrides the
    store-directory names shown in report metadata (e.g. model names).
    """
    benchmark = load_benchmark(benchmark_path)
    stores = load_stores(store_a, store_b)
    if labels:
        stores.labels.update(labels)
    digest = config_digest(cfg, benchmark_path, stores)
    out_dir.mkdir(parents=True, exist_ok=True)

    correctness_doc = _read_artifact(out_dir / "correctness.json", digest)
    if correctness_doc is not None:
        results = [CorrectnessResult.from_json(r) for r in correctness_doc["results"]]
    else:
        results = stage_correctness(benchmark, stores, policy, jobs=jobs)
        _persist_correctness(out_dir, digest, results, stores.reps)

    static_doc = _read_artifact(out_dir / "static_findings.json", digest)
    if static_doc is not None:
        findings = _load_findings(static_doc)
    else:
        findings = stage_static(stores, results, cfg)
        _persist_static(out_dir, digest, findings)

    perf_doc = _read_artifact(out_dir / "perf_samples.json", digest)
    if perf_doc is not None:
        verdicts = [TaskPerfVerdict(**v) for v in perf_doc["verdicts"]]
        perf_warnings = list(perf_doc["perf_warnings"])
    elif with_perf:
        samples, verdicts, input_sets, perf_warnings = stage_perf(
            benchmark, stores, results, cfg, policy
        )
        _persist_perf(out_dir, digest, samples, verdicts, input_sets, perf_warnings)
    else:
        verdicts, perf_warnings = _unmeasured_perf_view(benchmark, stores, results)

    report = assemble_report(
        benchmark, benchmark_path, stores, results, findings, verdicts,
        perf_warnings, cfg, aggregation_mode,
    )
    write_report(out_dir, report)
    return report


def rebuild_report(
    benchmark_path: Path,
    store_a: Path,
    store_b: Path,
    out_dir: Path,
    cfg: RunConfig,
    aggregation_mode: str = "affected_tasks",
) -> RegressionReport:
    """Re-render the report from persisted artifacts; no execution at all."""
    benchmark = load_benchmark(benchmark_path)
    stores = load_stores(store_a, store_b)
    digest = config_digest(cfg, benchmark_path, stores)

    correctness_doc = _read_artifact(out_dir / "correctness.json", digest)
    static_doc = _read_artifact(out_dir / "static_findings.json", digest)
    if correctness_doc is None or static_doc is None:
        raise PipelineError(
            f"missing stage artifacts in {out_dir}; run `analyze` or `run` first"
        )
    results = [CorrectnessResult.from_json(r) for r in correctness_doc["results"]]
    findings = _load_findings(static_doc)

    perf_doc = _read_artifact(out_dir / "perf_samples.json", digest)
    if perf_doc is not None:
        verdicts = [TaskPerfVerdict(**v) for v in perf_doc["verdicts"]]
        perf_warnings = list(perf_doc["perf_warnings"])
    else:
        verdicts, perf_warnings = _unmeasured_perf_view(benchmark, stores, results)

    report = assemble_report(
        benchmark, benchmark_path, stores, results, findings, verdicts,
        perf_warnings, cfg, aggregation_mode,
    )
    write_report(out_dir, report)
    return report


def write_report(out_dir: Path, report: RegressionReport) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_bytes(render_json(report))
    (out_dir / "report.md").write_text(render_markdown(report), encoding="utf-8")
