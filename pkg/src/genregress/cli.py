"""Command-line interface.

Subcommands:
    run       generate (unless --offline), execute, analyze, report
    generate  query both models and write snippet stores
    analyze   offline: correctness + static findings + report (no sampling)
    report    re-render the report from persisted stage artifacts

Exit codes: 0 success, 1 pipeline failure, 2 configuration error.

Configuration precedence: command-line flags, then --config file, then
built-in defaults. API keys are read from environment variables only
(`<MODEL_NAME>_API_KEY` with the model name upper-cased and symbols mapped
to underscores).
"""

from __future__ import annotations

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from .benchmark import BenchmarkError, load_benchmark
from .genclient import GenerationError, ModelConfig, RunConfig, StoreError
from .pipeline import PipelineError, rebuild_report, run_offline, stage_generate
from .runner import HarnessError, SandboxPolicy, default_harness_path

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PIPELINE = 1
EXIT_CONFIG = 2


def api_key_env_for(model_name: str) -> str:
    return re.sub(r"[^A-Za-z0-9]", "_", model_name).upper() + "_API_KEY"


def _parse_model(value: str, role: str) -> ModelConfig:
    if "," not in value:
        raise ValueError(
            f"--model-{'a' if role == 'baseline' else 'b'} must be 'endpoint,model-name'"
        )
    endpoint, model_name = value.split(",", 1)
    return ModelConfig(
        role=role,
        endpoint_url=endpoint.strip(),
        model_name=model_name.strip(),
        api_key_env=api_key_env_for(model_name.strip()),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genregress",
        description="Differential regression testing for code-generation models.",
    )
    parser.add_argument("--config", type=Path, help="JSON config file mirroring the flags")
    parser.add_argument("--log-level", default=None, help="debug|info|warning|error")

    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser, stores: bool = True, models: bool = False) -> None:
        p.add_argument("--benchmark", type=Path, default=None)
        p.add_argument("--out", type=Path, default=None)
        if stores:
            p.add_argument("--store-a", type=Path, default=None, help="baseline snippet store")
            p.add_argument("--store-b", type=Path, default=None, help="candidate snippet store")
        if models:
            p.add_argument("--model-a", default=None, help="endpoint,model-name (baseline)")
            p.add_argument("--model-b", default=None, help="endpoint,model-name (candidate)")
        p.add_argument("--gens", type=int, default=None)
        p.add_argument("--perf-reps", type=int, default=None)
        p.add_argument("--timeout", type=int, default=None)
        p.add_argument("--dup-min-tokens", type=int, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--jobs", type=int, default=None)
        p.add_argument("--harness", type=Path, default=None)
        p.add_argument("--aggregation", choices=("affected_tasks", "occurrences"), default=None)

    p_run = sub.add_parser("run", help="full pipeline")
    common(p_run, stores=True, models=True)
    p_run.add_argument("--offline", action="store_true", help="skip generation; use --store-a/--store-b")

    p_gen = sub.add_parser("generate", help="generation stage only")
    common(p_gen, stores=False, models=True)

    p_analyze = sub.add_parser("analyze", help="offline analysis of two stores")
    common(p_analyze, stores=True)

    p_report = sub.add_parser("report", help="re-render report from artifacts")
    common(p_report, stores=True)

    return parser


_DEFAULTS = {
    "gens": 10,
    "perf_reps": 5,
    "timeout": 30,
    "dup_min_tokens": 10,
    "alpha": 0.05,
    "jobs": 1,
    "aggregation": "affected_tasks",
    "log_level": "warning",
}


def _effective(args: argparse.Namespace, file_cfg: dict) -> dict:
    merged = dict(_DEFAULTS)
    merged.update({k: v for k, v in file_cfg.items() if v is not None})
    for key, value in vars(args).items():
        if value is not None:
            merged[key] = value
    return merged


def _require(merged: dict, keys: list[str], parser: argparse.ArgumentParser) -> None:
    missing = [k for k in keys if merged.get(k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        parser.error(f"missing required option(s): {flags}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    file_cfg: dict = {}
    if args.config is not None:
        if not args.config.exists():
            parser.error(f"config file not found: {args.config}")
        file_cfg = json.loads(args.config.read_text(encoding="utf-8"))

    merged = _effective(args, file_cfg)
    logging.basicConfig(
        level=getattr(logging, str(merged["log_level"]).upper(), logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        run_cfg = RunConfig(
            gens=int(merged["gens"]),
            perf_reps=int(merged["perf_reps"]),
            timeout_s=int(merged["timeout"]),
            duplication_min_tokens=int(merged["dup_min_tokens"]),
            alpha=float(merged["alpha"]),
        )
    except ValueError as err:
        parser.error(str(err))

    harness = Path(merged["harness"]) if merged.get("harness") else default_harness_path()
    policy = SandboxPolicy(timeout_s=run_cfg.timeout_s, harness_path=harness)
    jobs = int(merged["jobs"])
    aggregation = str(merged["aggregation"])

    try:
        if args.subcommand == "generate":
            return _cmd_generate(merged, run_cfg, parser, jobs)
        if args.subcommand == "run":
            return _cmd_run(merged, run_cfg, policy, parser, jobs, aggregation)
        if args.subcommand == "analyze":
            return _cmd_analyze(merged, run_cfg, policy, parser, jobs, aggregation, with_perf=False)
        if args.subcommand == "report":
            return _cmd_report(merged, run_cfg, parser, aggregation)
        parser.error(f"unknown subcommand {args.subcommand!r}")
    except (PipelineError, BenchmarkError, HarnessError, GenerationError, StoreError) as err:
        logger.debug("pipeline failure", exc_info=True)
        print(f"error: {err}", file=sys.stderr)
        return EXIT_PIPELINE
    return EXIT_OK


def _check_paths(merged: dict, parser: argparse.ArgumentParser, keys: list[str]) -> None:
    for key in keys:
        path = Path(merged[key])
        if not path.exists():
            parser.error(f"--{key.replace('_', '-')}: path does not exist: {path}")


def _cmd_generate(merged: dict, run_cfg: RunConfig, parser, jobs: int) -> int:
    _require(merged, ["benchmark", "out", "model_a", "model_b"], parser)
    _check_paths(merged, parser, ["benchmark"])
    benchmark = load_benchmark(Path(merged["benchmark"]))
    model_a = _model_from(merged, "model_a", "baseline", parser)
    model_b = _model_from(merged, "model_b", "candidate", parser)
    out_dir = Path(merged["out"])
    store_a, store_b = stage_generate(benchmark, model_a, model_b, run_cfg, out_dir, jobs)
    print(f"stores written: {store_a} {store_b}")
    return EXIT_OK


def _model_from(merged: dict, key: str, role: str, parser) -> ModelConfig:
    try:
        value = merged[key]
        if isinstance(value, dict):
            # Config-file form: a full ModelConfig block.
            fields = {k: v for k, v in value.items() if k not in ("role", "api_key_env")}
            key_env = value.get("api_key_env", api_key_env_for(value["model_name"]))
            return ModelConfig(role=role, api_key_env=key_env, **fields)
        return _parse_model(str(value), role)
    except (ValueError, KeyError) as err:
        parser.error(str(err))


def _cmd_run(merged, run_cfg, policy, parser, jobs, aggregation) -> int:
    _require(merged, ["benchmark", "out"], parser)
    _check_paths(merged, parser, ["benchmark"])
    out_dir = Path(merged["out"])
    offline = bool(merged.get("offline"))

    labels = None
    if offline:
        _require(merged, ["store_a", "store_b"], parser)
        _check_paths(merged, parser, ["store_a", "store_b"])
        store_a, store_b = Path(merged["store_a"]), Path(merged["store_b"])
    else:
        _require(merged, ["model_a", "model_b"], parser)
        benchmark = load_benchmark(Path(merged["benchmark"]))
        model_a = _model_from(merged, "model_a", "baseline", parser)
        model_b = _model_from(merged, "model_b", "candidate", parser)
        store_a, store_b = stage_generate(benchmark, model_a, model_b, run_cfg, out_dir, jobs)
        labels = {"baseline": model_a.model_name, "candidate": model_b.model_name}

    report = run_offline(
        Path(merged["benchmark"]), store_a, store_b, out_dir, run_cfg, policy,
        with_perf=True, jobs=jobs, aggregation_mode=aggregation, labels=labels,
    )
    print(f"report written: {out_dir / 'report.json'}")
    _print_headline(report)
    return EXIT_OK


def _cmd_analyze(merged, run_cfg, policy, parser, jobs, aggregation, with_perf: bool) -> int:
    _require(merged, ["benchmark", "out", "store_a", "store_b"], parser)
    _check_paths(merged, parser, ["benchmark", "store_a", "store_b"])
    out_dir = Path(merged["out"])
    report = run_offline(
        Path(merged["benchmark"]),
        Path(merged["store_a"]),
        Path(merged["store_b"]),
        out_dir,
        run_cfg,
        policy,
        with_perf=with_perf,
        jobs=jobs,
        aggregation_mode=aggregation,
    )
    print(f"report written: {out_dir / 'report.json'}")
    _print_headline(report)
    return EXIT_OK


def _cmd_report(merged, run_cfg, parser, aggregation) -> int:
    _require(merged, ["benchmark", "out", "store_a", "store_b"], parser)
    _check_paths(merged, parser, ["benchmark", "store_a", "store_b", "out"])
    report = rebuild_report(
        Path(merged["benchmark"]),
        Path(merged["store_a"]),
        Path(merged["store_b"]),
        Path(merged["out"]),
        run_cfg,
        aggregation_mode=aggregation,
    )
    print(f"report written: {Path(merged['out']) / 'report.json'}")
    _print_headline(report)
    return EXIT_OK


def _print_headline(report) -> None:
    regressions = [d for d in report.aspect_deltas if d.direction == "regression"]
    improvements = [d for d in report.aspect_deltas if d.direction == "improvement"]
    print(
        f"aspects: {len(improvements)} improved, {len(regressions)} regressed, "
        f"{len(report.aspect_deltas) - len(improvements) - len(regressions)} unchanged; "
        f"{len(report.perf_verdicts)} performance verdicts; "
        f"{len(report.warnings)} warnings"
    )


if __name__ == "__main__":
    sys.exit(main())
