"""Interpreter-side execution shim.

Reads one JSON request from stdin and replies with JSON-lines events on
stdout; everything user code writes to stdout is diverted to stderr so that
stdout stays machine-readable. One request per process; the coordinator
owns isolation, timeouts, and parallelism.

Request object:
    {"mode": "compile" | "test" | "perf",
     "source": str,
     "test_source": str,        # test mode
     "entry_point": str,        # perf mode
     "inputs": [[arg, ...]],    # perf mode: positional argument arrays
     "reps": int}               # perf mode

Events (one JSON object per line):
    {"event": "compiled", "passed": bool, "detail": str}
    {"event": "test_result", "passed": bool, "detail": str}
    {"event": "perf_sample", "exec_index": int, "wall_ns": int, "peak_bytes": int}
    {"event": "error", "detail": str}

Exit code 0 whenever the protocol ran to completion, including failing
snippets; non-zero only for protocol faults (unreadable request, unknown
mode).

Wall time comes from the monotonic clock. Peak memory is traced allocation,
reset before each repetition, so it reflects the measured call rather than
interpreter baseline; allocations made by native extensions outside the
allocator are invisible to the tracer.
"""

import contextlib
import json
import sys
import time
import tracemalloc


def emit(obj):
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    sys.stdout.flush()


def describe(exc):
    return f"{type(exc).__name__}: {exc}"


def compile_source(source):
    try:
        return compile(source, "<snippet>", "exec"), ""
    except (SyntaxError, ValueError) as exc:
        detail = describe(exc)
        if isinstance(exc, SyntaxError) and exc.lineno is not None:
            detail = f"{type(exc).__name__}: {exc.msg} (line {exc.lineno})"
        return None, detail


def handle_compile(request):
    code, detail = compile_source(request["source"])
    if code is None:
        emit({"event": "compiled", "passed": False, "detail": detail})
    else:
        emit({"event": "compiled", "passed": True, "detail": ""})


def handle_test(request):
    code, detail = compile_source(request["source"])
    if code is None:
        emit({"event": "compiled", "passed": False, "detail": detail})
        return
    emit({"event": "compiled", "passed": True, "detail": ""})

    namespace = {"__name__": "__main__"}
    try:
        with contextlib.redirect_stdout(sys.stderr):
            exec(code, namespace)
            exec(compile(request["test_source"], "<tests>", "exec"), namespace)
    except AssertionError as exc:
        emit({"event": "test_result", "passed": False, "detail": describe(exc) or "AssertionError"})
        return
    except SystemExit as exc:
        if exc.code in (0, None):
            emit({"event": "test_result", "passed": True, "detail": ""})
        else:
            emit({"event": "test_result", "passed": False, "detail": describe(exc)})
        return
    except BaseException as exc:  # noqa: BLE001 - harness must never crash on user code
        emit({"event": "test_result", "passed": False, "detail": describe(exc)})
        return
    emit({"event": "test_result", "passed": True, "detail": ""})


def handle_perf(request):
    code, detail = compile_source(request["source"])
    if code is None:
        emit({"event": "compiled", "passed": False, "detail": detail})
        return
    reps = int(request.get("reps", 1))
    inputs = request.get("inputs") or []
    if reps < 1:
        emit({"event": "error", "detail": "reps must be >= 1"})
        return
    if not inputs:
        emit({"event": "error", "detail": "perf mode needs at least one input array"})
        return

    namespace = {"__name__": "__main__"}
    try:
        with contextlib.redirect_stdout(sys.stderr):
            exec(code, namespace)
    except BaseException as exc:
        emit({"event": "error", "detail": f"source execution failed: {describe(exc)}"})
        return

    entry = namespace.get(request["entry_point"])
    if not callable(entry):
        emit({"event": "error", "detail": "entry point not found"})
        return

    samples = []
    tracemalloc.start()
    try:
        for index in range(reps):
            tracemalloc.reset_peak()
            with contextlib.redirect_stdout(sys.stderr):
                start = time.monotonic_ns()
                for args in inputs:
                    entry(*args)
                wall_ns = time.monotonic_ns() - start
            _, peak_bytes = tracemalloc.get_traced_memory()
            samples.append(
                {
                    "event": "perf_sample",
                    "exec_index": index,
                    "wall_ns": max(wall_ns, 1),
                    "peak_bytes": peak_bytes,
                }
            )
    except BaseException as exc:
        tracemalloc.stop()
        emit({"event": "error", "detail": f"execution failed: {describe(exc)}"})
        return
    tracemalloc.stop()
    for sample in samples:
        emit(sample)


def main():
    try:
        request = json.load(sys.stdin)
    except (json.JSONDecodeError, ValueError) as exc:
        emit({"event": "error", "detail": f"unreadable request: {describe(exc)}"})
        return 2

    mode = request.get("mode")
    if mode == "compile":
        handle_compile(request)
    elif mode == "test":
        handle_test(request)
    elif mode == "perf":
        handle_perf(request)
    else:
        emit({"event": "error", "detail": f"unknown mode: {mode!r}"})
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
