#!/usr/bin/env python3
"""Build the bundled mini-benchmark fixtures (deterministic).

Writes fixtures/minibench/: a 20-task benchmark, a large-inputs file, and
two synthetic snippet stores. Store A holds clean, correct solutions; store
B holds the same solutions with known quality defects injected into
specific tasks. The script verifies its own output: every snippet's
correctness expectation is executed in-process and every expected static
finding is checked against the analyzers before anything is written.

Run from the repository root:  python scripts/build_minibench.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from genregress.genclient import Snippet, store_snippets  # noqa: E402
from genregress.staticcheck import analyze_snippet  # noqa: E402

OUT = REPO / "fixtures" / "minibench"

CREATED_A = "2026-01-02T00:00:00Z"
CREATED_B = "2026-01-02T00:10:00Z"


def fenced(source: str, prose: str = "") -> str:
    intro = f"{prose}\n\n" if prose else ""
    return f"{intro}```python\n{source.rstrip()}\n```\n"


# ---------------------------------------------------------------------------
# task table: (task_id, entry_point, prompt, source_a, source_b, tests,
#              b_passes, expected_b_findings_by_rep)
# ---------------------------------------------------------------------------

def task_table() -> list[dict]:
    tasks: list[dict] = []

    def add(task_id, entry, prompt, src_a, tests, src_b=None, b_passes=True,
            b_findings=(), b_findings_rep1=None, large_inputs=None):
        tasks.append({
            "task_id": task_id,
            "entry_point": entry,
            "prompt": prompt,
            "source_a": src_a,
            "source_b": src_b if src_b is not None else src_a,
            "test_source": tests,
            "b_passes": b_passes,
            "b_findings": set(b_findings),
            "b_findings_rep1": set(b_findings if b_findings_rep1 is None else b_findings_rep1),
            "large_inputs": large_inputs,
        })

    add(
        "t01", "scale_values",
        "def scale_values(values, factor):\n    \"\"\"Multiply every value by factor.\"\"\"",
        "def scale_values(values, factor):\n    return [value * factor for value in values]\n",
        "assert scale_values([1, 2, 3], 2) == [2, 4, 6]\nassert scale_values([], 5) == []\n",
        src_b="def scale_values(values, factor:\n    return [value * factor for value in values]\n",
        b_passes=False,
        b_findings={"SyntaxError"},
    )
    add(
        "t02", "root_sum",
        "def root_sum(first, second):\n    \"\"\"Square root of the sum of two numbers.\"\"\"",
        "import math\n\n\ndef root_sum(first, second):\n    return math.sqrt(first + second)\n",
        "assert root_sum(9, 16) == 5.0\nassert root_sum(0, 4) == 2.0\n",
        src_b="def root_sum(first, second):\n    return math.sqrt(first + second)\n",
        b_passes=False,
        b_findings={"MissingDeclImport"},
    )
    add(
        "t03", "checksum",
        "def checksum(seed, step):\n    \"\"\"Combine seed and step into a checksum.\"\"\"",
        "def checksum(seed, step):\n"
        "    total = seed + step\n"
        "    scaled = seed * step - 1\n"
        "    return total + scaled\n",
        "assert checksum(3, 4) == 18\nassert checksum(1, 1) == 2\n",
        src_b="def checksum(seed, step):\n"
        "    total = seed + step\n"
        "    scaled = seed * step - 1\n"
        "    partial = total + scaled\n"
        "    total = seed + step\n"
        "    scaled = seed * step - 1\n"
        "    return partial\n",
        b_findings={"CodeDuplication"},
    )
    add(
        "t04", "join_words",
        "def join_words(words, sep):\n    \"\"\"Join words with the separator.\"\"\"",
        "def join_words(words, sep):\n    return sep.join(words)\n",
        'assert join_words(["a", "b"], "-") == "a-b"\nassert join_words([], ".") == ""\n',
        src_b="def join_words(words, sep):\n"
        "    # build the combined text\n"
        "    combined = sep.join(words)\n"
        "    # build the combined text\n"
        "    return combined\n",
        b_findings={"CommentDuplication"},
    )
    add(
        "t05", "clamp",
        "def clamp(value, low, high):\n    \"\"\"Clamp value into [low, high].\"\"\"",
        "def clamp(value, low, high):\n"
        "    if value < low:\n"
        "        return low\n"
        "    if value > high:\n"
        "        return high\n"
        "    return value\n",
        "assert clamp(5, 0, 10) == 5\nassert clamp(-1, 0, 10) == 0\nassert clamp(11, 0, 10) == 10\n",
        src_b="def clamp(value, low, high):\n"
        "    if value < low:\n"
        "        return low\n"
        "    if value > high:\n"
        "        return high\n"
        "    else:\n"
        "        return value\n",
        b_findings={"UnnecessaryElse"},
    )
    add(
        "t06", "is_positive",
        "def is_positive(number):\n    \"\"\"Whether the number is strictly positive.\"\"\"",
        "def is_positive(number):\n    return number > 0\n",
        "assert is_positive(3) == True\nassert is_positive(-2) == False\nassert is_positive(0) == False\n",
        src_b="def is_positive(number):\n"
        "    if number > 0:\n"
        "        return True\n"
        "    return False\n",
        b_findings={"UnnecessaryConditionalBlock"},
    )
    add(
        "t07", "count_items",
        "def count_items(items):\n    \"\"\"Number of items in the iterable.\"\"\"",
        "def count_items(items):\n"
        "    count = 0\n"
        "    for entry in items:\n"
        "        count = count + 1\n"
        "    return count\n",
        "assert count_items([1, 2, 3]) == 3\nassert count_items([]) == 0\n",
        src_b="def count_items(items):\n"
        "    l = 0\n"
        "    for entry in items:\n"
        "        l = l + 1\n"
        "    return l\n",
        b_findings={"ConfusingVariableNaming"},
        b_findings_rep1=set(),  # rep 1 uses the clean variant
    )
    add(
        "t08", "describe_range",
        "def describe_range(low, high):\n    \"\"\"Short description of a range.\"\"\"",
        "def describe_range(low, high):\n"
        '    return "values from " + str(low) + " to " + str(high)\n',
        'assert describe_range(1, 5) == "values from 1 to 5"\n',
        src_b="def describe_range(low, high):\n"
        '    note = "this helper returns a short, human readable description of the half open '
        'range it was given, nothing else at all"\n'
        '    return "values from " + str(low) + " to " + str(high)\n',
        b_findings={"SubReadableCode"},
    )
    add(
        "t09", "running_total",
        "def running_total(values):\n    \"\"\"Prefix sums of the values.\"\"\"",
        "def running_total(values):\n"
        "    totals = []\n"
        "    current = 0\n"
        "    for value in values:\n"
        "        current = current + value\n"
        "        totals.append(current)\n"
        "    return totals\n",
        "assert running_total([1, 2, 3]) == [1, 3, 6]\nassert running_total([]) == []\n",
        src_b="def running_total(values):\n"
        "    totals = []\n"
        "    current = 0\n"
        "    for value in values:\n"
        "        current = current - value\n"
        "        totals.append(current)\n"
        "    return totals\n",
        b_passes=False,
        b_findings=set(),
    )
    add(
        "t10", "median_of",
        "def median_of(values):\n    \"\"\"Median of a non-empty list.\"\"\"",
        "def median_of(values):\n"
        "    ordered = sorted(values)\n"
        "    middle = len(ordered) // 2\n"
        "    if len(ordered) % 2 == 1:\n"
        "        return ordered[middle]\n"
        "    return (ordered[middle - 1] + ordered[middle]) / 2\n",
        "assert median_of([3, 1, 2]) == 2\nassert median_of([1, 2, 3, 4]) == 2.5\n",
        src_b="def median_of(values):\n"
        "    # order the sample first\n"
        "    ordered = sorted(values)\n"
        "\n"
        "    middle = len(ordered) // 2\n"
        "    if len(ordered) % 2 == 1:\n"
        "        return ordered[middle]\n"
        "\n"
        "    # even length: average the central pair\n"
        "    return (ordered[middle - 1] + ordered[middle]) / 2\n",
        b_findings=set(),
    )
    add(
        "t11", "sort_desc",
        "def sort_desc(values):\n    \"\"\"Values sorted in descending order.\"\"\"",
        "def sort_desc(values):\n    return sorted(values, reverse=True)\n",
        "assert sort_desc([1, 3, 2]) == [3, 2, 1]\nassert sort_desc([]) == []\n",
        src_b="def sort_desc(values):\n    return sorted(values)\n",
        b_passes=False,
        b_findings=set(),
    )
    add(
        "t12", "double_all",
        "def double_all(values):\n    \"\"\"Double every value.\"\"\"",
        "def double_all(values):\n    return [value * 2 for value in values]\n",
        "assert double_all([1, 2, 3]) == [2, 4, 6]\nassert double_all([]) == []\n",
        src_b="def double_all(values):\n"
        "    doubled = []\n"
        "    for value in values:\n"
        "        waste = 0\n"
        "        for _ in range(20000):\n"
        "            waste = waste + 1\n"
        "        doubled.append(value * 2)\n"
        "    return doubled\n",
        b_findings=set(),
    )
    add(
        "t13", "sum_squares",
        "def sum_squares(limit):\n    \"\"\"Sum of squares below the limit.\"\"\"",
        "def sum_squares(limit):\n"
        "    total = 0\n"
        "    for value in range(limit):\n"
        "        square = 0\n"
        "        counter = value\n"
        "        while counter > 0:\n"
        "            square = square + value\n"
        "            counter = counter - 1\n"
        "        total = total + square\n"
        "    return total\n",
        "assert sum_squares(200) == 2646700\nassert sum_squares(0) == 0\n",
        src_b="def sum_squares(limit):\n"
        "    total = 0\n"
        "    for value in range(limit):\n"
        "        total = total + value * value\n"
        "    return total\n",
        b_findings=set(),
    )
    add(
        "t14", "tail_item",
        "def tail_item(count):\n    \"\"\"Last zero-based index of a count-long sequence.\"\"\"",
        "def tail_item(count):\n    return count - 1\n",
        "assert tail_item(120000) == 119999\nassert tail_item(5) == 4\n",
        src_b="def tail_item(count):\n"
        "    numbers = []\n"
        "    for value in range(count):\n"
        "        numbers.append(value)\n"
        "    return numbers[-1]\n",
        b_findings=set(),
    )
    add(
        "t15", "scale_add",
        "def scale_add(values, factor, shift):\n    \"\"\"Scale each value and add a shift.\"\"\"",
        "def scale_add(values, factor, shift):\n"
        "    return [value * factor + shift for value in values]\n",
        "assert scale_add([1, 2], 2, 1) == [3, 5]\n",
        src_b="def scale_add(items, scale, offset):\n"
        "    return [entry * scale + offset for entry in items]\n",
        b_findings=set(),
        large_inputs="t15_large.jsonl",
    )
    add(
        "t16", "reverse_text",
        "def reverse_text(text):\n    \"\"\"The text reversed.\"\"\"",
        "def reverse_text(text):\n    return text[::-1]\n",
        'assert reverse_text("abc") == "cba"\nassert reverse_text("") == ""\n',
    )
    add(
        "t17", "largest_of",
        "def largest_of(values):\n    \"\"\"Largest element of a non-empty list.\"\"\"",
        "def largest_of(values):\n"
        "    best = values[0]\n"
        "    for value in values:\n"
        "        if value > best:\n"
        "            best = value\n"
        "    return best\n",
        "assert largest_of([3, 9, 4]) == 9\nassert largest_of([5]) == 5\n",
    )
    add(
        "t18", "count_vowels",
        "def count_vowels(text):\n    \"\"\"Number of vowels in the text.\"\"\"",
        "def count_vowels(text):\n"
        "    total = 0\n"
        "    for letter in text:\n"
        '        if letter in "aeiou":\n'
        "            total = total + 1\n"
        "    return total\n",
        'assert count_vowels("banana") == 3\nassert count_vowels("xyz") == 0\n',
    )
    add(
        "t19", "flatten_pairs",
        "def flatten_pairs(pairs):\n    \"\"\"Flatten a list of two-element pairs.\"\"\"",
        "def flatten_pairs(pairs):\n"
        "    flat = []\n"
        "    for left, right in pairs:\n"
        "        flat.append(left)\n"
        "        flat.append(right)\n"
        "    return flat\n",
        "assert flatten_pairs([[1, 2], [3, 4]]) == [1, 2, 3, 4]\nassert flatten_pairs([]) == []\n",
    )
    add(
        "t20", "initials",
        "def initials(words):\n    \"\"\"First letters of the words, joined.\"\"\"",
        "def initials(words):\n"
        "    letters = []\n"
        "    for word in words:\n"
        "        letters.append(word[0])\n"
        '    return "".join(letters)\n',
        'assert initials(["alpha", "beta"]) == "ab"\nassert initials([]) == ""\n',
    )
    return tasks


# ---------------------------------------------------------------------------
# self-checks
# ---------------------------------------------------------------------------

def check_runs(source: str, tests: str, should_pass: bool, label: str) -> None:
    namespace: dict = {}
    try:
        exec(compile(source, label, "exec"), namespace)
        exec(compile(tests, label + ":tests", "exec"), namespace)
    except BaseException:
        if should_pass:
            raise AssertionError(f"{label}: expected to pass its tests but failed")
        return
    if not should_pass:
        raise AssertionError(f"{label}: expected to fail its tests but passed")


def check_findings(source: str, expected: set, label: str) -> None:
    got = {f.subcategory.value for f in analyze_snippet(source)}
    if got != expected:
        raise AssertionError(f"{label}: findings {sorted(got)} != expected {sorted(expected)}")


def main() -> None:
    tasks = task_table()
    assert len(tasks) == 20
    assert len({t["task_id"] for t in tasks}) == 20

    for task in tasks:
        label = task["task_id"]
        check_findings(task["source_a"], set(), f"{label} store A")
        check_runs(task["source_a"], task["test_source"], True, f"{label} store A")
        check_findings(task["source_b"], task["b_findings"], f"{label} store B rep0")
        rep1_source = task["source_a"] if task["b_findings_rep1"] != task["b_findings"] else task["source_b"]
        check_findings(rep1_source, task["b_findings_rep1"], f"{label} store B rep1")
        if "SyntaxError" not in task["b_findings"]:
            check_runs(task["source_b"], task["test_source"], task["b_passes"], f"{label} store B")
        long_lines = [ln for ln in task["source_b"].split("\n") if len(ln) > 100]
        if task["b_findings"] == {"SubReadableCode"}:
            assert long_lines, f"{label}: expected a long line"

    OUT.mkdir(parents=True, exist_ok=True)

    bench_lines = []
    for task in tasks:
        obj = {
            "task_id": task["task_id"],
            "prompt": task["prompt"],
            "entry_point": task["entry_point"],
            "test_source": task["test_source"],
        }
        if task["large_inputs"]:
            obj["large_inputs"] = task["large_inputs"]
        bench_lines.append(json.dumps(obj, sort_keys=True))
    (OUT / "benchmark.jsonl").write_text("\n".join(bench_lines) + "\n", encoding="utf-8")

    rows = [[[value for value in range(400)], 3, 10] for _ in range(3)]
    (OUT / "t15_large.jsonl").write_text(
        "\n".join(json.dumps(row) for row in rows) + "\n", encoding="utf-8"
    )

    snippets_a, snippets_b = [], []
    for index, task in enumerate(tasks):
        prose = "Here is the implementation." if index % 3 == 0 else ""
        for rep in (0, 1):
            raw_a = fenced(task["source_a"], prose)
            snippet_a = Snippet.create("baseline", task["task_id"], rep, raw_a, CREATED_A)
            assert snippet_a.source == task["source_a"], f"{task['task_id']} A extract mismatch"
            snippets_a.append(snippet_a)

            source_b = task["source_b"]
            if rep == 1 and task["b_findings_rep1"] != task["b_findings"]:
                source_b = task["source_a"]
            raw_b = fenced(source_b, prose)
            snippet_b = Snippet.create("candidate", task["task_id"], rep, raw_b, CREATED_B)
            assert snippet_b.source == source_b, f"{task['task_id']} B extract mismatch"
            snippets_b.append(snippet_b)

    store_snippets(OUT / "store_a", snippets_a)
    store_snippets(OUT / "store_b", snippets_b)
    print(f"wrote {OUT / 'benchmark.jsonl'} and stores ({len(snippets_a)} + {len(snippets_b)} snippets)")


if __name__ == "__main__":
    main()
