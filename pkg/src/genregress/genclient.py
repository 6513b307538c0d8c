"""Model querying and the on-disk snippet store.

Snippets live at ``<store>/<role>/<task_id>/<rep>.py`` with a ``<rep>.json``
sidecar carrying provenance (role, task, rep, content hash, timestamp, raw
completion). Task ids are percent-encoded for the directory name; the
sidecar keeps the raw id. The store is the interchange surface for offline
analysis: anything that can produce this layout can be compared.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import time
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional

logger = logging.getLogger(__name__)

RETRY_ATTEMPTS = 3
RETRY_BACKOFF_S = 1.0


class GenerationError(RuntimeError):
    def __init__(self, message: str, status: Optional[int] = None) -> None:
        super().__init__(message)
        self.status = status


class StoreError(RuntimeError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    role: str  # "baseline" | "candidate"
    endpoint_url: str
    model_name: str
    api_key_env: str = ""
    temperature: float = 0.1
    max_tokens: int = 2048
    top_p: float = 0.95

    def __post_init__(self) -> None:
        if self.role not in ("baseline", "candidate"):
            raise ValueError(f"role must be baseline or candidate, got {self.role!r}")
        if not 0 <= self.temperature <= 2:
            raise ValueError("temperature must be in [0, 2]")
        if not 0 < self.top_p <= 1:
            raise ValueError("top_p must be in (0, 1]")
        if self.max_tokens < 1:
            raise ValueError("max_tokens must be >= 1")


@dataclass(frozen=True)
class RunConfig:
    gens: int = 10
    perf_reps: int = 5
    timeout_s: int = 30
    duplication_min_tokens: int = 10
    alpha: float = 0.05

    def __post_init__(self) -> None:
        if self.gens < 1:
            raise ValueError("gens must be >= 1")
        if self.perf_reps < 1:
            raise ValueError("perf_reps must be >= 1")
        if self.timeout_s < 1:
            raise ValueError("timeout_s must be >= 1")
        if self.duplication_min_tokens < 2:
            raise ValueError("duplication_min_tokens must be >= 2")
        if not 0 < self.alpha <= 0.5:
            raise ValueError("alpha must be in (0, 0.5]")


@dataclass(frozen=True)
class Snippet:
    model_role: str
    task_id: str
    rep_index: int
    source: str
    raw_completion: str
    created_at: str
    source_hash: str

    @staticmethod
    def hash_source(source: str) -> str:
        return hashlib.sha256(source.encode("utf-8")).hexdigest()

    @classmethod
    def create(
        cls, model_role: str, task_id: str, rep_index: int, raw_completion: str,
        created_at: Optional[str] = None,
    ) -> "Snippet":
        source = extract_code(raw_completion)
        return cls(
            model_role=model_role,
            task_id=task_id,
            rep_index=rep_index,
            source=source,
            raw_completion=raw_completion,
            created_at=created_at or _utc_now(),
            source_hash=cls.hash_source(source),
        )


def _utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


# ---------------------------------------------------------------------------
# code extraction
# ---------------------------------------------------------------------------

_FENCE_RE = re.compile(r"^```([A-Za-z0-9_+-]*)[ \t]*$")
_TARGET_TAGS = ("python", "py", "python3")


def extract_code(raw_completion: str) -> str:
    """Pull program text out of a chat completion.

    Preference order: first fence tagged for the target language, then the
    first untagged fence, then the whole completion verbatim. Trailing
    whitespace is normalized to exactly one final newline.
    """
    fences: list[tuple[str, str]] = []  # (tag, body)
    tag: Optional[str] = None
    body: list[str] = []
    for line in raw_completion.split("\n"):
        stripped = line.strip()
        if tag is None:
            match = _FENCE_RE.match(stripped)
            if match is not None:
                tag = match.group(1).lower()
                body = []
        elif stripped.startswith("```"):
            fences.append((tag, "\n".join(body)))
            tag = None
        else:
            body.append(line)
    if tag is not None:
        fences.append((tag, "\n".join(body)))  # unclosed fence runs to the end

    chosen: Optional[str] = None
    for fence_tag, fence_body in fences:
        if fence_tag in _TARGET_TAGS:
            chosen = fence_body
            break
    if chosen is None:
        for fence_tag, fence_body in fences:
            if fence_tag == "":
                chosen = fence_body
                break
    if chosen is None:
        chosen = raw_completion

    return chosen.rstrip() + "\n"


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

def _post_chat_completion(cfg: ModelConfig, prompt: str, timeout_s: float) -> str:
    payload = {
        "model": cfg.model_name,
        "messages": [{"role": "user", "content": prompt}],
        "temperature": cfg.temperature,
        "top_p": cfg.top_p,
        "max_tokens": cfg.max_tokens,
    }
    headers = {"Content-Type": "application/json"}
    api_key = os.environ.get(cfg.api_key_env, "") if cfg.api_key_env else ""
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    url = cfg.endpoint_url.rstrip("/") + "/chat/completions"
    request = urllib.request.Request(
        url, data=json.dumps(payload).encode("utf-8"), headers=headers, method="POST"
    )
    try:
        with urllib.request.urlopen(request, timeout=timeout_s) as response:
            raw = response.read().decode("utf-8")
    except urllib.error.HTTPError as err:
        excerpt = err.read().decode("utf-8", errors="replace")[:200]
        raise GenerationError(
            f"endpoint returned {err.code}: {excerpt}", status=err.code
        ) from err
    except urllib.error.URLError as err:
        raise GenerationError(f"cannot reach endpoint {url}: {err.reason}") from err

    try:
        doc = json.loads(raw)
        content = doc["choices"][0]["message"]["content"]
    except (json.JSONDecodeError, KeyError, IndexError, TypeError) as err:
        raise GenerationError(f"completion missing content: {raw[:200]}") from err
    if content is None:
        raise GenerationError("completion missing content: content is null")
    return content


def generate_snippets(
    cfg: ModelConfig,
    task,
    gens: int,
    *,
    request_timeout_s: float = 120.0,
    backoff_s: float = RETRY_BACKOFF_S,
) -> list["Snippet"]:
    """One snippet per repetition via independent completion requests.

    Transient failures are retried RETRY_ATTEMPTS times with exponential
    backoff before the error surfaces.
    """
    if gens < 1:
        raise ValueError("gens must be >= 1")
    snippets = []
    for rep in range(gens):
        last_error: Optional[GenerationError] = None
        for attempt in range(RETRY_ATTEMPTS):
            try:
                completion = _post_chat_completion(cfg, task.prompt, request_timeout_s)
                snippets.append(Snippet.create(cfg.role, task.task_id, rep, completion))
                last_error = None
                break
            except GenerationError as err:
                last_error = err
                if attempt + 1 < RETRY_ATTEMPTS:
                    delay = backoff_s * (2**attempt)
                    logger.warning(
                        "generation attempt %d failed for %s rep %d (%s); retrying in %.1fs",
                        attempt + 1, task.task_id, rep, err, delay,
                    )
                    time.sleep(delay)
        if last_error is not None:
            raise last_error
    return snippets


# ---------------------------------------------------------------------------
# snippet store
# ---------------------------------------------------------------------------

def _task_dirname(task_id: str) -> str:
    return urllib.parse.quote(task_id, safe="")


def store_snippets(store_dir: Path | str, snippets: list[Snippet]) -> None:
    """Write snippets (idempotent; source bytes round-trip exactly)."""
    store_dir = Path(store_dir)
    for snippet in snippets:
        task_dir = store_dir / snippet.model_role / _task_dirname(snippet.task_id)
        task_dir.mkdir(parents=True, exist_ok=True)
        (task_dir / f"{snippet.rep_index}.py").write_text(snippet.source, encoding="utf-8")
        sidecar = {
            "model_role": snippet.model_role,
            "task_id": snippet.task_id,
            "rep_index": snippet.rep_index,
            "source_hash": snippet.source_hash,
            "created_at": snippet.created_at,
            "raw_completion": snippet.raw_completion,
        }
        (task_dir / f"{snippet.rep_index}.json").write_text(
            json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8"
        )


def load_snippet_store(store_dir: Path | str) -> dict[tuple[str, str, int], Snippet]:
    """Read every snippet in a store, verifying sidecar hashes.

    Gaps in rep indices are warnings, not errors; a hash mismatch or a
    missing sidecar is an integrity error.
    """
    store_dir = Path(store_dir)
    snippets: dict[tuple[str, str, int], Snippet] = {}
    if not store_dir.exists():
        return snippets

    for source_path in sorted(store_dir.glob("*/*/*.py")):
        sidecar_path = source_path.with_suffix(".json")
        if not sidecar_path.exists():
            raise StoreError(f"missing sidecar for {source_path}")
        source = source_path.read_text(encoding="utf-8")
        meta = json.loads(sidecar_path.read_text(encoding="utf-8"))
        actual = Snippet.hash_source(source)
        if actual != meta["source_hash"]:
            raise StoreError(
                f"hash mismatch for {source_path}: sidecar says {meta['source_hash'][:12]}…, "
                f"file is {actual[:12]}…"
            )
        snippet = Snippet(
            model_role=meta["model_role"],
            task_id=meta["task_id"],
            rep_index=int(meta["rep_index"]),
            source=source,
            raw_completion=meta.get("raw_completion", ""),
            created_at=meta.get("created_at", ""),
            source_hash=meta["source_hash"],
        )
        snippets[(snippet.model_role, snippet.task_id, snippet.rep_index)] = snippet

    by_task: dict[tuple[str, str], list[int]] = {}
    for role, task_id, rep in snippets:
        by_task.setdefault((role, task_id), []).append(rep)
    for (role, task_id), reps in sorted(by_task.items()):
        reps.sort()
        if reps != list(range(len(reps))):
            logger.warning(
                "store %s has rep gaps for role=%s task=%s: %s", store_dir, role, task_id, reps
            )
    return snippets
