"""The request loop: line-delimited JSON over stdio.

Protocol: emit ``{"protocol": "scramblekit-score", "version": 1}`` first,
then answer each request line with one response line. Responses carry the
request id, one logprob per candidate (placeholder 0.0 in skipped slots),
and the indices of candidates the backend cannot represent as one unit.
Malformed requests are answered with ``{"id": ..., "error": "..."}`` rather
than crashing the process; the model-load failure path exits nonzero before
the handshake so clients fail fast.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from typing import IO

from .backends import load_backend

PROTOCOL_NAME = "scramblekit-score"
PROTOCOL_VERSION = 1


@dataclass(frozen=True)
class AdapterConfig:
    model: str
    device: str = "cpu"
    space_prefix: bool = True
    batch_timeout_s: float = 30.0  # advisory; enforcement is the client's side


def _validate(obj) -> tuple[str, list[str], int, list[str]]:
    if not isinstance(obj, dict):
        raise ValueError("request must be a JSON object")
    rid = obj.get("id")
    if not isinstance(rid, str):
        raise ValueError("missing or non-string id")
    tokens = obj.get("tokens")
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise ValueError("tokens must be a list of strings")
    mask_index = obj.get("mask_index")
    if not isinstance(mask_index, int) or not (0 <= mask_index < len(tokens)):
        raise ValueError(f"mask_index must be an int in [0, {len(tokens)})")
    candidates = obj.get("candidates")
    if (
        not isinstance(candidates, list)
        or not candidates
        or not all(isinstance(c, str) for c in candidates)
    ):
        raise ValueError("candidates must be a non-empty list of strings")
    return rid, tokens, mask_index, candidates


def serve(config: AdapterConfig, stdin: IO[str] | None = None, stdout: IO[str] | None = None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout

    def emit(obj: dict) -> None:
        stdout.write(json.dumps(obj, ensure_ascii=False) + "\n")
        stdout.flush()

    try:
        backend = load_backend(config.model, device=config.device)
    except Exception as exc:
        print(f"mlm-adapter: failed to load model {config.model!r}: {exc}", file=sys.stderr)
        return 1

    emit({"protocol": PROTOCOL_NAME, "version": PROTOCOL_VERSION})
    for line in stdin:
        if not line.strip():
            continue
        rid = None
        try:
            obj = json.loads(line)
            if isinstance(obj, dict) and isinstance(obj.get("id"), str):
                rid = obj["id"]
            rid_checked, tokens, mask_index, candidates = _validate(obj)
            prefixed = [
                (" " + c) if config.space_prefix else c for c in candidates
            ]
            logprobs, skipped = backend.score(tokens, mask_index, prefixed)
            response = {"id": rid_checked, "logprobs": logprobs}
            if skipped:
                response["skipped"] = skipped
            emit(response)
        except Exception as exc:
            emit({"id": rid, "error": str(exc)})
    return 0
