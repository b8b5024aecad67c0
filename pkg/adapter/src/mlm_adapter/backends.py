"""Model backends: a JSON stub for testing and a transformers wrapper.

A backend answers one call: given whitespace tokens, a masked position, and
the candidate strings already carrying the configured space prefix, return a
log-probability per candidate plus the indices it cannot represent as a
single vocabulary unit. Candidates are never approximated: anything that
does not map to exactly one known unit is skipped.
"""

from __future__ import annotations

import json
import math
from pathlib import Path


class StubBackend:
    """Context-free distribution read from a JSON file.

    File format: ``{"vocab": {"token": weight, ...}}``; weights are
    normalized to a probability distribution over the stub vocabulary. A
    candidate is a single unit iff it appears in the vocabulary (the space
    prefix is stripped first; the stub vocabulary is space-agnostic).
    """

    def __init__(self, path: str | Path):
        spec = json.loads(Path(path).read_text(encoding="utf-8"))
        vocab = spec["vocab"]
        if not vocab:
            raise ValueError(f"{path}: stub vocab is empty")
        total = sum(vocab.values())
        if total <= 0:
            raise ValueError(f"{path}: stub weights must sum to a positive value")
        self.logprobs = {tok: math.log(w / total) for tok, w in vocab.items() if w > 0}
        self.zero_weight = {tok for tok, w in vocab.items() if w <= 0}

    def score(
        self, tokens: list[str], mask_index: int, candidates: list[str]
    ) -> tuple[list[float], list[int]]:
        logprobs: list[float] = []
        skipped: list[int] = []
        for i, cand in enumerate(candidates):
            key = cand.lstrip(" ")
            if key in self.logprobs:
                logprobs.append(self.logprobs[key])
            else:
                # unknown or zero-probability: not representable as one unit
                logprobs.append(0.0)
                skipped.append(i)
        return logprobs, skipped


class HfBackend:
    """Wraps a transformers masked LM in deterministic eval mode."""

    def __init__(self, model_id: str, device: str = "cpu"):
        import torch
        from transformers import AutoModelForMaskedLM, AutoTokenizer

        self._torch = torch
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        if self.tokenizer.mask_token_id is None:
            raise ValueError(f"{model_id}: tokenizer exposes no mask token")
        self.model = AutoModelForMaskedLM.from_pretrained(model_id).to(device).eval()
        self.device = device
        torch.manual_seed(0)

    def _single_unit(self, text: str) -> int | None:
        ids = self.tokenizer.encode(text, add_special_tokens=False)
        if len(ids) != 1:
            return None
        if ids[0] == self.tokenizer.unk_token_id:
            return None
        return ids[0]

    def score(
        self, tokens: list[str], mask_index: int, candidates: list[str]
    ) -> tuple[list[float], list[int]]:
        torch = self._torch
        text_tokens = list(tokens)
        text_tokens[mask_index] = self.tokenizer.mask_token
        encoding = self.tokenizer(" ".join(text_tokens), return_tensors="pt").to(self.device)
        mask_positions = (
            (encoding["input_ids"][0] == self.tokenizer.mask_token_id).nonzero().flatten()
        )
        if len(mask_positions) != 1:
            raise ValueError(
                f"expected exactly one mask position, found {len(mask_positions)}"
            )
        with torch.no_grad():
            logits = self.model(**encoding).logits[0, int(mask_positions[0])]
        log_dist = torch.log_softmax(logits, dim=-1)
        logprobs: list[float] = []
        skipped: list[int] = []
        for i, cand in enumerate(candidates):
            unit = self._single_unit(cand)
            if unit is None:
                logprobs.append(0.0)
                skipped.append(i)
            else:
                logprobs.append(float(log_dist[unit]))
        return logprobs, skipped


def load_backend(model: str, device: str = "cpu"):
    """``stub:PATH`` loads the JSON stub; anything else goes to transformers."""
    kind, sep, rest = model.partition(":")
    if sep and kind == "stub":
        return StubBackend(rest)
    return HfBackend(model, device=device)
