"""Minimal-pair probing: load stimuli, balance inflection classes, score.

A stimulus is a sentence with one focus position and two candidate fillers,
one grammatical and one not; a scorer passes the probe item when it puts
more probability on the grammatical one. Datasets skewed toward one
inflection class reward degenerate scorers, so classes can be rebalanced by
upsampling before scoring. Ties and items the scorer cannot represent are
reported as skipped rather than silently counted wrong.
"""

from __future__ import annotations

import csv
import itertools
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import rng_from_seed
from .errors import (
    AllSkipped,
    DuplicateId,
    EmptyClass,
    InvalidMaskIndex,
    MissingNumberClass,
    StimulusParseError,
)
from .scorers import Scorer, ScoreRequest

_REQUEST_IDS = itertools.count()


@dataclass(frozen=True)
class Stimulus:
    id: str
    tokens: tuple[str, ...]
    mask_index: int
    good: str
    bad: str
    condition: str
    number_class: str | None = None  # "S" | "P"


@dataclass(frozen=True)
class ConditionStats:
    accuracy: float | None  # percent; None when every item was skipped
    mean_prob_diff: float | None  # 100 * mean(P(good) - P(bad))
    item_count: int
    skipped_count: int


@dataclass(frozen=True)
class ProbeReport:
    overall: ConditionStats
    per_condition: dict[str, ConditionStats]
    condition_accuracy_mean: float | None
    condition_accuracy_std: float | None
    seed: int
    balanced: bool

    def to_dict(self) -> dict:
        def stats(s: ConditionStats) -> dict:
            return {
                "accuracy": s.accuracy,
                "mean_prob_diff": s.mean_prob_diff,
                "item_count": s.item_count,
                "skipped_count": s.skipped_count,
            }

        return {
            "overall": stats(self.overall),
            "per_condition": {c: stats(s) for c, s in sorted(self.per_condition.items())},
            "condition_accuracy_mean": self.condition_accuracy_mean,
            "condition_accuracy_std": self.condition_accuracy_std,
            "seed": self.seed,
            "balanced": self.balanced,
        }


def _validate(obj: dict, line_no: int) -> Stimulus:
    try:
        stim = Stimulus(
            id=str(obj["id"]),
            tokens=tuple(str(t) for t in obj["tokens"]),
            mask_index=int(obj["mask_index"]),
            good=str(obj["good"]),
            bad=str(obj["bad"]),
            condition=str(obj.get("condition", "all")),
            number_class=obj.get("number_class"),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise StimulusParseError(f"line {line_no}: {exc}") from exc
    if not (0 <= stim.mask_index < len(stim.tokens)):
        raise InvalidMaskIndex(
            f"item {stim.id!r}: mask_index {stim.mask_index} outside {len(stim.tokens)} tokens"
        )
    if stim.good == stim.bad:
        raise StimulusParseError(f"item {stim.id!r}: good and bad candidates are equal")
    if stim.number_class is not None and stim.number_class not in ("S", "P"):
        raise StimulusParseError(
            f"item {stim.id!r}: number_class must be 'S' or 'P', got {stim.number_class!r}"
        )
    return stim


def load_stimuli(path: str | Path) -> list[Stimulus]:
    """Read and validate a JSON-lines stimulus file; duplicate ids rejected."""
    stimuli: list[Stimulus] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise StimulusParseError(f"line {line_no}: invalid JSON: {exc}") from exc
            stim = _validate(obj, line_no)
            if stim.id in seen:
                raise DuplicateId(f"duplicate stimulus id {stim.id!r}")
            seen.add(stim.id)
            stimuli.append(stim)
    return stimuli


def convert_tsv(tsv_path: str | Path, out_path: str | Path) -> int:
    """Convert a simple TSV stimulus sheet to the JSON-lines format.

    Columns: sentence, mask token index, good, bad, condition, class
    (class may be empty). Returns the number of items written.
    """
    count = 0
    with open(tsv_path, encoding="utf-8", newline="") as fin, open(
        out_path, "w", encoding="utf-8"
    ) as fout:
        for row_no, row in enumerate(csv.reader(fin, delimiter="\t"), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) < 5:
                raise StimulusParseError(f"row {row_no}: expected >= 5 columns, got {len(row)}")
            sentence, mask_index, good, bad, condition = row[:5]
            number_class = row[5].strip() if len(row) > 5 and row[5].strip() else None
            obj = {
                "id": f"tsv-{row_no}",
                "tokens": sentence.split(),
                "mask_index": int(mask_index),
                "good": good,
                "bad": bad,
                "condition": condition,
            }
            if number_class is not None:
                obj["number_class"] = number_class
            _validate(obj, row_no)
            fout.write(json.dumps(obj, ensure_ascii=False) + "\n")
            count += 1
    return count


def _upsample_target(s_count: int, strict_next: bool) -> int:
    target = ((s_count + 99) // 100) * 100
    if strict_next and s_count % 100 == 0:
        target = s_count + 100
    return target


def balance_stimuli(
    stimuli: Sequence[Stimulus], seed: int, strict_next: bool = False
) -> list[Stimulus]:
    """Equalize singular/plural counts per condition by upsampling.

    The target is the next multiple of 100 at or above the singular count
    (``strict_next`` forces strictly above when already a multiple); if the
    plural class is larger than that, the target rises to the next multiple
    of 100 covering it, so items are only ever added. Both classes keep all
    originals plus seeded with-replacement draws; the result is shuffled
    deterministically.
    """
    for stim in stimuli:
        if stim.number_class is None:
            raise MissingNumberClass(f"item {stim.id!r} has no number_class")
    rng = rng_from_seed(seed)
    by_condition: dict[str, list[Stimulus]] = {}
    for stim in stimuli:
        by_condition.setdefault(stim.condition, []).append(stim)
    out: list[Stimulus] = []
    for condition in sorted(by_condition):
        items = by_condition[condition]
        singular = [s for s in items if s.number_class == "S"]
        plural = [s for s in items if s.number_class == "P"]
        if not singular or not plural:
            raise EmptyClass(f"condition {condition!r} lacks one inflection class")
        target = _upsample_target(len(singular), strict_next)
        if len(plural) > target:
            target = _upsample_target(len(plural), strict_next)
        for group in (singular, plural):
            out.extend(group)
            extra = target - len(group)
            if extra:
                draws = rng.integers(0, len(group), size=extra)
                out.extend(group[int(i)] for i in draws)
    order = rng.permutation(len(out))
    return [out[int(i)] for i in order]


def run_probe(
    stimuli: Sequence[Stimulus],
    scorer: Scorer,
    balance: bool = False,
    seed: int = 0,
    strict_next: bool = False,
) -> ProbeReport:
    """Score every stimulus and aggregate accuracy and probability gaps.

    An item counts correct when the grammatical candidate gets strictly more
    log-probability; ties and items with either candidate skipped are
    excluded from the accuracy denominator and surfaced in skipped counts.
    Aggregation is order-independent.
    """
    if not stimuli:
        raise ValueError("stimuli must be non-empty")
    items = balance_stimuli(stimuli, seed, strict_next) if balance else list(stimuli)
    requests = [
        ScoreRequest(
            id=f"probe-{next(_REQUEST_IDS)}",
            tokens=stim.tokens,
            mask_index=stim.mask_index,
            candidates=(stim.good, stim.bad),
        )
        for stim in items
    ]
    responses = scorer.score_many(requests)

    per_condition: dict[str, list[tuple[bool, float] | None]] = {}
    for stim, resp in zip(items, responses):
        bucket = per_condition.setdefault(stim.condition, [])
        if resp.skipped or resp.logprobs[0] == resp.logprobs[1]:
            bucket.append(None)
        else:
            correct = resp.logprobs[0] > resp.logprobs[1]
            diff = math.exp(resp.logprobs[0]) - math.exp(resp.logprobs[1])
            bucket.append((correct, diff))

    def aggregate(outcomes: Iterable[tuple[bool, float] | None]) -> ConditionStats:
        outcomes = list(outcomes)
        scored = [o for o in outcomes if o is not None]
        skipped = len(outcomes) - len(scored)
        if not scored:
            return ConditionStats(None, None, len(outcomes), skipped)
        accuracy = 100.0 * sum(1 for correct, _ in scored if correct) / len(scored)
        prob_diff = 100.0 * math.fsum(d for _, d in scored) / len(scored)
        return ConditionStats(accuracy, prob_diff, len(outcomes), skipped)

    stats = {c: aggregate(per_condition[c]) for c in sorted(per_condition)}
    overall = aggregate(o for c in sorted(per_condition) for o in per_condition[c])
    if overall.accuracy is None:
        raise AllSkipped("every probe item was skipped or tied")
    accuracies = [s.accuracy for s in stats.values() if s.accuracy is not None]
    acc_arr = np.array(accuracies, dtype=np.float64)
    return ProbeReport(
        overall=overall,
        per_condition=stats,
        condition_accuracy_mean=float(acc_arr.mean()),
        condition_accuracy_std=float(acc_arr.std()),
        seed=seed,
        balanced=balance,
    )
