"""Shuffle-quality measurement: sentence BLEU and the relative difference.

Sentence BLEU here quantifies how much local n-gram structure survives a
shuffle, scored per aligned line pair against the original corpus. It is
cumulative (geometric mean of modified n-gram precisions up to the order)
with the standard brevity penalty and no smoothing, so any order with zero
or undefined precision zeroes the score.

The relative difference normalizes an accuracy gap between a reference model
and a perturbed one. Two normalizations are exposed because published
figures disagree with the written definition for tasks whose random baseline
is nonzero; callers pick the mode explicitly.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import corpus_shards, rng_from_seed
from .errors import EmptyReference, Misaligned, ZeroDenominator


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def sentence_bleu(candidate: Sequence[str], reference: Sequence[str], max_n: int = 4) -> float:
    """Cumulative BLEU of one candidate against one reference, in [0, 1].

    Uniform weights over orders 1..max_n; no smoothing. A zero modified
    precision at any order - including the degenerate case where the
    candidate has no n-grams of that order - yields 0. Brevity penalty is 1
    whenever the candidate is at least as long as the reference, which holds
    for all length-preserving shuffles.
    """
    if not reference:
        raise EmptyReference("reference token list is empty")
    if max_n < 1:
        raise ValueError(f"max_n must be >= 1, got {max_n}")
    log_sum = 0.0
    for n in range(1, max_n + 1):
        cand = _ngram_counts(candidate, n)
        total = sum(cand.values())
        if total == 0:
            return 0.0
        ref = _ngram_counts(reference, n)
        hits = sum(min(count, ref[gram]) for gram, count in cand.items())
        if hits == 0:
            return 0.0
        log_sum += math.log(hits / total)
    score = math.exp(log_sum / max_n)
    c, r = len(candidate), len(reference)
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    return bp * score


@dataclass(frozen=True)
class BleuReport:
    """Mean and standard deviation of sentence BLEU per order."""

    means: dict[int, float]
    stds: dict[int, float]
    sample_size: int

    def to_dict(self) -> dict:
        return {
            "orders": {
                str(n): {"mean": self.means[n], "std": self.stds[n]} for n in sorted(self.means)
            },
            "sample_size": self.sample_size,
        }


def _shard_pairs(original: str | Path, shuffled: str | Path) -> list[tuple[str, Path, Path]]:
    orig_shards = corpus_shards(original)
    shuf_shards = corpus_shards(shuffled)
    if len(orig_shards) != len(shuf_shards):
        raise Misaligned(
            f"shard counts differ: {len(orig_shards)} vs {len(shuf_shards)}"
        )
    if Path(original).is_dir() and Path(shuffled).is_dir():
        if [s for s, _ in orig_shards] != [s for s, _ in shuf_shards]:
            raise Misaligned(
                f"shard sets differ: {[s for s, _ in orig_shards]} vs "
                f"{[s for s, _ in shuf_shards]}"
            )
    return [(shard, op, sp) for (shard, op), (_, sp) in zip(orig_shards, shuf_shards)]


def _line_count(path: Path) -> int:
    with open(path, "rb") as fh:
        return sum(1 for _ in fh)


def corpus_shuffle_report(
    original: str | Path,
    shuffled: str | Path,
    sample_size: int,
    seed: int,
    orders: Sequence[int] = (2, 3, 4),
) -> BleuReport:
    """Sample aligned line pairs and report per-order BLEU mean/std.

    Sampling is without replacement over line indices, seeded; both corpora
    are then streamed once, so memory stays proportional to the sample, not
    the corpus.
    """
    pairs = _shard_pairs(original, shuffled)
    total = 0
    for shard, opath, spath in pairs:
        o_count, s_count = _line_count(opath), _line_count(spath)
        if o_count != s_count:
            raise Misaligned(f"shard {shard}: {o_count} vs {s_count} lines")
        total += o_count
    if sample_size > total:
        raise ValueError(f"sample_size {sample_size} exceeds corpus size {total}")
    if sample_size < 1:
        raise ValueError("sample_size must be >= 1")
    rng = rng_from_seed(seed)
    chosen = np.sort(rng.choice(total, size=sample_size, replace=False))
    scores = {n: np.empty(sample_size, dtype=np.float64) for n in orders}
    pos = 0
    idx = 0
    for _, opath, spath in pairs:
        if pos == sample_size:
            break
        with open(opath, encoding="utf-8") as fo, open(spath, encoding="utf-8") as fs:
            for oline, sline in zip(fo, fs):
                if pos < sample_size and idx == chosen[pos]:
                    ref, cand = oline.split(), sline.split()
                    for n in orders:
                        scores[n][pos] = sentence_bleu(cand, ref, max_n=n)
                    pos += 1
                idx += 1
    means = {n: float(scores[n].mean()) for n in orders}
    stds = {n: float(scores[n].std()) for n in orders}
    return BleuReport(means=means, stds=stds, sample_size=sample_size)


@dataclass(frozen=True)
class DeltaInput:
    """Accuracies (in percent) for the relative-difference metric."""

    a_or: float
    a_d: float
    a_rand: float = 0.0
    mode: str = "table-consistent"


def relative_difference(inp: DeltaInput) -> float:
    """Normalized accuracy gap, scaled by 100.

    ``as-written`` divides the gap by (a_or - a_rand); ``table-consistent``
    divides by a_or alone, which is what published values for tasks with a
    nonzero random baseline track. The two agree when a_rand = 0.
    """
    if inp.mode == "as-written":
        denom = inp.a_or - inp.a_rand
    elif inp.mode == "table-consistent":
        denom = inp.a_or
    else:
        raise ValueError(f"unknown delta mode: {inp.mode!r}")
    if denom == 0:
        raise ZeroDenominator(f"mode {inp.mode!r} denominator is zero")
    return 100.0 * (inp.a_or - inp.a_d) / denom
