"""Pseudo-log-likelihood of sentences and its bootstrapped perplexity.

The pseudo-log-likelihood of a sentence is the mean log-probability its
tokens receive when each position is masked in turn and scored in the
context of the rest. The bootstrap pseudo-perplexity draws sentences with
replacement from a corpus (k rounds of m) and exponentiates the negated mean
PLL of the combined sample. Sentences are weighted equally regardless of
length; a token-weighted variant is reported alongside.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .corpus import Sentence, rng_from_seed
from .errors import AllTokensSkipped, EmptyCorpus, EmptySentence
from .scorers import Scorer, ScoreRequest

_REQUEST_IDS = itertools.count()


@dataclass(frozen=True)
class PllResult:
    sentence_id: str
    pll: float
    token_count: int
    skipped_tokens: int


@dataclass(frozen=True)
class BpllResult:
    bpll: float
    bpll_token_weighted: float
    mean_pll: float
    k: int
    m: int
    seed: int


def pll(sentence: Sentence, scorer: Scorer) -> PllResult:
    """Mean per-token log-probability under iterative single-token masking.

    Positions the scorer skips are excluded from the mean and counted; a
    sentence whose every position is skipped raises instead of pretending a
    score exists.
    """
    tokens = sentence.tokens
    if not tokens:
        raise EmptySentence(f"{sentence.shard}:{sentence.id} has no tokens")
    requests = [
        ScoreRequest(
            id=f"pll-{next(_REQUEST_IDS)}",
            tokens=tokens,
            mask_index=i,
            candidates=(tokens[i],),
        )
        for i in range(len(tokens))
    ]
    responses = scorer.score_many(requests)
    logprobs = [r.logprobs[0] for r in responses if 0 not in r.skipped]
    skipped = len(tokens) - len(logprobs)
    if not logprobs:
        raise AllTokensSkipped(f"{sentence.shard}:{sentence.id}: scorer skipped every token")
    return PllResult(
        sentence_id=f"{sentence.shard}:{sentence.id}",
        pll=math.fsum(logprobs) / len(logprobs),
        token_count=len(tokens),
        skipped_tokens=skipped,
    )


def bpll(
    corpus: Sequence[Sentence],
    scorer: Scorer,
    k: int = 5,
    m: int = 100,
    seed: int = 0,
) -> BpllResult:
    """Bootstrap pseudo-perplexity over k rounds of m draws with replacement.

    Each drawn sentence contributes its PLL once per draw; PLL is computed
    once per distinct sentence. The headline number weights sentences
    equally; ``bpll_token_weighted`` pools log-probability mass over tokens
    instead.
    """
    sentences = list(corpus)
    if not sentences:
        raise EmptyCorpus("bpll needs at least one sentence")
    if k < 1 or m < 1:
        raise ValueError("k and m must be >= 1")
    rng = rng_from_seed(seed)
    draws = rng.integers(0, len(sentences), size=k * m)
    cache: dict[int, PllResult] = {}
    for idx in draws:
        if int(idx) not in cache:
            cache[int(idx)] = pll(sentences[int(idx)], scorer)
    picked = [cache[int(i)] for i in draws]
    mean_pll = math.fsum(r.pll for r in picked) / len(picked)
    scored_tokens = sum(r.token_count - r.skipped_tokens for r in picked)
    mass = math.fsum(r.pll * (r.token_count - r.skipped_tokens) for r in picked)
    return BpllResult(
        bpll=math.exp(-mean_pll),
        bpll_token_weighted=math.exp(-mass / scored_tokens),
        mean_pll=mean_pll,
        k=k,
        m=m,
        seed=seed,
    )
