#!/usr/bin/env python3
"""Minimal-pair probing with inflection balancing.

Each stimulus masks one focus position and offers a grammatical and an
ungrammatical filler; a scorer passes when it ranks the grammatical one
higher. The raw stimulus set below is skewed toward singular items, which
flatters a scorer that just prefers singular forms - balancing the classes
by upsampling removes that shortcut, which shows up as a large accuracy
drop for the degenerate scorer.
"""

import math

from scramblekit import Scorer, ScoreResponse, Stimulus, balance_stimuli, run_probe

# 90 singular-correct items, 10 plural-correct items
stimuli = []
for i in range(90):
    stimuli.append(
        Stimulus(
            id=f"s{i}", tokens=("The", "key", "X", "here"), mask_index=2,
            good="is", bad="are", condition="simple", number_class="S",
        )
    )
for i in range(10):
    stimuli.append(
        Stimulus(
            id=f"p{i}", tokens=("The", "keys", "X", "here"), mask_index=2,
            good="are", bad="is", condition="simple", number_class="P",
        )
    )


class SingularBiasScorer(Scorer):
    """Degenerate scorer: always prefers the singular form."""

    def score(self, request):
        probs = {"is": 0.6, "are": 0.4}
        return ScoreResponse(
            id=request.id,
            logprobs=tuple(math.log(probs[c]) for c in request.candidates),
        )


scorer = SingularBiasScorer()
raw = run_probe(stimuli, scorer, balance=False, seed=0)
balanced = run_probe(stimuli, scorer, balance=True, seed=0)
print(f"singular-bias scorer, raw skewed set: accuracy {raw.overall.accuracy:.1f}")
print(f"singular-bias scorer, balanced set:   accuracy {balanced.overall.accuracy:.1f}")

counts = balance_stimuli(stimuli, seed=0)
n_s = sum(1 for s in counts if s.number_class == "S")
n_p = sum(1 for s in counts if s.number_class == "P")
print(f"balanced class counts: S={n_s}, P={n_p} (equal, a multiple of 100)")
print(f"mean probability difference (balanced): {balanced.overall.mean_prob_diff:.2f}")
