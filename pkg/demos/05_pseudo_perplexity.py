#!/usr/bin/env python3
"""Pseudo-log-likelihood scoring and bootstrap pseudo-perplexity.

Every token is masked in turn and scored by a pluggable scorer; a sentence's
PLL is the mean log-probability, and the corpus-level number bootstraps
sentences with replacement and exponentiates the negated mean. Two built-in
scorers anchor the scale: the uniform scorer's bootstrap perplexity is
exactly its vocabulary size, and a unigram scorer rewards corpora whose
tokens match its frequency table.
"""

import tempfile
from pathlib import Path

from scramblekit import (
    UnigramScorer,
    UniformScorer,
    bpll,
    build_atom_table,
    pll,
    tokenize,
)

corpus = [
    tokenize(line, shard="demo", id=i)
    for i, line in enumerate(
        [
            "the cat sat on the mat",
            "the dog sat on the rug",
            "a cat and a dog",
            "the mat and the rug",
        ]
    )
]

uniform = UniformScorer(100)
print("uniform scorer, vocabulary 100:")
for sentence in corpus[:2]:
    result = pll(sentence, uniform)
    print(f"  PLL({sentence.raw!r}) = {result.pll:.5f}")
result = bpll(corpus, uniform, k=5, m=100, seed=0)
print(f"  BPLL = {result.bpll:.6f} (equals the vocabulary size)\n")

workdir = Path(tempfile.mkdtemp(prefix="scramblekit-demo-"))
source = workdir / "source.txt"
source.write_text("\n".join(s.raw for s in corpus) + "\n", encoding="utf-8")
table, _ = build_atom_table(source)
unigram = UnigramScorer(table, alpha=1.0)

print("unigram scorer built from the same corpus:")
in_domain = bpll(corpus, unigram, k=5, m=100, seed=0)
print(f"  BPLL on its own corpus        = {in_domain.bpll:.2f}")
alien = [tokenize("zebra quark nebula flux", id=0)]
out_domain = bpll(alien, unigram, k=5, m=100, seed=0)
print(f"  BPLL on unseen words          = {out_domain.bpll:.2f}")
print(f"  token-weighted variant (own)  = {in_domain.bpll_token_weighted:.2f}")
