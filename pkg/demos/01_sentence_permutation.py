#!/usr/bin/env python3
"""Sentence word-order randomization at n-gram orders 1 through 4.

At order 1 every word leaves its original position. Higher orders first fuse
random contiguous n-gram spans into single units, so local word order
survives inside the fused spans while the spans themselves scatter. A
sentence that collapses to a single unit (here: the 4-word sentence at
order 4) passes through unchanged.
"""

from scramblekit import PermuteConfig, SeedPolicy, permute_sentence, tokenize

SENTENCES = [
    "Other related taxa include",
    "All species of Datura are poisonous , especially their seeds and flowers .",
    "Its precise and natural distribution is uncertain , owing to its extensive cultivation .",
]

policy = SeedPolicy(mode="per-sentence", global_seed=13)

for line_no, line in enumerate(SENTENCES):
    sentence = tokenize(line, shard="demo", id=line_no)
    print(f"original: {line}")
    for n in (1, 2, 3, 4):
        cfg = PermuteConfig(n=n)
        out = permute_sentence(sentence, cfg, policy.seed_for("demo", line_no))
        print(f"      n={n}: {out}")
    print()

# determinism: the same seed always reproduces the same permutation
cfg = PermuteConfig(n=1)
s = tokenize(SENTENCES[0])
assert permute_sentence(s, cfg, 99) == permute_sentence(s, cfg, 99)
print("same seed, same output: verified")
