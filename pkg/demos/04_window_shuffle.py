#!/usr/bin/env python3
"""Shuffling across sentence boundaries inside fixed-size token buffers.

Whole sentences are packed into buffers of at most max_tokens words; each
buffer is shuffled as one unit, so words migrate between sentences while
the stream's total content is preserved. Compare the small buffer (several
output blocks) with a buffer big enough to swallow everything (one block).
"""

from scramblekit import SeedPolicy, WindowConfig, tokenize, window_shuffle

LINES = [
    "the cat sat on the mat",
    "a dog barked at the moon",
    "birds sing in the morning",
    "rivers run to the sea",
]
sentences = [tokenize(line, shard="demo", id=i) for i, line in enumerate(LINES)]
policy = SeedPolicy(mode="per-sentence", global_seed=3)

for max_tokens in (12, 512):
    blocks = list(window_shuffle(iter(sentences), WindowConfig(max_tokens=max_tokens), policy))
    print(f"max_tokens={max_tokens}: {len(blocks)} block(s)")
    for block in blocks:
        print(f"  [{len(block.split()):>2} tokens] {block}")
    print()

all_words = sorted(w for line in LINES for w in line.split())
shuffled_words = sorted(
    w
    for block in window_shuffle(iter(sentences), WindowConfig(max_tokens=512), policy)
    for w in block.split()
)
assert all_words == shuffled_words
print("word multiset preserved across the whole stream: verified")
