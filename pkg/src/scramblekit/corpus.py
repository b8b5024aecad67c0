"""Core text data model: sentences, atoms, seed derivation, corpus streaming.

A corpus is a UTF-8 plain-text file (one sentence per line, LF endings) or a
directory of ``*.txt`` files; each file is one shard and the shard id is the
file name. All types here are immutable value objects, so they can be shared
freely across threads and processes.

Randomness discipline: every random decision in the toolkit is driven by a
``numpy.random.Generator`` backed by PCG64, created from an effective seed
that is a pure function of ``(SeedPolicy, shard, sentence id)``. Per-sentence
and per-shard seeds are derived with BLAKE2b-64 keyed by the global seed, so
parallel workers never share RNG state.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Literal

import numpy as np

SeedMode = Literal["fixed", "per-sentence", "per-shard"]

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class Sentence:
    """One corpus line: ``tokens`` is the whitespace split of ``raw``."""

    id: int
    shard: str
    tokens: tuple[str, ...]
    raw: str


@dataclass(frozen=True)
class Atom:
    """Shuffling unit: a single word or an n-gram span fused into one unit."""

    words: tuple[str, ...]

    @property
    def conjoined(self) -> bool:
        return len(self.words) > 1

    @property
    def text(self) -> str:
        return " ".join(self.words)


@dataclass(frozen=True)
class AtomSequence:
    atoms: tuple[Atom, ...]

    @property
    def source_len(self) -> int:
        """Count of underlying word tokens across all atoms."""
        return sum(len(a.words) for a in self.atoms)

    def flatten(self) -> list[str]:
        """Word tokens in atom order."""
        return [w for a in self.atoms for w in a.words]


@dataclass(frozen=True)
class SeedPolicy:
    """How per-sentence seeds are derived from one global seed.

    ``fixed`` reuses the global seed for every sentence (so equal-length
    sentences permute identically), ``per-shard`` mixes in the shard id, and
    ``per-sentence`` additionally mixes in the line number.
    """

    mode: SeedMode = "fixed"
    global_seed: int = 0

    def seed_for(self, shard: str, id: int) -> int:
        return effective_seed(self, shard, id)


def effective_seed(policy: SeedPolicy, shard: str, id: int) -> int:
    """Derive the 64-bit seed for one sentence under a seed policy.

    The mixer is BLAKE2b with an 8-byte digest, keyed by the global seed;
    shard and id are fed length-unambiguously (file names cannot contain
    NUL). Stable across platforms and Python versions.
    """
    if policy.mode == "fixed":
        return policy.global_seed & _SEED_MASK
    key = (policy.global_seed & _SEED_MASK).to_bytes(8, "little")
    h = hashlib.blake2b(digest_size=8, key=key)
    h.update(shard.encode("utf-8"))
    if policy.mode == "per-sentence":
        h.update(b"\x00")
        h.update(int(id).to_bytes(8, "little", signed=False))
    return int.from_bytes(h.digest(), "little")


def rng_from_seed(seed: int) -> np.random.Generator:
    """The toolkit's RNG: PCG64 seeded with a 64-bit integer."""
    return np.random.Generator(np.random.PCG64(seed))


def tokenize(line: str, shard: str = "-", id: int = 0) -> Sentence:
    """Split a line into maximal runs of non-whitespace.

    Empty lines yield zero tokens; downstream operations decide what that
    means. ``raw`` is preserved verbatim.
    """
    return Sentence(id=id, shard=shard, tokens=tuple(line.split()), raw=line)


def corpus_shards(path: str | Path) -> list[tuple[str, Path]]:
    """Resolve a corpus path to ``(shard id, file path)`` pairs.

    A file is a single shard; a directory contributes every ``*.txt`` file,
    sorted by name for deterministic iteration order.
    """
    p = Path(path)
    if p.is_dir():
        return [(f.name, f) for f in sorted(p.glob("*.txt"))]
    return [(p.name, p)]


def iter_shard(shard: str, path: Path) -> Iterator[Sentence]:
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh):
            yield tokenize(line.rstrip("\n"), shard=shard, id=i)


def iter_corpus(path: str | Path) -> Iterator[Sentence]:
    """Stream every sentence of a corpus, shard by shard."""
    for shard, file in corpus_shards(path):
        yield from iter_shard(shard, file)
