"""Atom inventories and bootstrap-resampled corpora.

Builds a frequency table of atoms (single words, plus named-entity spans
fused into multi-word atoms when annotations are supplied) and emits a new
corpus of i.i.d. draws from that inventory - frequency-weighted to keep the
unigram distribution, or uniform over distinct atoms to destroy it. The
emitted corpus reproduces the source shape exactly: same shards, same line
count, same atom count per line, so downstream loaders see identical
structure with all co-occurrence information gone.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

from .corpus import SeedPolicy, Sentence, iter_corpus, rng_from_seed
from .errors import EmptyCorpus, InvalidSpan

ResampleMode = str  # "frequency" | "uniform"


@dataclass
class AtomTable:
    """Atom string -> occurrence count; the sampling inventory."""

    entries: dict[str, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.entries.values())

    def add(self, atom: str, count: int = 1) -> None:
        if not atom:
            raise ValueError("empty-string atoms are not allowed")
        self.entries[atom] = self.entries.get(atom, 0) + count

    def merge(self, other: "AtomTable") -> None:
        for atom, count in other.entries.items():
            self.add(atom, count)

    def to_json(self) -> str:
        return json.dumps(self.entries, ensure_ascii=False, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "AtomTable":
        table = cls()
        for atom, count in json.loads(text).items():
            table.add(atom, int(count))
        return table


@dataclass(frozen=True)
class EntityAnnotation:
    """Named-entity spans for one line, as half-open token-index intervals."""

    shard: str
    line: int
    spans: tuple[tuple[int, int], ...]


@dataclass
class CorpusShape:
    """Per-sentence atom counts, per shard, in corpus order."""

    shards: list[tuple[str, list[int]]] = field(default_factory=list)

    @property
    def total_atoms(self) -> int:
        return sum(sum(counts) for _, counts in self.shards)


def load_annotations(path: str | Path) -> dict[tuple[str, int], EntityAnnotation]:
    """Read the JSON-lines annotation sidecar keyed by (shard, line)."""
    out: dict[tuple[str, int], EntityAnnotation] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            raw = raw.strip()
            if not raw:
                continue
            obj = json.loads(raw)
            spans = tuple((int(a), int(b)) for a, b in obj["spans"])
            ann = EntityAnnotation(shard=obj["shard"], line=int(obj["line"]), spans=spans)
            out[(ann.shard, ann.line)] = ann
    return out


def _sentence_atoms(sentence: Sentence, ann: EntityAnnotation | None) -> list[str]:
    tokens = sentence.tokens
    if ann is None or not ann.spans:
        return list(tokens)
    prev_end = 0
    atoms: list[str] = []
    for start, end in sorted(ann.spans):
        if not (0 <= start < end <= len(tokens)):
            raise InvalidSpan(
                f"{sentence.shard}:{sentence.id}: span [{start},{end}) outside {len(tokens)} tokens"
            )
        if start < prev_end:
            raise InvalidSpan(f"{sentence.shard}:{sentence.id}: overlapping span [{start},{end})")
        atoms.extend(tokens[prev_end:start])
        atoms.append(" ".join(tokens[start:end]))
        prev_end = end
    atoms.extend(tokens[prev_end:])
    return atoms


def build_atom_table(
    corpus: str | Path,
    annotations: dict[tuple[str, int], EntityAnnotation] | None = None,
) -> tuple[AtomTable, CorpusShape]:
    """Count atoms over a corpus and record its per-sentence shape.

    Entity spans become single multi-word atoms (internal spaces preserved);
    everything else counts as word atoms. Raises EmptyCorpus when no sentence
    contributes an atom.
    """
    table = AtomTable()
    shape = CorpusShape()
    current_shard: str | None = None
    counts: list[int] = []
    for sentence in iter_corpus(corpus):
        if sentence.shard != current_shard:
            if current_shard is not None:
                shape.shards.append((current_shard, counts))
            current_shard = sentence.shard
            counts = []
        ann = annotations.get((sentence.shard, sentence.id)) if annotations else None
        atoms = _sentence_atoms(sentence, ann)
        counts.append(len(atoms))
        for atom in atoms:
            table.add(atom)
    if current_shard is not None:
        shape.shards.append((current_shard, counts))
    if table.total == 0:
        raise EmptyCorpus(f"no atoms found in {corpus}")
    return table, shape


def resample_lines(
    table: AtomTable,
    shape: CorpusShape,
    mode: ResampleMode,
    seed: int,
) -> Iterator[tuple[str, str]]:
    """Yield (shard, line text) pairs of i.i.d. atom draws matching the shape.

    ``frequency`` draws each atom with probability count/total; ``uniform``
    gives every distinct atom probability 1/|entries|. Each line is seeded
    independently (per-sentence policy over the global seed) so shards and
    lines can be generated in parallel without changing the output.
    """
    if not table.entries:
        raise EmptyCorpus("atom table is empty")
    if mode not in ("frequency", "uniform"):
        raise ValueError(f"unknown resample mode: {mode!r}")
    atoms = np.array(sorted(table.entries), dtype=object)
    if mode == "frequency":
        weights = np.array([table.entries[a] for a in atoms], dtype=np.float64)
        cdf = np.cumsum(weights / weights.sum())
    else:
        cdf = np.arange(1, len(atoms) + 1, dtype=np.float64) / len(atoms)
    cdf[-1] = 1.0
    policy = SeedPolicy(mode="per-sentence", global_seed=seed)
    for shard, counts in shape.shards:
        for line_no, k in enumerate(counts):
            rng = rng_from_seed(policy.seed_for(shard, line_no))
            draws = np.searchsorted(cdf, rng.random(k), side="right")
            yield shard, " ".join(atoms[i] for i in draws)


def resample_corpus(
    table: AtomTable,
    shape: CorpusShape,
    mode: ResampleMode,
    seed: int,
    out_dir: str | Path,
) -> None:
    """Write a resampled corpus to ``out_dir``, one file per source shard."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    lines = resample_lines(table, shape, mode, seed)
    for shard, counts in shape.shards:
        with open(out / shard, "w", encoding="utf-8") as fh:
            for _ in counts:
                _, line = next(lines)
                fh.write(line + "\n")
