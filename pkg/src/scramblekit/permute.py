"""Sentence word-order randomization and the large-buffer window shuffle.

Two instruments live here. The per-sentence randomizer shuffles a sentence so
that no unit lands on a position that originally held an equal surface
string; with ``n > 1`` it first fuses randomly chosen contiguous n-gram spans
into single units so local n-gram structure survives the shuffle. The window
shuffle concatenates whole sentences into buffers of at most ``max_tokens``
words and shuffles each buffer as one unit.

Equality is surface-string equality, so duplicate words count as fixed points
wherever they land on a position that originally held an equal word. A
zero-fixed-point arrangement of a multiset exists iff no value occupies more
than half of the positions (Hall's condition collapses to the singleton
case); that check makes infeasibility detection exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from .corpus import Atom, AtomSequence, SeedPolicy, Sentence, rng_from_seed
from .errors import DerangementInfeasible


@dataclass(frozen=True)
class PermuteConfig:
    """Knobs for the sentence randomizer.

    ``n`` is the n-gram order (1 = plain word shuffle). ``max_retries`` caps
    the rejection-sampling loop. ``passthrough_short`` emits sentences with
    fewer than two atoms, and infeasible ones, unchanged instead of raising.
    """

    n: int = 1
    max_retries: int = 100
    passthrough_short: bool = True

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.max_retries < 1:
            raise ValueError(f"max_retries must be >= 1, got {self.max_retries}")


@dataclass(frozen=True)
class WindowConfig:
    max_tokens: int = 512

    def __post_init__(self) -> None:
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be >= 1, got {self.max_tokens}")


def derangement_feasible(texts: list[str]) -> bool:
    """True iff some permutation leaves no position holding an equal string.

    Feasible iff the most frequent surface string fills at most half the
    positions: each value v occurs m_v times and may only move onto the
    N - m_v positions holding other values, and for this bipartite structure
    Hall's condition binds only on singleton value groups.
    """
    n = len(texts)
    if n < 2:
        return False
    counts: dict[str, int] = {}
    for t in texts:
        counts[t] = counts.get(t, 0) + 1
    return 2 * max(counts.values()) <= n


def _rotation_derangement(atoms: tuple[Atom, ...], texts: list[str]) -> tuple[Atom, ...]:
    """Deterministic fallback: value-sort positions, rotate by max multiplicity.

    Valid whenever 2 * max multiplicity <= N: equal-text positions form one
    contiguous block of length <= m in the sorted order, and both the forward
    distance m and the wraparound distance N - m are >= any block length, so
    no position can receive its own value.
    """
    n = len(atoms)
    order = sorted(range(n), key=lambda i: texts[i])
    counts: dict[str, int] = {}
    for t in texts:
        counts[t] = counts.get(t, 0) + 1
    shift = max(counts.values())
    result: list[Atom | None] = [None] * n
    for i in range(n):
        result[order[i]] = atoms[order[(i + shift) % n]]
    return tuple(result)  # type: ignore[arg-type]


def _derange(atoms: tuple[Atom, ...], rng: np.random.Generator, max_retries: int) -> tuple[Atom, ...]:
    texts = [a.text for a in atoms]
    if not derangement_feasible(texts):
        raise DerangementInfeasible(
            f"no zero-fixed-point permutation exists for {len(atoms)} atoms"
        )
    n = len(atoms)
    for _ in range(max_retries):
        perm = rng.permutation(n)
        if all(texts[perm[i]] != texts[i] for i in range(n)):
            return tuple(atoms[j] for j in perm)
    # Feasible but the sampler was unlucky (heavy duplication makes valid
    # shuffles rare); fall back to the constructive arrangement.
    return _rotation_derangement(atoms, texts)


def derange(atoms: AtomSequence, seed: int, max_retries: int = 100) -> AtomSequence:
    """Permute atoms so no position keeps an equal surface string.

    Rejection-samples uniform permutations, so conditioned on success the
    result is uniform over valid arrangements. Raises DerangementInfeasible
    when no valid arrangement exists at all.
    """
    if not atoms.atoms:
        raise ValueError("cannot derange an empty atom sequence")
    return AtomSequence(_derange(atoms.atoms, rng_from_seed(seed), max_retries))


def _conjoin(tokens: list[str], n: int, rng: np.random.Generator) -> tuple[Atom, ...]:
    atoms: list[Atom] = [Atom((t,)) for t in tokens]
    while True:
        starts = [
            i
            for i in range(len(atoms) - n + 1)
            if not any(atoms[i + k].conjoined for k in range(n))
        ]
        if not starts:
            return tuple(atoms)
        p = starts[int(rng.integers(len(starts)))]
        span = tuple(w for a in atoms[p : p + n] for w in a.words)
        atoms[p : p + n] = [Atom(span)]


def conjoin_ngrams(tokens: list[str], n: int, seed: int) -> AtomSequence:
    """Fuse random contiguous n-gram spans until no all-singleton window is left.

    Each round samples uniformly among the remaining valid start positions
    (windows of n not-yet-conjoined tokens). Flattening the result reproduces
    the input token list in order; each fusion shrinks the atom count by n-1.
    """
    if n < 2:
        raise ValueError("conjoin_ngrams requires n >= 2; n=1 is the identity")
    if not tokens:
        raise ValueError("tokens must be non-empty")
    return AtomSequence(_conjoin(list(tokens), n, rng_from_seed(seed)))


def permute_sentence_spans(
    sentence: Sentence, cfg: PermuteConfig, seed: int
) -> tuple[str, list[tuple[int, int]]]:
    """Randomize one sentence; also report where conjoined spans landed.

    Conjoins n-grams first (for n > 1), then deranges, sharing one RNG stream
    seeded once. Returns the output text (atoms joined with single spaces;
    conjoined atoms keep their internal spaces, so the word multiset is
    always preserved) plus the half-open output-token intervals occupied by
    conjoined atoms - the same span schema the resampler's annotation
    sidecar uses.
    """
    tokens = list(sentence.tokens)
    rng = rng_from_seed(seed)
    if cfg.n > 1 and tokens:
        atoms = _conjoin(tokens, cfg.n, rng)
    else:
        atoms = tuple(Atom((t,)) for t in tokens)
    if len(atoms) < 2:
        if not cfg.passthrough_short:
            raise DerangementInfeasible(
                f"sentence {sentence.shard}:{sentence.id} has {len(atoms)} atom(s)"
            )
        out_atoms = atoms
    else:
        try:
            out_atoms = _derange(atoms, rng, cfg.max_retries)
        except DerangementInfeasible:
            if not cfg.passthrough_short:
                raise
            out_atoms = atoms
    spans: list[tuple[int, int]] = []
    pos = 0
    for atom in out_atoms:
        if atom.conjoined:
            spans.append((pos, pos + len(atom.words)))
        pos += len(atom.words)
    return " ".join(a.text for a in out_atoms), spans


def permute_sentence(sentence: Sentence, cfg: PermuteConfig, seed: int) -> str:
    """Randomize one sentence and return it as plain text."""
    return permute_sentence_spans(sentence, cfg, seed)[0]


def window_shuffle(
    sentences: Iterable[Sentence],
    wcfg: WindowConfig,
    seed_policy: SeedPolicy,
    max_retries: int = 100,
    on_infeasible: str = "passthrough",
) -> Iterator[str]:
    """Shuffle words inside buffers of whole sentences, one output line each.

    Sentences accumulate while the buffer stays within ``max_tokens``; a
    sentence that would overflow closes the buffer and starts the next one,
    and a single oversize sentence forms its own buffer. Buffers never span
    shards. Under per-sentence seeding the buffer's sequential index within
    its shard serves as the sentence id. An infeasible buffer (no valid
    derangement) is passed through unchanged, dropped, or raised, per
    ``on_infeasible``.
    """
    if on_infeasible not in ("passthrough", "drop", "error"):
        raise ValueError(f"unknown on_infeasible policy: {on_infeasible!r}")
    buffer: list[str] = []
    shard: str | None = None
    block_id = 0

    def flush() -> str | None:
        seed = seed_policy.seed_for(shard or "-", block_id)
        atoms = tuple(Atom((t,)) for t in buffer)
        if len(atoms) >= 2:
            try:
                shuffled = _derange(atoms, rng_from_seed(seed), max_retries)
                return " ".join(a.text for a in shuffled)
            except DerangementInfeasible:
                pass
        if on_infeasible == "passthrough":
            return " ".join(buffer)
        if on_infeasible == "drop":
            return None
        raise DerangementInfeasible(
            f"buffer {block_id} in shard {shard!r} has no valid derangement"
        )

    def emit() -> Iterator[str]:
        block = flush()
        if block is not None:
            yield block

    for sentence in sentences:
        if shard is not None and sentence.shard != shard:
            if buffer:
                yield from emit()
            buffer = []
            block_id = 0
        shard = sentence.shard
        if buffer and len(buffer) + len(sentence.tokens) > wcfg.max_tokens:
            yield from emit()
            block_id += 1
            buffer = []
        buffer.extend(sentence.tokens)
        if len(buffer) > wcfg.max_tokens:
            # oversize sentence on an empty buffer: emit it alone
            yield from emit()
            block_id += 1
            buffer = []
    if buffer:
        yield from emit()
