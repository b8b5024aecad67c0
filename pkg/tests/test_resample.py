import json

import pytest

from scramblekit import (
    AtomTable,
    CorpusShape,
    EmptyCorpus,
    InvalidSpan,
    build_atom_table,
    load_annotations,
    resample_corpus,
    resample_lines,
)
from tests.conftest import write_corpus


def test_build_table_direct_counts(tmp_corpus):
    table, shape = build_atom_table(tmp_corpus(["a a b"]))
    assert table.entries == {"a": 2, "b": 1}
    assert table.total == 3
    assert shape.shards == [("corpus.txt", [3])]


def test_entity_span_becomes_single_atom(tmp_path):
    corpus = write_corpus(tmp_path / "c.txt", ["I love New York"])
    ann_path = tmp_path / "ann.jsonl"
    ann_path.write_text(json.dumps({"shard": "c.txt", "line": 0, "spans": [[2, 4]]}) + "\n")
    table, shape = build_atom_table(corpus, load_annotations(ann_path))
    assert table.entries == {"I": 1, "love": 1, "New York": 1}
    assert shape.shards == [("c.txt", [3])]


def test_empty_corpus_rejected(tmp_corpus):
    with pytest.raises(EmptyCorpus):
        build_atom_table(tmp_corpus([]))


@pytest.mark.parametrize("spans", [[[3, 5]], [[-1, 2]], [[2, 2]], [[0, 2], [1, 3]]])
def test_invalid_spans_rejected(tmp_path, spans):
    corpus = write_corpus(tmp_path / "c.txt", ["a b c d"])
    ann_path = tmp_path / "ann.jsonl"
    ann_path.write_text(json.dumps({"shard": "c.txt", "line": 0, "spans": spans}) + "\n")
    with pytest.raises((InvalidSpan, ValueError)):
        build_atom_table(corpus, load_annotations(ann_path))


def test_shape_preserved_per_line_and_shard(tmp_path):
    write_corpus(tmp_path / "s1.txt", ["a b c", "d", "e f"])
    write_corpus(tmp_path / "s2.txt", ["g g g g"])
    table, shape = build_atom_table(tmp_path)
    for mode in ("frequency", "uniform"):
        out = list(resample_lines(table, shape, mode, seed=7))
        assert [(shard, len(text.split())) for shard, text in out] == [
            ("s1.txt", 3),
            ("s1.txt", 1),
            ("s1.txt", 2),
            ("s2.txt", 4),
        ]


def test_resample_draws_only_inventory_atoms(tmp_corpus):
    table, shape = build_atom_table(tmp_corpus(["a a b", "b c a"]))
    for _, text in resample_lines(table, shape, "frequency", seed=3):
        assert set(text.split()) <= {"a", "b", "c"}


def test_resample_deterministic(tmp_corpus):
    table, shape = build_atom_table(tmp_corpus(["a a b", "b c a"]))
    first = list(resample_lines(table, shape, "frequency", seed=9))
    second = list(resample_lines(table, shape, "frequency", seed=9))
    assert first == second
    assert first != list(resample_lines(table, shape, "frequency", seed=10))


def test_frequency_mode_tracks_counts():
    table = AtomTable({"a": 2, "b": 1})
    shape = CorpusShape(shards=[("s", [100_000])])
    (_, text), = resample_lines(table, shape, "frequency", seed=12)
    tokens = text.split()
    freq_a = tokens.count("a") / len(tokens)
    # 3 sigma around 2/3 at n=1e5
    sigma = (2 / 9 / 100_000) ** 0.5
    assert abs(freq_a - 2 / 3) < 3 * sigma


def test_uniform_mode_equalizes_distinct_atoms():
    table = AtomTable({"a": 2, "b": 1})
    shape = CorpusShape(shards=[("s", [100_000])])
    (_, text), = resample_lines(table, shape, "uniform", seed=12)
    tokens = text.split()
    freq_a = tokens.count("a") / len(tokens)
    sigma = (0.25 / 100_000) ** 0.5
    assert abs(freq_a - 0.5) < 3 * sigma


def test_multiword_atoms_emitted_with_spaces(tmp_path):
    corpus = write_corpus(tmp_path / "c.txt", ["New York New York"])
    ann = tmp_path / "a.jsonl"
    ann.write_text(
        json.dumps({"shard": "c.txt", "line": 0, "spans": [[0, 2], [2, 4]]}) + "\n"
    )
    table, shape = build_atom_table(corpus, load_annotations(ann))
    assert table.entries == {"New York": 2}
    (_, text), = resample_lines(table, shape, "frequency", seed=0)
    assert text == "New York New York"


def test_resample_corpus_writes_shard_files(tmp_path):
    src = tmp_path / "src"
    write_corpus(src / "s1.txt", ["a b", "c"])
    write_corpus(src / "s2.txt", ["d d d"])
    table, shape = build_atom_table(src)
    out = tmp_path / "out"
    resample_corpus(table, shape, "frequency", seed=5, out_dir=out)
    assert sorted(p.name for p in out.glob("*.txt")) == ["s1.txt", "s2.txt"]
    assert len((out / "s1.txt").read_text().splitlines()) == 2
    assert len((out / "s2.txt").read_text().splitlines()) == 1


def test_table_json_round_trip():
    table = AtomTable({"a": 2, "New York": 5})
    restored = AtomTable.from_json(table.to_json())
    assert restored.entries == table.entries
