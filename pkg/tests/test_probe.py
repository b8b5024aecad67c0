import json
import math
from collections import Counter

import numpy as np
import pytest

from scramblekit import (
    AllSkipped,
    DuplicateId,
    EmptyClass,
    InvalidMaskIndex,
    MissingNumberClass,
    Scorer,
    ScoreResponse,
    Stimulus,
    StimulusParseError,
    UniformScorer,
    balance_stimuli,
    convert_tsv,
    load_stimuli,
    run_probe,
)


def stim(i, good="barks", bad="bark", condition="1", number_class="S"):
    return Stimulus(
        id=f"s{i}",
        tokens=("The", "dog", "near", "the", "cats", "X"),
        mask_index=5,
        good=good,
        bad=bad,
        condition=condition,
        number_class=number_class,
    )


class TableScorer(Scorer):
    """Looks up P(candidate) from a fixed probability table."""

    def __init__(self, probs):
        self.probs = probs

    def score(self, request):
        logprobs = tuple(math.log(self.probs[c]) for c in request.candidates)
        return ScoreResponse(id=request.id, logprobs=logprobs)


class RescaledScorer(Scorer):
    """Order-preserving per-item transform of another scorer's logprobs."""

    def __init__(self, inner, scale=0.5, shift=-1.0):
        self.inner = inner
        self.scale = scale
        self.shift = shift

    def score(self, request):
        resp = self.inner.score(request)
        return ScoreResponse(
            id=resp.id,
            logprobs=tuple(lp * self.scale + self.shift for lp in resp.logprobs),
            skipped=resp.skipped,
        )


def write_jsonl(path, objs):
    path.write_text("\n".join(json.dumps(o) for o in objs) + "\n", encoding="utf-8")
    return path


def stim_obj(i, **overrides):
    obj = {
        "id": f"s{i}",
        "tokens": ["The", "dog", "X"],
        "mask_index": 2,
        "good": "barks",
        "bad": "bark",
        "condition": "1",
        "number_class": "S",
    }
    obj.update(overrides)
    return obj


def test_load_stimuli_happy_path(tmp_path):
    path = write_jsonl(tmp_path / "s.jsonl", [stim_obj(0), stim_obj(1), stim_obj(2)])
    stimuli = load_stimuli(path)
    assert len(stimuli) == 3
    assert stimuli[0].good == "barks"
    assert stimuli[0].number_class == "S"


def test_load_stimuli_mask_bounds(tmp_path):
    path = write_jsonl(tmp_path / "s.jsonl", [stim_obj(0, mask_index=3)])
    with pytest.raises(InvalidMaskIndex):
        load_stimuli(path)


def test_load_stimuli_equal_candidates(tmp_path):
    path = write_jsonl(tmp_path / "s.jsonl", [stim_obj(0, bad="barks")])
    with pytest.raises(StimulusParseError, match="s0"):
        load_stimuli(path)


def test_load_stimuli_duplicate_ids(tmp_path):
    path = write_jsonl(tmp_path / "s.jsonl", [stim_obj(0), stim_obj(0)])
    with pytest.raises(DuplicateId):
        load_stimuli(path)


def test_load_stimuli_bad_json(tmp_path):
    path = tmp_path / "s.jsonl"
    path.write_text('{"id": "s0", broken\n', encoding="utf-8")
    with pytest.raises(StimulusParseError):
        load_stimuli(path)


def test_convert_tsv(tmp_path):
    tsv = tmp_path / "in.tsv"
    tsv.write_text(
        "The dog X\t2\tbarks\tbark\t1\tS\n"
        "The dogs X\t2\tbark\tbarks\t1\tP\n",
        encoding="utf-8",
    )
    out = tmp_path / "out.jsonl"
    assert convert_tsv(tsv, out) == 2
    stimuli = load_stimuli(out)
    assert stimuli[0].tokens == ("The", "dog", "X")
    assert stimuli[1].number_class == "P"


def test_balance_appendix_worked_example():
    stimuli = [stim(i, number_class="S") for i in range(206)] + [
        stim(1000 + i, number_class="P") for i in range(51)
    ]
    out = balance_stimuli(stimuli, seed=0)
    counts = Counter(s.number_class for s in out)
    assert counts == {"S": 300, "P": 300}


def test_balance_keeps_every_original():
    stimuli = [stim(i, number_class="S") for i in range(206)] + [
        stim(1000 + i, number_class="P") for i in range(51)
    ]
    out = balance_stimuli(stimuli, seed=0)
    assert {s.id for s in out} == {s.id for s in stimuli}


def test_balance_already_at_multiple_unchanged_counts():
    stimuli = [stim(i, number_class="S") for i in range(100)] + [
        stim(1000 + i, number_class="P") for i in range(100)
    ]
    out = balance_stimuli(stimuli, seed=1)
    assert Counter(s.number_class for s in out) == {"S": 100, "P": 100}


def test_balance_strict_next_forces_higher_multiple():
    stimuli = [stim(i, number_class="S") for i in range(100)] + [
        stim(1000 + i, number_class="P") for i in range(40)
    ]
    out = balance_stimuli(stimuli, seed=1, strict_next=True)
    assert Counter(s.number_class for s in out) == {"S": 200, "P": 200}


def test_balance_small_plural_upsampled():
    stimuli = [stim(i, number_class="S") for i in range(100)] + [
        stim(1000 + i, number_class="P") for i in range(40)
    ]
    out = balance_stimuli(stimuli, seed=1)
    assert Counter(s.number_class for s in out) == {"S": 100, "P": 100}


def test_balance_random_pairs_always_equal_multiples():
    rng = np.random.Generator(np.random.PCG64(2))
    for _ in range(100):
        s_count = int(rng.integers(1, 400))
        p_count = int(rng.integers(1, 400))
        stimuli = [stim(i, number_class="S") for i in range(s_count)] + [
            stim(10_000 + i, number_class="P") for i in range(p_count)
        ]
        out = balance_stimuli(stimuli, seed=int(rng.integers(2**63)))
        counts = Counter(s.number_class for s in out)
        assert counts["S"] == counts["P"]
        assert counts["S"] % 100 == 0
        assert counts["S"] >= max(s_count, p_count)
        assert {s.id for s in out} == {s.id for s in stimuli}


def test_balance_requires_number_class():
    with pytest.raises(MissingNumberClass):
        balance_stimuli([stim(0, number_class=None)], seed=0)


def test_balance_empty_class():
    with pytest.raises(EmptyClass):
        balance_stimuli([stim(0, number_class="S")], seed=0)


def test_oracle_scorer_full_accuracy():
    scorer = TableScorer({"barks": 0.6, "bark": 0.4})
    report = run_probe([stim(i) for i in range(10)], scorer, seed=0)
    assert report.overall.accuracy == 100.0
    assert report.overall.skipped_count == 0


def test_uniform_scorer_all_ties_raises():
    with pytest.raises(AllSkipped):
        run_probe([stim(i) for i in range(4)], UniformScorer(50), seed=0)


def test_two_item_hand_case():
    class TwoItemScorer(Scorer):
        def score(self, request):
            if request.candidates[0] == "g1":
                return ScoreResponse(id=request.id, logprobs=(math.log(0.6), math.log(0.4)))
            return ScoreResponse(id=request.id, logprobs=(math.log(0.2), math.log(0.3)))

    items = [
        stim(0, good="g1", bad="b1"),
        stim(1, good="g2", bad="b2"),
    ]
    report = run_probe(items, TwoItemScorer(), seed=0)
    assert report.overall.accuracy == pytest.approx(50.0)
    assert report.overall.mean_prob_diff == pytest.approx(5.0, abs=1e-9)


def test_accuracy_invariant_under_monotone_rescaling():
    scorer = TableScorer({"barks": 0.6, "bark": 0.4, "runs": 0.1, "run": 0.3})
    items = [stim(0), stim(1, good="runs", bad="run", condition="2")]
    base = run_probe(items, scorer, seed=0)
    rescaled = run_probe(items, RescaledScorer(scorer), seed=0)
    assert base.overall.accuracy == rescaled.overall.accuracy
    assert base.per_condition.keys() == rescaled.per_condition.keys()
    assert base.overall.mean_prob_diff != rescaled.overall.mean_prob_diff


def test_report_invariant_to_item_order():
    scorer = TableScorer({"barks": 0.57, "bark": 0.43, "runs": 0.2, "run": 0.35})
    items = [stim(i, condition=str(i % 3)) for i in range(20)] + [
        stim(100 + i, good="runs", bad="run", condition=str(i % 3)) for i in range(20)
    ]
    forward = run_probe(items, scorer, seed=0)
    backward = run_probe(list(reversed(items)), scorer, seed=0)
    assert forward == backward


def test_per_condition_aggregation():
    scorer = TableScorer({"barks": 0.6, "bark": 0.4, "runs": 0.1, "run": 0.3})
    items = [stim(0, condition="easy"), stim(1, good="runs", bad="run", condition="hard")]
    report = run_probe(items, scorer, seed=0)
    assert report.per_condition["easy"].accuracy == 100.0
    assert report.per_condition["hard"].accuracy == 0.0
    assert report.overall.accuracy == 50.0
    assert report.condition_accuracy_mean == pytest.approx(50.0)
    assert report.condition_accuracy_std == pytest.approx(50.0)


def test_skipped_items_excluded_from_denominator():
    class SkipSomeScorer(Scorer):
        def score(self, request):
            if request.candidates[0] == "runs":
                return ScoreResponse(
                    id=request.id, logprobs=(0.0, 0.0), skipped=(0,)
                )
            return ScoreResponse(id=request.id, logprobs=(math.log(0.6), math.log(0.4)))

    items = [stim(0), stim(1, good="runs", bad="run")]
    report = run_probe(items, SkipSomeScorer(), seed=0)
    assert report.overall.item_count == 2
    assert report.overall.skipped_count == 1
    assert report.overall.accuracy == 100.0


def test_probe_empty_stimuli_rejected():
    with pytest.raises(ValueError):
        run_probe([], UniformScorer(5), seed=0)


def test_probe_with_balancing_runs():
    scorer = TableScorer({"barks": 0.6, "bark": 0.4})
    items = [stim(i, number_class="S") for i in range(7)] + [
        stim(100 + i, number_class="P") for i in range(3)
    ]
    report = run_probe(items, scorer, balance=True, seed=5)
    assert report.balanced is True
    assert report.overall.item_count == 200
    assert report.overall.accuracy == 100.0
