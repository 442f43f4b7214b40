from __future__ import annotations

import io

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from binsift.assembly import DatasetRow, Provenance, Split
from binsift.benchmarks import BenchmarkFlags, DistanceBand, Lighting
from binsift.evaluation import (MODEL_CARD_COLUMNS, OVERALL_SUBSET,
                                ConfusionMatrix, Metrics, ModelCard,
                                PredictionRecord, confusion, load_model_cards,
                                load_predictions, metrics, pareto_frontier,
                                subset_metrics, write_model_cards_csv,
                                write_subset_metrics_csv)


class TestPredictionRecord:
    def test_explicit_label_wins(self):
        assert PredictionRecord("a", predicted=1).resolve() == 1

    def test_score_thresholded_at_half(self):
        assert PredictionRecord("a", score=0.5).resolve() == 1
        assert PredictionRecord("a", score=0.4999).resolve() == 0

    def test_needs_something(self):
        with pytest.raises(ValueError):
            PredictionRecord("a").resolve()


class TestConfusion:
    LABELS = {"a": 1, "b": 1, "c": 0, "d": 0}

    def test_tally(self):
        preds = [PredictionRecord("a", predicted=1),
                 PredictionRecord("b", predicted=0),
                 PredictionRecord("c", predicted=0),
                 PredictionRecord("d", predicted=1)]
        cm = confusion(preds, self.LABELS)
        assert (cm.tp, cm.fn, cm.tn, cm.fp) == (1, 1, 1, 1)
        assert cm.total == 4

    def test_duplicate_rejected(self):
        preds = [PredictionRecord("a", predicted=1)] * 2
        with pytest.raises(ValueError, match="duplicate"):
            confusion(preds, self.LABELS)

    def test_unknown_id_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            confusion([PredictionRecord("zz", predicted=1)], self.LABELS)

    def test_partial_coverage_evaluates_covered_subset(self):
        cm = confusion([PredictionRecord("a", predicted=1)], self.LABELS)
        assert cm.total == 1


class TestMetrics:
    def test_frozen_case(self):
        # tp=2 fp=1 tn=1 fn=0: precision 2/3, recall 1, f1 = 0.8
        m = metrics(ConfusionMatrix(tp=2, fp=1, tn=1, fn=0))
        assert abs(m.precision - 2 / 3) < 1e-12
        assert m.recall == 1.0
        assert abs(m.f1 - 0.8) < 1e-12
        assert m.accuracy == 0.75

    def test_zero_guards(self):
        m = metrics(ConfusionMatrix(tn=5))
        assert m == Metrics(accuracy=1.0, precision=0.0, recall=0.0, f1=0.0)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            metrics(ConfusionMatrix())

    @given(st.integers(0, 50), st.integers(0, 50),
           st.integers(0, 50), st.integers(0, 50))
    def test_all_metrics_in_unit_interval(self, tp, fp, tn, fn):
        if tp + fp + tn + fn == 0:
            return
        m = metrics(ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn))
        assert all(0.0 <= v <= 1.0 for v in m)


def _row(image_id, label):
    return DatasetRow(image_id=image_id, file_name=f"{image_id}.jpg",
                      label=label, split=Split.TEST,
                      provenance=Provenance.BOUNDING_BOX)


def _flags(**kw):
    return BenchmarkFlags(lighting=kw.pop("lighting", Lighting.NORMAL), **kw)


class TestSubsetMetrics:
    def _flagged(self):
        return [
            (_row("p1", 1), _flags(distance=DistanceBand.NEAR)),
            (_row("p2", 1), _flags(distance=DistanceBand.FAR)),
            (_row("n1", 0), _flags()),
            (_row("n2", 0), _flags(lighting=Lighting.DARK)),
        ]

    def _preds(self):
        return [PredictionRecord("p1", predicted=1),
                PredictionRecord("p2", predicted=0),
                PredictionRecord("n1", predicted=0),
                PredictionRecord("n2", predicted=0)]

    def test_overall_row_matches_whole_split_metrics(self):
        table = subset_metrics(self._preds(), self._flagged())
        overall = table[0]
        assert overall.name == OVERALL_SUBSET
        cm = confusion(self._preds(), {"p1": 1, "p2": 1, "n1": 0, "n2": 0})
        m = metrics(cm)
        assert (overall.accuracy, overall.precision, overall.recall, overall.f1) \
            == (m.accuracy, m.precision, m.recall, m.f1)

    def test_single_class_subset_pools_opposite_class(self):
        table = {row.name: row for row in subset_metrics(self._preds(), self._flagged())}
        near = table["distance_near"]
        # subset {p1} pooled with both negatives: tp=1 tn=2 -> perfect
        assert near.size == 1 and near.evaluated == 3
        assert near.accuracy == 1.0 and near.f1 == 1.0
        far = table["distance_far"]
        assert far.size == 1 and far.evaluated == 3
        assert far.recall == 0.0

    def test_single_class_accuracy_mode(self):
        table = {row.name: row
                 for row in subset_metrics(self._preds(), self._flagged(),
                                           single_class="accuracy")}
        near = table["distance_near"]
        assert near.evaluated == 1
        assert near.accuracy == 1.0 and near.precision is None

    def test_empty_subset_has_none_metrics(self):
        table = {row.name: row for row in subset_metrics(self._preds(), self._flagged())}
        assert table["gender_female"].size == 0
        assert table["gender_female"].accuracy is None

    def test_unknown_prediction_id_rejected(self):
        preds = self._preds() + [PredictionRecord("zz", predicted=1)]
        with pytest.raises(ValueError, match="unknown image ids"):
            subset_metrics(preds, self._flagged())

    def test_mixed_subset_not_pooled(self):
        flagged = [
            (_row("p1", 1), _flags(lighting=Lighting.DARK)),
            (_row("n1", 0), _flags(lighting=Lighting.DARK)),
            (_row("n2", 0), _flags()),
        ]
        preds = [PredictionRecord("p1", predicted=1),
                 PredictionRecord("n1", predicted=0),
                 PredictionRecord("n2", predicted=1)]
        table = {row.name: row for row in subset_metrics(preds, flagged)}
        dark = table["lighting_dark"]
        assert dark.size == 2 and dark.evaluated == 2
        assert dark.accuracy == 1.0


def pareto_oracle(cards):
    """Quadratic reference: keep cards no other card strictly dominates."""
    kept = []
    for c in cards:
        dominated = any(
            (o.macs <= c.macs and o.accuracy >= c.accuracy)
            and (o.macs < c.macs or o.accuracy > c.accuracy)
            for o in cards)
        if not dominated:
            kept.append(c)
    return sorted(kept, key=lambda c: (c.macs, c.name))


def _card(name, macs, acc):
    return ModelCard(name=name, macs=macs, flash_bytes=1000,
                     ram_bytes=1000, accuracy=acc)


class TestParetoFrontier:
    def test_simple_chain(self):
        cards = [_card("a", 100, 60.0), _card("b", 200, 70.0),
                 _card("c", 150, 50.0)]
        assert [c.name for c in pareto_frontier(cards)] == ["a", "b"]

    def test_equal_macs_keeps_best_and_its_duplicates(self):
        cards = [_card("a", 100, 60.0), _card("b", 100, 70.0),
                 _card("b2", 100, 70.0)]
        assert [c.name for c in pareto_frontier(cards)] == ["b", "b2"]

    def test_equal_accuracy_cheaper_card_wins(self):
        cards = [_card("cheap", 100, 70.0), _card("dear", 200, 70.0)]
        assert [c.name for c in pareto_frontier(cards)] == ["cheap"]

    def test_empty(self):
        assert pareto_frontier([]) == []

    @given(st.lists(st.tuples(st.integers(1, 10_000),
                              st.floats(min_value=0.0, max_value=100.0,
                                        allow_nan=False)),
                    max_size=60))
    @settings(max_examples=100)
    def test_matches_quadratic_oracle(self, pairs):
        cards = [_card(f"m{i}", macs, acc) for i, (macs, acc) in enumerate(pairs)]
        got = pareto_frontier(cards)
        want = pareto_oracle(cards)
        assert sorted(c.name for c in got) == sorted(c.name for c in want)

    @given(st.lists(st.tuples(st.integers(1, 10_000),
                              st.floats(min_value=0.0, max_value=100.0,
                                        allow_nan=False)),
                    min_size=1, max_size=60))
    @settings(max_examples=50)
    def test_frontier_is_strictly_improving(self, pairs):
        cards = [_card(f"m{i}", macs, acc) for i, (macs, acc) in enumerate(pairs)]
        frontier = pareto_frontier(cards)
        for prev, cur in zip(frontier, frontier[1:]):
            assert cur.macs >= prev.macs
            if cur.macs > prev.macs:
                assert cur.accuracy > prev.accuracy


class TestLoaders:
    def test_load_predictions_with_label_column(self):
        fp = io.StringIO("image_id,predicted\na,1\nb,0\n")
        preds = load_predictions(fp)
        assert [(p.image_id, p.resolve()) for p in preds] == [("a", 1), ("b", 0)]

    def test_load_predictions_with_score_column(self):
        fp = io.StringIO("image_id,score\na,0.9\nb,0.2\n")
        preds = load_predictions(fp)
        assert [p.resolve() for p in preds] == [1, 0]

    def test_model_cards_roundtrip(self):
        cards = [ModelCard("m", 1000, 2048, 4096, 81.25)]
        buf = io.StringIO()
        write_model_cards_csv(cards, buf)
        header = buf.getvalue().splitlines()[0]
        assert header == ",".join(MODEL_CARD_COLUMNS)
        assert load_model_cards(io.StringIO(buf.getvalue())) == cards

    def test_model_card_validation(self):
        with pytest.raises(ValueError):
            ModelCard("m", 0, 1, 1, 50.0)
        with pytest.raises(ValueError):
            ModelCard("m", 10, 1, 1, 101.0)

    def test_fixture_model_cards(self, fixture_dir):
        with open(fixture_dir / "model_cards.csv", encoding="utf-8") as fp:
            cards = load_model_cards(fp)
        assert len(cards) == 10
        frontier = pareto_frontier(cards)
        dropped = {c.name for c in cards} - {c.name for c in frontier}
        # exactly the three mid-range cards are dominated
        assert dropped == {"MicroNets_vww2_50_50", "MicroNets_vww3_128_128",
                           "MicroNets_vww4_128_128"}

    def test_write_subset_metrics_csv(self):
        preds = [PredictionRecord("p1", predicted=1),
                 PredictionRecord("n1", predicted=0)]
        flagged = [(_row("p1", 1), _flags()), (_row("n1", 0), _flags())]
        table = subset_metrics(preds, flagged)
        buf = io.StringIO()
        count = write_subset_metrics_csv(table, buf)
        lines = buf.getvalue().splitlines()
        assert count == len(table)
        assert lines[0].startswith("subset,size,evaluated,accuracy")
        assert lines[1].startswith("overall,2,2,1.0")
