"""Evaluation math: confusion matrices, metrics, subset tables, Pareto sets."""

from __future__ import annotations

import csv
import logging
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from typing import IO, NamedTuple

from .benchmarks import SUBSET_ORDER, flags_to_bits
from .errors import CurationError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PredictionRecord:
    """One model prediction; a bare score is thresholded at 0.5."""

    image_id: str
    predicted: int | None = None
    score: float | None = None

    def resolve(self) -> int:
        if self.predicted is not None:
            if self.predicted not in (0, 1):
                raise ValueError(f"{self.image_id}: predicted must be 0 or 1")
            return self.predicted
        if self.score is None:
            raise ValueError(f"{self.image_id}: prediction carries neither label nor score")
        return 1 if self.score >= 0.5 else 0


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(predictions: Iterable[PredictionRecord],
              labels: Mapping[str, int]) -> ConfusionMatrix:
    """Tally predictions against reference labels.

    Every prediction must reference a known image id, and ids may not repeat.
    Labels without a prediction are skipped with a warning; partial prediction
    files evaluate the covered subset.
    """
    seen: set[str] = set()
    tp = fp = tn = fn = 0
    for record in predictions:
        if record.image_id in seen:
            raise ValueError(f"duplicate prediction for {record.image_id}")
        seen.add(record.image_id)
        if record.image_id not in labels:
            raise ValueError(f"prediction for unknown image id {record.image_id}")
        predicted = record.resolve()
        actual = labels[record.image_id]
        if actual == 1:
            tp, fn = (tp + 1, fn) if predicted == 1 else (tp, fn + 1)
        else:
            tn, fp = (tn + 1, fp) if predicted == 0 else (tn, fp + 1)
    missing = len(labels) - len(seen)
    if missing:
        log.warning("%d labeled sample(s) have no prediction and were skipped", missing)
    return ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn)


class Metrics(NamedTuple):
    accuracy: float
    precision: float
    recall: float
    f1: float


def metrics(cm: ConfusionMatrix) -> Metrics:
    """Accuracy, precision, recall, F1 with explicit zero-denominator guards."""
    if cm.total == 0:
        raise ValueError("empty confusion matrix")
    accuracy = (cm.tp + cm.tn) / cm.total
    precision = cm.tp / (cm.tp + cm.fp) if (cm.tp + cm.fp) > 0 else 0.0
    recall = cm.tp / (cm.tp + cm.fn) if (cm.tp + cm.fn) > 0 else 0.0
    f1 = (2.0 * precision * recall / (precision + recall)
          if (precision + recall) > 0 else 0.0)
    return Metrics(accuracy=accuracy, precision=precision, recall=recall, f1=f1)


OVERALL_SUBSET = "overall"


@dataclass(frozen=True)
class SubsetMetrics:
    """Metrics for one benchmark subset.

    size counts subset members; evaluated counts the samples the metrics were
    computed over, which exceeds size when a single-class subset was pooled
    with the opposite class. Metric fields are None for empty subsets (and
    precision/recall/f1 are None in accuracy-only mode).
    """

    name: str
    size: int
    evaluated: int
    accuracy: float | None = None
    precision: float | None = None
    recall: float | None = None
    f1: float | None = None


def subset_metrics(predictions: Iterable[PredictionRecord],
                   flagged: Sequence[tuple], *,
                   single_class: str = "pool") -> list[SubsetMetrics]:
    """Per-subset metrics over a flagged split, overall row first.

    Most subsets are single-class by construction (distance and demographic
    subsets hold positives, depiction subsets hold negatives), where F1
    against the subset alone is undefined or trivial. With
    ``single_class="pool"`` such a subset is evaluated together with the full
    opposite-class population of the split, measuring how well the model
    separates that slice from the other class. ``single_class="accuracy"``
    reports accuracy over the subset alone instead.

    ``flagged`` pairs label rows (anything with image_id and label attributes)
    with their BenchmarkFlags.
    """
    if single_class not in ("pool", "accuracy"):
        raise ValueError(f"single_class must be 'pool' or 'accuracy', got {single_class!r}")
    resolved: dict[str, int] = {}
    for record in predictions:
        if record.image_id in resolved:
            raise ValueError(f"duplicate prediction for {record.image_id}")
        resolved[record.image_id] = record.resolve()

    rows = [(row, flags) for row, flags in flagged]
    known_ids = {row.image_id for row, _ in rows}
    unknown = set(resolved) - known_ids
    if unknown:
        raise ValueError(f"predictions reference unknown image ids: {sorted(unknown)[:5]}")
    uncovered = len(known_ids) - len(set(resolved) & known_ids)
    if uncovered:
        log.warning("%d labeled sample(s) have no prediction and were skipped", uncovered)

    members: dict[str, list] = {OVERALL_SUBSET: [row for row, _ in rows]}
    for name in SUBSET_ORDER:
        members[name] = []
    for row, flags in rows:
        bits = flags_to_bits(flags)
        for name in SUBSET_ORDER:
            if bits[name]:
                members[name].append(row)

    by_class = {0: [row for row, _ in rows if row.label == 0],
                1: [row for row, _ in rows if row.label == 1]}

    out: list[SubsetMetrics] = []
    for name in (OVERALL_SUBSET,) + SUBSET_ORDER:
        subset = members[name]
        if not subset:
            out.append(SubsetMetrics(name=name, size=0, evaluated=0))
            continue
        classes = {row.label for row in subset}
        pool = list(subset)
        accuracy_only = False
        if len(classes) == 1:
            if single_class == "pool":
                opposite = 1 - next(iter(classes))
                pool = subset + by_class[opposite]
            else:
                accuracy_only = True
        counted = [(row.image_id, row.label) for row in pool
                   if row.image_id in resolved]
        if not counted:
            out.append(SubsetMetrics(name=name, size=len(subset), evaluated=0))
            continue
        tp = fp = tn = fn = 0
        for image_id, actual in counted:
            predicted = resolved[image_id]
            if actual == 1:
                tp, fn = (tp + 1, fn) if predicted == 1 else (tp, fn + 1)
            else:
                tn, fp = (tn + 1, fp) if predicted == 0 else (tn, fp + 1)
        m = metrics(ConfusionMatrix(tp=tp, fp=fp, tn=tn, fn=fn))
        if accuracy_only:
            out.append(SubsetMetrics(name=name, size=len(subset), evaluated=len(counted),
                                     accuracy=m.accuracy))
        else:
            out.append(SubsetMetrics(name=name, size=len(subset), evaluated=len(counted),
                                     accuracy=m.accuracy, precision=m.precision,
                                     recall=m.recall, f1=m.f1))
    return out


def format_subset_table(rows: Sequence[SubsetMetrics]) -> str:
    """Aligned text table of subset metrics."""
    header = f"{'subset':<22} {'size':>6} {'eval':>6} {'acc':>8} {'prec':>8} {'rec':>8} {'f1':>8}"
    lines = [header, "-" * len(header)]

    def cell(value: float | None) -> str:
        return f"{value:.4f}" if value is not None else "-"

    for row in rows:
        lines.append(f"{row.name:<22} {row.size:>6} {row.evaluated:>6} "
                     f"{cell(row.accuracy):>8} {cell(row.precision):>8} "
                     f"{cell(row.recall):>8} {cell(row.f1):>8}")
    return "\n".join(lines)


@dataclass(frozen=True)
class ModelCard:
    """Cost/quality point for one deployable model."""

    name: str
    macs: int
    flash_bytes: int
    ram_bytes: int
    accuracy: float

    def __post_init__(self):
        if self.macs <= 0:
            raise ValueError(f"{self.name}: macs must be positive")
        if self.flash_bytes < 0 or self.ram_bytes < 0:
            raise ValueError(f"{self.name}: byte counts must be non-negative")
        if not 0.0 <= self.accuracy <= 100.0:
            raise ValueError(f"{self.name}: accuracy {self.accuracy} outside [0, 100]")


def pareto_frontier(cards: Sequence[ModelCard]) -> list[ModelCard]:
    """Cards not strictly dominated on (lower MACs, higher accuracy).

    A card is dominated when another card is at least as good on both axes
    and strictly better on one. Equal-MACs groups keep only their best
    accuracy (duplicates of that best all survive). Output is sorted by MACs
    ascending.
    """
    if not cards:
        return []
    by_macs: dict[int, list[ModelCard]] = {}
    for card in cards:
        by_macs.setdefault(card.macs, []).append(card)
    frontier: list[ModelCard] = []
    best_accuracy = float("-inf")
    for macs in sorted(by_macs):
        group = by_macs[macs]
        group_best = max(card.accuracy for card in group)
        if group_best > best_accuracy:
            frontier.extend(sorted((c for c in group if c.accuracy == group_best),
                                   key=lambda c: c.name))
            best_accuracy = group_best
    return frontier


def format_frontier(cards: Sequence[ModelCard], frontier: Sequence[ModelCard]) -> str:
    chosen = {id(card) for card in frontier}
    names = {card.name for card in frontier}
    header = f"{'model':<24} {'macs':>12} {'accuracy':>9}  frontier"
    lines = [header, "-" * len(header)]
    for card in sorted(cards, key=lambda c: (c.macs, -c.accuracy, c.name)):
        mark = "*" if (id(card) in chosen or card.name in names) else ""
        lines.append(f"{card.name:<24} {card.macs:>12} {card.accuracy:>9.2f}  {mark}")
    return "\n".join(lines)


# --- CSV interfaces ----------------------------------------------------------

def load_predictions(fp: IO[str]) -> list[PredictionRecord]:
    """Read a prediction CSV: image_id, then predicted and/or score columns."""
    reader = csv.DictReader(fp)
    if reader.fieldnames is None or "image_id" not in reader.fieldnames:
        raise CurationError("prediction CSV needs an image_id column")
    has_predicted = "predicted" in (reader.fieldnames or ())
    has_score = "score" in (reader.fieldnames or ())
    if not has_predicted and not has_score:
        raise CurationError("prediction CSV needs a predicted or score column")
    records: list[PredictionRecord] = []
    for row in reader:
        predicted: int | None = None
        score: float | None = None
        if has_predicted and (row["predicted"] or "").strip() != "":
            try:
                predicted = int(row["predicted"])
            except ValueError:
                raise CurationError(
                    f"line {reader.line_num}: bad predicted value {row['predicted']!r}"
                ) from None
        if has_score and (row["score"] or "").strip() != "":
            try:
                score = float(row["score"])
            except ValueError:
                raise CurationError(
                    f"line {reader.line_num}: bad score value {row['score']!r}") from None
        records.append(PredictionRecord(image_id=row["image_id"].strip(),
                                        predicted=predicted, score=score))
    return records


MODEL_CARD_COLUMNS = ("name", "macs", "flash_bytes", "ram_bytes", "accuracy")


def load_model_cards(fp: IO[str]) -> list[ModelCard]:
    """Read a model-card CSV with columns name,macs,flash_bytes,ram_bytes,accuracy."""
    reader = csv.DictReader(fp)
    missing = [c for c in MODEL_CARD_COLUMNS if c not in (reader.fieldnames or ())]
    if missing:
        raise CurationError(f"model card CSV missing columns: {', '.join(missing)}")
    cards: list[ModelCard] = []
    for row in reader:
        try:
            cards.append(ModelCard(
                name=row["name"].strip(),
                macs=int(row["macs"]),
                flash_bytes=int(row["flash_bytes"]),
                ram_bytes=int(row["ram_bytes"]),
                accuracy=float(row["accuracy"]),
            ))
        except ValueError as exc:
            raise CurationError(f"line {reader.line_num}: {exc}") from None
    return cards


def write_model_cards_csv(cards: Sequence[ModelCard], fp: IO[str]) -> int:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(MODEL_CARD_COLUMNS)
    for card in cards:
        writer.writerow((card.name, card.macs, card.flash_bytes,
                         card.ram_bytes, card.accuracy))
    return len(cards)


def write_subset_metrics_csv(rows: Sequence[SubsetMetrics], fp: IO[str]) -> int:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(("subset", "size", "evaluated", "accuracy", "precision", "recall", "f1"))
    for row in rows:
        writer.writerow((
            row.name, row.size, row.evaluated,
            "" if row.accuracy is None else repr(row.accuracy),
            "" if row.precision is None else repr(row.precision),
            "" if row.recall is None else repr(row.recall),
            "" if row.f1 is None else repr(row.f1),
        ))
    return len(rows)
