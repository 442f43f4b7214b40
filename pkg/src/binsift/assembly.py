"""Split assembly: label per image, balance, and serialize label CSVs.

Labeling is data-parallel per image (worker pool with an ordered merge);
balancing and serialization are a single-threaded reduce so output bytes are
a pure function of inputs and seed.
"""

from __future__ import annotations

import csv
import logging
import multiprocessing
from collections import Counter
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Callable

import numpy as np

from .boxfilter import BoxDecision, classify_by_boxes
from .errors import CurationError
from .fusion import (ClassSet, TaskSpec, TriLabel, TriValue,
                     has_verified_conflict, image_level_label)
from .ingest import BoxAnnotation, ImageLevelLabel

log = logging.getLogger(__name__)


class Split(Enum):
    TRAIN_LARGE = "train_large"
    TRAIN_QUALITY = "train_quality"
    VALIDATION = "validation"
    TEST = "test"


class Provenance(Enum):
    IMAGE_LEVEL = "image_level"
    BOUNDING_BOX = "bounding_box"
    MANUAL_OVERRIDE = "manual_override"


LABELER_IMAGE_LEVEL = "image_level"
LABELER_BOUNDING_BOX = "bounding_box"


@dataclass(frozen=True)
class ImageAnnotations:
    """All annotation rows for one image, grouped by source type."""

    image_id: str
    labels: tuple[ImageLevelLabel, ...] = ()
    boxes: tuple[BoxAnnotation, ...] = ()


@dataclass(frozen=True)
class DatasetRow:
    """One kept sample of a curated split."""

    image_id: str
    file_name: str
    label: int
    split: Split
    depiction_target: bool = False
    depiction_other: bool = False
    provenance: Provenance = Provenance.IMAGE_LEVEL

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")


@dataclass
class SplitReport:
    """Accounting for one assembled split.

    Invariant: input_images == positives + negatives + excluded + dropped,
    and positives == negatives (the balance contract).
    """

    split: Split
    input_images: int = 0
    positives: int = 0
    negatives: int = 0
    excluded: int = 0
    dropped: int = 0
    exclusion_reasons: Counter = field(default_factory=Counter)
    verified_conflicts: int = 0

    def validate(self) -> None:
        if self.positives != self.negatives:
            raise CurationError(
                f"{self.split.value}: balance violated "
                f"({self.positives} positives vs {self.negatives} negatives)")
        total = self.positives + self.negatives + self.excluded + self.dropped
        if total != self.input_images:
            raise CurationError(
                f"{self.split.value}: accounting violated "
                f"({total} accounted vs {self.input_images} inputs)")

    def to_text(self) -> str:
        lines = [
            f"split: {self.split.value}",
            f"  input images:  {self.input_images}",
            f"  positives:     {self.positives}",
            f"  negatives:     {self.negatives}",
            f"  excluded:      {self.excluded}",
            f"  balance drops: {self.dropped}",
        ]
        for reason, count in sorted(self.exclusion_reasons.items(),
                                    key=lambda item: item[0].value):
            lines.append(f"    excluded[{reason.value}]: {count}")
        if self.verified_conflicts:
            lines.append(f"  verified-absent conflicts on positives: {self.verified_conflicts}")
        return "\n".join(lines)


@dataclass(frozen=True)
class LabeledImage:
    image_id: str
    tri: TriLabel
    decision: BoxDecision | None = None
    verified_conflict: bool = False


@dataclass
class SplitResult:
    rows: list[DatasetRow]
    report: SplitReport
    decisions: dict[str, BoxDecision]


def group_annotations(labels: Iterable[ImageLevelLabel] = (),
                      boxes: Iterable[BoxAnnotation] = ()) -> list[ImageAnnotations]:
    """Group flat annotation streams per image, first-seen order."""
    order: list[str] = []
    label_acc: dict[str, list[ImageLevelLabel]] = {}
    box_acc: dict[str, list[BoxAnnotation]] = {}
    for record in labels:
        if record.image_id not in label_acc and record.image_id not in box_acc:
            order.append(record.image_id)
        label_acc.setdefault(record.image_id, []).append(record)
    for box in boxes:
        if box.image_id not in label_acc and box.image_id not in box_acc:
            order.append(box.image_id)
        box_acc.setdefault(box.image_id, []).append(box)
    return [ImageAnnotations(image_id,
                             tuple(label_acc.get(image_id, ())),
                             tuple(box_acc.get(image_id, ())))
            for image_id in order]


def _label_one(record: ImageAnnotations, labeler: str, class_set: ClassSet,
               spec: TaskSpec) -> LabeledImage:
    if labeler == LABELER_IMAGE_LEVEL:
        tri = image_level_label(record.labels, class_set, spec)
        conflict = (tri.value is TriValue.POSITIVE
                    and has_verified_conflict(record.labels, class_set, spec))
        return LabeledImage(record.image_id, tri, None, conflict)
    if labeler == LABELER_BOUNDING_BOX:
        decision = classify_by_boxes(record.boxes, class_set, spec)
        return LabeledImage(record.image_id, decision.label, decision, False)
    raise ValueError(f"unknown labeler {labeler!r}")


def _label_chunk(args: tuple) -> list[LabeledImage]:
    chunk, labeler, class_set, spec = args
    return [_label_one(record, labeler, class_set, spec) for record in chunk]


def label_images(records: Sequence[ImageAnnotations], labeler: str,
                 class_set: ClassSet, spec: TaskSpec, *, workers: int = 1,
                 chunk_size: int = 4096) -> list[LabeledImage]:
    """Label every image, preserving input order.

    With workers > 1 the images are labeled in fixed-size chunks by a process
    pool and merged back in order, so the result is identical to the serial
    path.
    """
    if labeler not in (LABELER_IMAGE_LEVEL, LABELER_BOUNDING_BOX):
        raise ValueError(f"unknown labeler {labeler!r}")
    if workers <= 1 or len(records) <= chunk_size:
        return [_label_one(record, labeler, class_set, spec) for record in records]
    chunks = [records[i:i + chunk_size] for i in range(0, len(records), chunk_size)]
    tasks = [(chunk, labeler, class_set, spec) for chunk in chunks]
    labeled: list[LabeledImage] = []
    with multiprocessing.Pool(processes=workers) as pool:
        for part in pool.imap(_label_chunk, tasks):
            labeled.extend(part)
    return labeled


def balance(positives: Sequence, negatives: Sequence, seed: int,
            *, key: Callable | None = None) -> tuple[list, list]:
    """Downsample the majority side to the minority count.

    The draw is uniform without replacement from a seeded generator; both
    outputs are then sorted into canonical order by ``key`` (identity by
    default), so equal seeds give byte-identical downstream artifacts.
    """
    sort_key = key if key is not None else lambda item: item
    target = min(len(positives), len(negatives))

    def sample(side: Sequence) -> list:
        if len(side) == target:
            return sorted(side, key=sort_key)
        rng = np.random.default_rng(seed)
        idx = rng.choice(len(side), size=target, replace=False)
        return sorted((side[i] for i in idx), key=sort_key)

    return sample(positives), sample(negatives)


def build_split(records: Sequence[ImageAnnotations], labeler: str,
                class_set: ClassSet, spec: TaskSpec, *, split: Split, seed: int,
                workers: int = 1, chunk_size: int = 4096) -> SplitResult:
    """Label, partition, balance, and canonically order one split."""
    labeled = label_images(records, labeler, class_set, spec,
                           workers=workers, chunk_size=chunk_size)
    positives = [li for li in labeled if li.tri.value is TriValue.POSITIVE]
    negatives = [li for li in labeled if li.tri.value is TriValue.NEGATIVE]
    excluded = [li for li in labeled if li.tri.value is TriValue.EXCLUDED]

    kept_pos, kept_neg = balance(positives, negatives, seed,
                                 key=lambda li: li.image_id)
    dropped = (len(positives) - len(kept_pos)) + (len(negatives) - len(kept_neg))

    provenance = (Provenance.IMAGE_LEVEL if labeler == LABELER_IMAGE_LEVEL
                  else Provenance.BOUNDING_BOX)
    rows: list[DatasetRow] = []
    for li in sorted(kept_pos + kept_neg, key=lambda li: li.image_id):
        decision = li.decision
        rows.append(DatasetRow(
            image_id=li.image_id,
            file_name=f"{li.image_id}.jpg",
            label=1 if li.tri.value is TriValue.POSITIVE else 0,
            split=split,
            depiction_target=decision.has_target_depiction if decision else False,
            depiction_other=decision.has_other_depiction if decision else False,
            provenance=provenance,
        ))

    report = SplitReport(
        split=split,
        input_images=len(labeled),
        positives=len(kept_pos),
        negatives=len(kept_neg),
        excluded=len(excluded),
        dropped=dropped,
        exclusion_reasons=Counter(li.tri.reason for li in excluded),
        verified_conflicts=sum(1 for li in labeled if li.verified_conflict),
    )
    report.validate()
    decisions = {li.image_id: li.decision for li in labeled if li.decision is not None}
    return SplitResult(rows=rows, report=report, decisions=decisions)


@dataclass(frozen=True)
class OverrideStats:
    applied: int
    flipped: int


def apply_overrides(rows: Sequence[DatasetRow],
                    overrides: Iterable[tuple[str, int]]) -> tuple[list[DatasetRow], OverrideStats]:
    """Replace labels from a manual relabeling pass.

    Every override target must exist in rows. An override that matches the
    existing label is a no-op for the label but still upgrades provenance to
    manual_override (the sample has been human-checked either way).
    """
    override_map: dict[str, int] = {}
    for image_id, corrected in overrides:
        if corrected not in (0, 1):
            raise ValueError(f"override label for {image_id} must be 0 or 1, got {corrected!r}")
        override_map[image_id] = corrected
    known = {row.image_id for row in rows}
    unknown = sorted(set(override_map) - known)
    if unknown:
        raise ValueError(f"overrides reference unknown image ids: {unknown}")
    out: list[DatasetRow] = []
    applied = flipped = 0
    for row in rows:
        if row.image_id in override_map:
            corrected = override_map[row.image_id]
            if corrected != row.label:
                flipped += 1
            applied += 1
            out.append(DatasetRow(
                image_id=row.image_id,
                file_name=row.file_name,
                label=corrected,
                split=row.split,
                depiction_target=row.depiction_target,
                depiction_other=row.depiction_other,
                provenance=Provenance.MANUAL_OVERRIDE,
            ))
        else:
            out.append(row)
    return out, OverrideStats(applied=applied, flipped=flipped)


def check_split_hygiene(splits: Mapping[Split, Sequence[DatasetRow]]) -> None:
    """Error when evaluation image ids leak into a training split (or each other)."""
    ids = {split: {row.image_id for row in rows} for split, rows in splits.items()}
    eval_splits = [s for s in (Split.VALIDATION, Split.TEST) if s in ids]
    train_splits = [s for s in (Split.TRAIN_LARGE, Split.TRAIN_QUALITY) if s in ids]
    for eval_split in eval_splits:
        for train_split in train_splits:
            overlap = ids[eval_split] & ids[train_split]
            if overlap:
                raise CurationError(
                    f"{eval_split.value} shares {len(overlap)} image(s) with "
                    f"{train_split.value}, e.g. {sorted(overlap)[:5]}")
    if Split.VALIDATION in ids and Split.TEST in ids:
        overlap = ids[Split.VALIDATION] & ids[Split.TEST]
        if overlap:
            raise CurationError(
                f"validation shares {len(overlap)} image(s) with test, "
                f"e.g. {sorted(overlap)[:5]}")


# Wire format: fixed, historical column names. The binary label column is
# called "person" whatever the target class actually is.
LABEL_COLUMNS = ("file_name", "person", "depiction_person", "depiction_nonperson")


def write_labels_csv(rows: Sequence[DatasetRow], fp: IO[str],
                     flags: Mapping[str, "BenchmarkFlags"] | None = None) -> int:
    """Write one split's label CSV; benchmark flag columns when given.

    Rows are written in canonical (image_id) order regardless of input order.
    Returns the number of data rows written.
    """
    from .benchmarks import FLAG_COLUMNS, flags_to_bits  # local import, avoids a cycle

    writer = csv.writer(fp, lineterminator="\n")
    header = LABEL_COLUMNS + (FLAG_COLUMNS if flags is not None else ())
    writer.writerow(header)
    count = 0
    for row in sorted(rows, key=lambda r: r.image_id):
        record = [row.file_name, row.label,
                  int(row.depiction_target), int(row.depiction_other)]
        if flags is not None:
            try:
                row_flags = flags[row.image_id]
            except KeyError:
                raise CurationError(f"missing benchmark flags for {row.image_id}") from None
            bits = flags_to_bits(row_flags)
            record.extend(bits[column] for column in FLAG_COLUMNS)
        writer.writerow(record)
        count += 1
    return count
