"""Streaming readers and writers for Open-Images-style annotation metadata.

All readers are single-pass generators over a text (or UTF-8 byte) stream and
share one error policy: pass ``errors=[]`` to collect bad rows as
:class:`~binsift.errors.RowError` entries and keep going, or leave it ``None``
to fail fast on the first bad row. Every input row ends up either yielded or
recorded as a reject, so ``rows_in == records_out + len(errors)``.
"""

from __future__ import annotations

import csv
import io
import logging
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import Enum
from typing import IO

from .errors import HierarchyError, RowError, SchemaError

log = logging.getLogger(__name__)

# Canonical confidence scale. Human verification is binary on this scale;
# machine-generated labels may sit anywhere in between.
CONFIDENCE_MAX = 10.0


class Source(Enum):
    """Origin of an image-level label."""

    HUMAN_VERIFIED = "human_verified"
    MACHINE_GENERATED = "machine_generated"


class Relation(Enum):
    """Edge kind in the label hierarchy."""

    SUBCATEGORY = "subcategory"
    PART = "part"


class GenderPresentation(Enum):
    FEMININE = "feminine"
    MASCULINE = "masculine"
    UNKNOWN = "unknown"


class AgePresentation(Enum):
    YOUNG = "young"
    MIDDLE = "middle"
    OLDER = "older"
    UNKNOWN = "unknown"


_SOURCE_TOKENS = {
    "verification": Source.HUMAN_VERIFIED,
    "crowdsource-default": Source.HUMAN_VERIFIED,
    "human_verified": Source.HUMAN_VERIFIED,
    "machine": Source.MACHINE_GENERATED,
    "machine_generated": Source.MACHINE_GENERATED,
}

_GENDER_TOKENS = {
    "predominantly feminine": GenderPresentation.FEMININE,
    "feminine": GenderPresentation.FEMININE,
    "predominantly masculine": GenderPresentation.MASCULINE,
    "masculine": GenderPresentation.MASCULINE,
    "unknown": GenderPresentation.UNKNOWN,
}

_AGE_TOKENS = {
    "young": AgePresentation.YOUNG,
    "middle": AgePresentation.MIDDLE,
    "older": AgePresentation.OLDER,
    "unknown": AgePresentation.UNKNOWN,
}


@dataclass(frozen=True)
class ImageLevelLabel:
    """One image-level annotation row, confidence on the canonical 0-10 scale."""

    image_id: str
    label_id: str
    source: Source
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= CONFIDENCE_MAX:
            raise ValueError(f"confidence {self.confidence!r} outside [0, {CONFIDENCE_MAX}]")


@dataclass(frozen=True)
class BoxAnnotation:
    """One bounding box with coordinates normalized to [0, 1]."""

    image_id: str
    label_id: str
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    is_group_of: bool = False
    is_depiction: bool = False
    is_inside: bool = False

    def __post_init__(self):
        if not (0.0 <= self.x_min <= self.x_max <= 1.0):
            raise ValueError(f"bad x span [{self.x_min}, {self.x_max}]")
        if not (0.0 <= self.y_min <= self.y_max <= 1.0):
            raise ValueError(f"bad y span [{self.y_min}, {self.y_max}]")


@dataclass(frozen=True)
class MiapAnnotation:
    """One demographic annotation box (perceived presentation, not identity)."""

    image_id: str
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    gender: GenderPresentation
    age: AgePresentation

    def __post_init__(self):
        if not (0.0 <= self.x_min <= self.x_max <= 1.0):
            raise ValueError(f"bad x span [{self.x_min}, {self.x_max}]")
        if not (0.0 <= self.y_min <= self.y_max <= 1.0):
            raise ValueError(f"bad y span [{self.y_min}, {self.y_max}]")


class LabelHierarchy:
    """Directed label relations (subcategory and part), acyclic per relation.

    The registry is the set of label ids mentioned by any edge. An empty
    hierarchy has an empty registry and is treated as "open": class-set
    resolution accepts any id as a leaf.
    """

    def __init__(self, edges: Iterable[tuple[str, str, Relation]]):
        self._edges = frozenset(edges)
        self._children: dict[Relation, dict[str, frozenset[str]]] = {}
        for relation in Relation:
            acc: dict[str, set[str]] = {}
            for parent, child, rel in self._edges:
                if rel is relation:
                    acc.setdefault(parent, set()).add(child)
            self._children[relation] = {p: frozenset(c) for p, c in acc.items()}
            cycle = _find_cycle(self._children[relation])
            if cycle:
                path = " -> ".join(cycle)
                raise HierarchyError(f"{relation.value} relation contains a cycle: {path}")
        ids: set[str] = set()
        for parent, child, _ in self._edges:
            ids.add(parent)
            ids.add(child)
        self._registry = frozenset(ids)

    @property
    def edges(self) -> frozenset[tuple[str, str, Relation]]:
        return self._edges

    @property
    def registry(self) -> frozenset[str]:
        return self._registry

    @property
    def is_empty(self) -> bool:
        return not self._edges

    def subcategories(self, label_id: str) -> frozenset[str]:
        """Direct subcategories of a label."""
        return self._children[Relation.SUBCATEGORY].get(label_id, frozenset())

    def parts(self, label_id: str) -> frozenset[str]:
        """Direct parts of a label."""
        return self._children[Relation.PART].get(label_id, frozenset())

    def subcategory_closure(self, label_ids: str | Iterable[str]) -> frozenset[str]:
        """The given ids plus everything reachable through subcategory edges."""
        if isinstance(label_ids, str):
            label_ids = (label_ids,)
        seen: set[str] = set()
        stack = list(label_ids)
        while stack:
            current = stack.pop()
            if current in seen:
                continue
            seen.add(current)
            stack.extend(self.subcategories(current))
        return frozenset(seen)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LabelHierarchy):
            return NotImplemented
        return self._edges == other._edges

    def __hash__(self) -> int:
        return hash(self._edges)

    def __repr__(self) -> str:
        return f"LabelHierarchy({len(self._edges)} edges, {len(self._registry)} labels)"


def _find_cycle(children: dict[str, frozenset[str]]) -> list[str] | None:
    # Iterative DFS with an explicit path so the error can name the cycle.
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {node: WHITE for node in children}
    for node in {c for kids in children.values() for c in kids}:
        color.setdefault(node, WHITE)
    for start in sorted(color):
        if color[start] != WHITE:
            continue
        stack: list[tuple[str, Iterator[str]]] = [(start, iter(sorted(children.get(start, ()))))]
        color[start] = GRAY
        path = [start]
        while stack:
            node, kids = stack[-1]
            advanced = False
            for child in kids:
                if color[child] == GRAY:
                    return path[path.index(child):] + [child]
                if color[child] == WHITE:
                    color[child] = GRAY
                    path.append(child)
                    stack.append((child, iter(sorted(children.get(child, ())))))
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                path.pop()
                stack.pop()
    return None


def _text_stream(stream: IO) -> IO[str]:
    if isinstance(stream, io.TextIOBase):
        return stream
    mode = getattr(stream, "mode", "")
    if "b" in mode or isinstance(stream, (io.RawIOBase, io.BufferedIOBase)):
        return io.TextIOWrapper(stream, encoding="utf-8", newline="")
    return stream


def _reject(errors: list[RowError] | None, line_no: int, message: str) -> None:
    err = RowError(line_no, message)
    if errors is None:
        raise err
    errors.append(err)


def _dict_reader(stream: IO, required: tuple[str, ...]) -> csv.DictReader:
    reader = csv.DictReader(_text_stream(stream))
    fields = reader.fieldnames
    if fields is None:
        raise SchemaError("empty input: no header row")
    missing = [c for c in required if c not in fields]
    if missing:
        raise SchemaError(f"missing required columns: {', '.join(missing)}")
    return reader


def _parse_flag(token: str) -> bool:
    if token == "1":
        return True
    if token == "0":
        return False
    raise ValueError(f"flag must be 0 or 1, got {token!r}")


def parse_image_labels(
    stream: IO,
    *,
    scale: str = "auto",
    errors: list[RowError] | None = None,
) -> Iterator[ImageLevelLabel]:
    """Read image-level labels from a CSV stream.

    Required columns: ImageID, Source, LabelName, Confidence. Extra columns
    are ignored. Confidences are normalized to the canonical 0-10 scale:

    - ``scale="0-10"``: values taken as-is.
    - ``scale="0-1"``: values multiplied by 10.
    - ``scale="auto"`` (default): rows are buffered until a value > 1 proves
      the file is on the 0-10 scale; if the whole file is <= 1 it is treated
      as 0-1 and scaled up. Only the explicit scales preserve the strict
      one-record memory bound.

    Rows violating the format (bad source token, confidence out of range,
    human-verified confidence not 0 or 10) are rejected through ``errors``.

    The header is validated before any row is consumed; row processing is
    lazy.
    """
    if scale not in ("auto", "0-10", "0-1"):
        raise ValueError(f"unknown scale {scale!r}")
    reader = _dict_reader(stream, ("ImageID", "Source", "LabelName", "Confidence"))
    return _iter_image_labels(reader, scale, errors)


def _iter_image_labels(
    reader: csv.DictReader,
    scale: str,
    errors: list[RowError] | None,
) -> Iterator[ImageLevelLabel]:
    def finalize(line_no: int, image_id: str, label_id: str, source: Source,
                 raw: float, multiplier: float) -> ImageLevelLabel | None:
        confidence = raw * multiplier
        if not 0.0 <= confidence <= CONFIDENCE_MAX:
            _reject(errors, line_no, f"confidence {raw} outside the 0-{CONFIDENCE_MAX:g} scale")
            return None
        if source is Source.HUMAN_VERIFIED and confidence not in (0.0, CONFIDENCE_MAX):
            _reject(errors, line_no,
                    f"human-verified confidence must be 0 or {CONFIDENCE_MAX:g}, got {confidence:g}")
            return None
        return ImageLevelLabel(image_id, label_id, source, confidence)

    pending: list[tuple[int, str, str, Source, float]] = []
    multiplier = {"0-10": 1.0, "0-1": 10.0}.get(scale)
    for row in reader:
        line_no = reader.line_num
        image_id = (row["ImageID"] or "").strip()
        label_id = (row["LabelName"] or "").strip()
        source_token = (row["Source"] or "").strip().lower()
        if not image_id or not label_id:
            _reject(errors, line_no, "empty ImageID or LabelName")
            continue
        source = _SOURCE_TOKENS.get(source_token)
        if source is None:
            _reject(errors, line_no, f"unknown source token {row['Source']!r}")
            continue
        try:
            raw = float(row["Confidence"])
        except (TypeError, ValueError):
            _reject(errors, line_no, f"non-numeric confidence {row['Confidence']!r}")
            continue
        if raw < 0:
            _reject(errors, line_no, f"negative confidence {raw}")
            continue

        if multiplier is None:
            if raw > 1.0:
                # Scale proven to be 0-10; flush the buffer in input order.
                multiplier = 1.0
                for args in pending:
                    record = finalize(*args, multiplier)
                    if record is not None:
                        yield record
                pending.clear()
            else:
                pending.append((line_no, image_id, label_id, source, raw))
                continue
        record = finalize(line_no, image_id, label_id, source, raw, multiplier)
        if record is not None:
            yield record
    if pending:
        # Every confidence was <= 1: treat the file as 0-1 scaled.
        for args in pending:
            record = finalize(*args, 10.0)
            if record is not None:
                yield record


def parse_boxes(stream: IO, *, errors: list[RowError] | None = None) -> Iterator[BoxAnnotation]:
    """Read bounding boxes from a CSV stream.

    Required columns: ImageID, LabelName, XMin, XMax, YMin, YMax, IsGroupOf,
    IsDepiction, IsInside. Extra columns are ignored. Coordinates must sit in
    [0, 1] with min <= max; flags must be 0 or 1. Header validation is eager,
    rows are streamed.
    """
    reader = _dict_reader(stream, ("ImageID", "LabelName", "XMin", "XMax",
                                   "YMin", "YMax", "IsGroupOf", "IsDepiction", "IsInside"))
    return _iter_boxes(reader, errors)


def _iter_boxes(reader: csv.DictReader,
                errors: list[RowError] | None) -> Iterator[BoxAnnotation]:
    for row in reader:
        line_no = reader.line_num
        image_id = (row["ImageID"] or "").strip()
        label_id = (row["LabelName"] or "").strip()
        if not image_id or not label_id:
            _reject(errors, line_no, "empty ImageID or LabelName")
            continue
        try:
            x_min, x_max = float(row["XMin"]), float(row["XMax"])
            y_min, y_max = float(row["YMin"]), float(row["YMax"])
        except (TypeError, ValueError):
            _reject(errors, line_no, "non-numeric box coordinate")
            continue
        try:
            is_group = _parse_flag((row["IsGroupOf"] or "").strip())
            is_depiction = _parse_flag((row["IsDepiction"] or "").strip())
            is_inside = _parse_flag((row["IsInside"] or "").strip())
        except ValueError as exc:
            _reject(errors, line_no, str(exc))
            continue
        try:
            box = BoxAnnotation(image_id, label_id, x_min, x_max, y_min, y_max,
                                is_group_of=is_group, is_depiction=is_depiction,
                                is_inside=is_inside)
        except ValueError as exc:
            _reject(errors, line_no, str(exc))
            continue
        yield box


def parse_miap(stream: IO, *, errors: list[RowError] | None = None) -> Iterator[MiapAnnotation]:
    """Read demographic annotation boxes from a CSV stream.

    Required columns: ImageID, XMin, XMax, YMin, YMax, GenderPresentation,
    AgePresentation. Unrecognized presentation tokens degrade to unknown with
    a warning rather than rejecting the row.
    """
    reader = _dict_reader(stream, ("ImageID", "XMin", "XMax", "YMin", "YMax",
                                   "GenderPresentation", "AgePresentation"))
    return _iter_miap(reader, errors)


def _iter_miap(reader: csv.DictReader,
               errors: list[RowError] | None) -> Iterator[MiapAnnotation]:
    for row in reader:
        line_no = reader.line_num
        image_id = (row["ImageID"] or "").strip()
        if not image_id:
            _reject(errors, line_no, "empty ImageID")
            continue
        try:
            x_min, x_max = float(row["XMin"]), float(row["XMax"])
            y_min, y_max = float(row["YMin"]), float(row["YMax"])
        except (TypeError, ValueError):
            _reject(errors, line_no, "non-numeric box coordinate")
            continue
        gender_token = (row["GenderPresentation"] or "").strip().lower()
        age_token = (row["AgePresentation"] or "").strip().lower()
        gender = _GENDER_TOKENS.get(gender_token)
        if gender is None:
            log.warning("line %d: unrecognized gender token %r, mapping to unknown",
                        line_no, row["GenderPresentation"])
            gender = GenderPresentation.UNKNOWN
        age = _AGE_TOKENS.get(age_token)
        if age is None:
            log.warning("line %d: unrecognized age token %r, mapping to unknown",
                        line_no, row["AgePresentation"])
            age = AgePresentation.UNKNOWN
        try:
            record = MiapAnnotation(image_id, x_min, x_max, y_min, y_max, gender, age)
        except ValueError as exc:
            _reject(errors, line_no, str(exc))
            continue
        yield record


def parse_hierarchy(stream: IO) -> LabelHierarchy:
    """Read a label hierarchy from a line-oriented edge list.

    Each non-blank, non-comment line is ``parent_id,child_id,relation`` with
    relation one of ``subcategory`` or ``part``. Duplicate edges are
    deduplicated; a cycle in either relation is an error naming the cycle.
    """
    edges: set[tuple[str, str, Relation]] = set()
    text = _text_stream(stream)
    for line_no, line in enumerate(text, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 3:
            raise HierarchyError(f"line {line_no}: expected parent,child,relation, got {line!r}")
        parent, child, token = fields
        if not parent or not child:
            raise HierarchyError(f"line {line_no}: empty label id")
        try:
            relation = Relation(token.lower())
        except ValueError:
            raise HierarchyError(f"line {line_no}: unknown relation token {token!r}") from None
        edges.add((parent, child, relation))
    return LabelHierarchy(edges)


# --- serialization -----------------------------------------------------------

_SOURCE_OUT = {Source.HUMAN_VERIFIED: "verification", Source.MACHINE_GENERATED: "machine"}
_GENDER_OUT = {
    GenderPresentation.FEMININE: "Predominantly Feminine",
    GenderPresentation.MASCULINE: "Predominantly Masculine",
    GenderPresentation.UNKNOWN: "Unknown",
}
_AGE_OUT = {
    AgePresentation.YOUNG: "Young",
    AgePresentation.MIDDLE: "Middle",
    AgePresentation.OLDER: "Older",
    AgePresentation.UNKNOWN: "Unknown",
}


def _fmt(value: float) -> str:
    # Shortest exact representation; integers lose the trailing ".0".
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def write_image_labels_csv(records: Iterable[ImageLevelLabel], fp: IO[str]) -> int:
    """Write records on the canonical 0-10 scale. Returns the row count."""
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(("ImageID", "Source", "LabelName", "Confidence"))
    count = 0
    for record in records:
        writer.writerow((record.image_id, _SOURCE_OUT[record.source],
                         record.label_id, _fmt(record.confidence)))
        count += 1
    return count


def write_boxes_csv(records: Iterable[BoxAnnotation], fp: IO[str]) -> int:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(("ImageID", "LabelName", "XMin", "XMax", "YMin", "YMax",
                     "IsGroupOf", "IsDepiction", "IsInside"))
    count = 0
    for record in records:
        writer.writerow((record.image_id, record.label_id,
                         _fmt(record.x_min), _fmt(record.x_max),
                         _fmt(record.y_min), _fmt(record.y_max),
                         int(record.is_group_of), int(record.is_depiction),
                         int(record.is_inside)))
        count += 1
    return count


def write_miap_csv(records: Iterable[MiapAnnotation], fp: IO[str]) -> int:
    writer = csv.writer(fp, lineterminator="\n")
    writer.writerow(("ImageID", "XMin", "XMax", "YMin", "YMax",
                     "GenderPresentation", "AgePresentation"))
    count = 0
    for record in records:
        writer.writerow((record.image_id,
                         _fmt(record.x_min), _fmt(record.x_max),
                         _fmt(record.y_min), _fmt(record.y_max),
                         _GENDER_OUT[record.gender], _AGE_OUT[record.age]))
        count += 1
    return count


def write_hierarchy_edges(hierarchy: LabelHierarchy, fp: IO[str]) -> int:
    count = 0
    for parent, child, relation in sorted(hierarchy.edges,
                                          key=lambda e: (e[0], e[1], e[2].value)):
        fp.write(f"{parent},{child},{relation.value}\n")
        count += 1
    return count
