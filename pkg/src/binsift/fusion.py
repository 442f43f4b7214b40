"""Class-set resolution and tri-state labeling from image-level annotations.

The task spec declares which label ids mean "the target is present"; the
hierarchy expands that declaration into a concrete class set. Labeling then
maps one image's annotation rows onto positive / negative / excluded, where
excluded means "too ambiguous to keep on either side".
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import yaml

from .errors import ConfigError, UnknownLabelError
from .ingest import CONFIDENCE_MAX, ImageLevelLabel, LabelHierarchy, Source


class TriValue(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    EXCLUDED = "excluded"


class Reason(Enum):
    """Why a tri-state decision came out the way it did."""

    CONFIDENT_MATCH = "confident_match"
    VERIFIED_ABSENT = "verified_absent"
    LOW_CONFIDENCE = "low_confidence"
    SMALL_SUBJECT_ONLY = "small_subject_only"
    DEPICTION_ONLY = "depiction_only"
    NO_ANNOTATION = "no_annotation"
    PART_ONLY_DISABLED = "part_only_disabled"


# Which decision values each reason may legally accompany.
_REASON_VALUES: dict[Reason, frozenset[TriValue]] = {
    Reason.CONFIDENT_MATCH: frozenset({TriValue.POSITIVE}),
    Reason.VERIFIED_ABSENT: frozenset({TriValue.NEGATIVE}),
    Reason.LOW_CONFIDENCE: frozenset({TriValue.EXCLUDED}),
    Reason.SMALL_SUBJECT_ONLY: frozenset({TriValue.EXCLUDED}),
    Reason.DEPICTION_ONLY: frozenset({TriValue.NEGATIVE, TriValue.EXCLUDED}),
    Reason.NO_ANNOTATION: frozenset({TriValue.NEGATIVE, TriValue.EXCLUDED}),
    Reason.PART_ONLY_DISABLED: frozenset({TriValue.NEGATIVE, TriValue.EXCLUDED}),
}


@dataclass(frozen=True)
class TriLabel:
    value: TriValue
    reason: Reason

    def __post_init__(self):
        if self.value not in _REASON_VALUES[self.reason]:
            raise ValueError(f"reason {self.reason.value} cannot justify {self.value.value}")


class DepictionPolicy(Enum):
    """What to do with images whose only evidence is depictions of the target."""

    NEGATIVE = "negative"
    EXCLUDE = "exclude"


@dataclass(frozen=True)
class TaskSpec:
    """Declarative description of one binary curation task.

    target_label_ids seed the subcategory closure. Synonyms are alternate
    image-level names for the target and never checked against the hierarchy.
    Core parts always count as the target; the part-relation frontier found in
    the hierarchy counts only while treat_parts_as_target is on.
    require_verified_absence switches negatives to strict mode: an image with
    no annotation of the class set cannot be called negative, only a verified
    absence can.
    """

    target_label_ids: frozenset[str]
    synonym_label_ids: frozenset[str] = frozenset()
    core_part_label_ids: frozenset[str] = frozenset()
    treat_parts_as_target: bool = True
    depiction_policy: DepictionPolicy = DepictionPolicy.NEGATIVE
    min_confidence: float = 7.0
    min_area_fraction: float = 0.05
    require_verified_absence: bool = False

    def __post_init__(self):
        object.__setattr__(self, "target_label_ids", frozenset(self.target_label_ids))
        object.__setattr__(self, "synonym_label_ids", frozenset(self.synonym_label_ids))
        object.__setattr__(self, "core_part_label_ids", frozenset(self.core_part_label_ids))
        if not self.target_label_ids:
            raise ValueError("target_label_ids must not be empty")
        if not 0.0 <= self.min_confidence <= CONFIDENCE_MAX:
            raise ValueError(f"min_confidence {self.min_confidence} outside [0, {CONFIDENCE_MAX}]")
        if not 0.0 <= self.min_area_fraction <= 1.0:
            raise ValueError(f"min_area_fraction {self.min_area_fraction} outside [0, 1]")
        overlap = (self.target_label_ids & self.synonym_label_ids
                   | self.target_label_ids & self.core_part_label_ids
                   | self.synonym_label_ids & self.core_part_label_ids)
        if overlap:
            raise ValueError(f"label id sets must be disjoint, shared: {sorted(overlap)}")


_TASK_SPEC_KEYS = {
    "target_label_ids", "synonym_label_ids", "core_part_label_ids",
    "treat_parts_as_target", "depiction_policy", "min_confidence",
    "min_area_fraction", "require_verified_absence",
}


def task_spec_from_mapping(data: Mapping) -> TaskSpec:
    """Build a TaskSpec from a parsed config mapping; keys match field names."""
    unknown = set(data) - _TASK_SPEC_KEYS
    if unknown:
        raise ConfigError(f"unknown task spec keys: {sorted(unknown)}")
    if "target_label_ids" not in data:
        raise ConfigError("task spec must set target_label_ids")
    kwargs: dict = {}
    for key in ("target_label_ids", "synonym_label_ids", "core_part_label_ids"):
        if key in data:
            value = data[key]
            if isinstance(value, str) or not isinstance(value, Iterable):
                raise ConfigError(f"{key} must be a list of label ids")
            kwargs[key] = frozenset(str(v) for v in value)
    for key in ("treat_parts_as_target", "require_verified_absence"):
        if key in data:
            if not isinstance(data[key], bool):
                raise ConfigError(f"{key} must be a boolean")
            kwargs[key] = data[key]
    if "depiction_policy" in data:
        try:
            kwargs["depiction_policy"] = DepictionPolicy(str(data["depiction_policy"]))
        except ValueError:
            raise ConfigError(
                f"depiction_policy must be one of "
                f"{[p.value for p in DepictionPolicy]}, got {data['depiction_policy']!r}"
            ) from None
    for key in ("min_confidence", "min_area_fraction"):
        if key in data:
            try:
                kwargs[key] = float(data[key])
            except (TypeError, ValueError):
                raise ConfigError(f"{key} must be a number") from None
    try:
        return TaskSpec(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def load_task_spec(path: str | Path) -> TaskSpec:
    """Load a TaskSpec from a YAML file of field-name keys."""
    raw = Path(path).read_text(encoding="utf-8")
    data = yaml.safe_load(raw)
    if not isinstance(data, Mapping):
        raise ConfigError(f"task spec file {path} must contain a mapping")
    return task_spec_from_mapping(data)


@dataclass(frozen=True)
class ClassSet:
    """Resolved label ids for one task.

    positive_ids always count as the target (closure of targets, synonyms and
    core parts). conditional_part_ids count only while the task spec's
    treat_parts_as_target is on.
    """

    positive_ids: frozenset[str]
    conditional_part_ids: frozenset[str] = frozenset()

    def evidence_ids(self, spec: TaskSpec) -> frozenset[str]:
        """The ids that count as target evidence under the given spec."""
        if spec.treat_parts_as_target:
            return self.positive_ids | self.conditional_part_ids
        return self.positive_ids


def resolve_class_set(hierarchy: LabelHierarchy, spec: TaskSpec) -> ClassSet:
    """Expand a task spec into a concrete class set using the hierarchy.

    Targets and core parts must exist in a non-empty hierarchy's registry;
    an empty hierarchy accepts any id as a leaf. positive_ids is the
    subcategory closure of targets + synonyms + core parts; the conditional
    part set is the subcategory-closed part frontier of the target closure
    minus anything already positive.
    """
    if not hierarchy.is_empty:
        missing = (spec.target_label_ids | spec.core_part_label_ids) - hierarchy.registry
        if missing:
            raise UnknownLabelError(
                f"label ids not in the hierarchy registry: {sorted(missing)}")
    seeds = spec.target_label_ids | spec.synonym_label_ids | spec.core_part_label_ids
    positive = hierarchy.subcategory_closure(seeds)
    frontier: set[str] = set()
    for label_id in hierarchy.subcategory_closure(spec.target_label_ids):
        frontier.update(hierarchy.parts(label_id))
    conditional = hierarchy.subcategory_closure(frontier) - positive
    return ClassSet(positive_ids=positive, conditional_part_ids=frozenset(conditional))


def image_level_label(labels: Iterable[ImageLevelLabel], class_set: ClassSet,
                      spec: TaskSpec) -> TriLabel:
    """Tri-state decision for one image from its image-level labels.

    Rule order: confident evidence wins; then uncertain evidence excludes;
    then ignored-part evidence resolves per policy; then absence. Confidence 0
    means verified absent in the source format regardless of source, but
    strict mode only accepts a human-verified 0.
    """
    evidence_ids = class_set.evidence_ids(spec)
    evidence = [l for l in labels if l.label_id in evidence_ids]
    if any(l.confidence >= spec.min_confidence for l in evidence):
        return TriLabel(TriValue.POSITIVE, Reason.CONFIDENT_MATCH)
    if any(0.0 < l.confidence < spec.min_confidence for l in evidence):
        return TriLabel(TriValue.EXCLUDED, Reason.LOW_CONFIDENCE)
    if not spec.treat_parts_as_target:
        # Parts are switched off; note when they were the only thing present.
        part_hits = [l for l in labels
                     if l.label_id in class_set.conditional_part_ids
                     and l.confidence >= spec.min_confidence]
        if part_hits:
            value = TriValue.EXCLUDED if spec.require_verified_absence else TriValue.NEGATIVE
            return TriLabel(value, Reason.PART_ONLY_DISABLED)
    if evidence:
        # Everything left is confidence 0.
        if spec.require_verified_absence and not any(
                l.source is Source.HUMAN_VERIFIED for l in evidence):
            return TriLabel(TriValue.EXCLUDED, Reason.NO_ANNOTATION)
        return TriLabel(TriValue.NEGATIVE, Reason.VERIFIED_ABSENT)
    if spec.require_verified_absence:
        return TriLabel(TriValue.EXCLUDED, Reason.NO_ANNOTATION)
    return TriLabel(TriValue.NEGATIVE, Reason.NO_ANNOTATION)


def has_verified_conflict(labels: Iterable[ImageLevelLabel], class_set: ClassSet,
                          spec: TaskSpec) -> bool:
    """True when confident positive evidence coexists with a verified absence.

    Positive wins the decision; this flag lets reports count the conflicts.
    """
    evidence_ids = class_set.evidence_ids(spec)
    evidence = [l for l in labels if l.label_id in evidence_ids]
    confident = any(l.confidence >= spec.min_confidence for l in evidence)
    absent = any(l.source is Source.HUMAN_VERIFIED and l.confidence == 0.0 for l in evidence)
    return confident and absent
