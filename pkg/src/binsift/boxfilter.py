"""Tri-state labeling from bounding boxes.

Decision order, fixed by contract:

1. any real (non-depiction) target-class box at or above the area floor
   -> positive
2. real target-class boxes exist but all fall below the floor -> excluded
   (subject too small to keep on either side)
3. target-class evidence is depictions only -> negative or excluded per the
   task spec's depiction policy
4. no target-class box at all -> negative

Group-of boxes count as positive evidence and are flagged for downstream
filtering. Conditional-part boxes participate only while
treat_parts_as_target is on; when off, part-only images resolve through the
part_only_disabled reason instead of plain absence.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .fusion import ClassSet, DepictionPolicy, Reason, TaskSpec, TriLabel, TriValue
from .ingest import BoxAnnotation


def box_area_fraction(box: BoxAnnotation) -> float:
    """Fraction of the image the box covers (coordinates are normalized)."""
    return (box.x_max - box.x_min) * (box.y_max - box.y_min)


@dataclass(frozen=True)
class BoxDecision:
    """Outcome of box-based labeling for one image.

    max_target_area is the largest real target-class box seen (0.0 when there
    is none), recorded even for excluded images so distance banding and
    diagnostics can reuse it. The depiction bits are observations, not
    decisions: a positive image can still carry a target depiction.
    """

    label: TriLabel
    max_target_area: float = 0.0
    has_target_depiction: bool = False
    has_other_depiction: bool = False
    has_group_positive: bool = False


def classify_by_boxes(boxes: Iterable[BoxAnnotation], class_set: ClassSet,
                      spec: TaskSpec) -> BoxDecision:
    """Apply the decision flowchart to one image's boxes."""
    target_ids = class_set.evidence_ids(spec)
    real_areas: list[float] = []
    group_hit = False
    target_depiction = False
    other_depiction = False
    disabled_part_seen = False
    for box in boxes:
        if not spec.treat_parts_as_target and box.label_id in class_set.conditional_part_ids:
            # Ignored as evidence, but a depicted part is still a depiction
            # of something we are not treating as the target.
            disabled_part_seen = True
            if box.is_depiction:
                other_depiction = True
            continue
        if box.label_id in target_ids:
            if box.is_depiction:
                target_depiction = True
            else:
                real_areas.append(box_area_fraction(box))
                if box.is_group_of:
                    group_hit = True
        elif box.is_depiction:
            other_depiction = True

    max_area = max(real_areas, default=0.0)
    if real_areas and max_area >= spec.min_area_fraction:
        label = TriLabel(TriValue.POSITIVE, Reason.CONFIDENT_MATCH)
    elif real_areas:
        # Rule 2 outranks rule 3: a too-small real subject excludes the image
        # even when a large depiction is also present.
        label = TriLabel(TriValue.EXCLUDED, Reason.SMALL_SUBJECT_ONLY)
    elif target_depiction:
        if spec.depiction_policy is DepictionPolicy.NEGATIVE:
            label = TriLabel(TriValue.NEGATIVE, Reason.DEPICTION_ONLY)
        else:
            label = TriLabel(TriValue.EXCLUDED, Reason.DEPICTION_ONLY)
    elif disabled_part_seen:
        value = TriValue.EXCLUDED if spec.require_verified_absence else TriValue.NEGATIVE
        label = TriLabel(value, Reason.PART_ONLY_DISABLED)
    else:
        label = TriLabel(TriValue.NEGATIVE, Reason.NO_ANNOTATION)
    return BoxDecision(
        label=label,
        max_target_area=max_area,
        has_target_depiction=target_depiction,
        has_other_depiction=other_depiction,
        has_group_positive=group_hit,
    )
