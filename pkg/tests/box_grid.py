"""Exhaustive configuration grid for box-based labeling, with an oracle.

The oracle is an independent transcription of the documented decision
flowchart (floor-inclusive positives; too-small real subjects exclude even
when depictions exist; depiction-only images resolve per policy; disabled
parts resolve through part_only_disabled). Both the unit suite and the
acceptance suite replay the whole 480-case grid against it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from binsift.boxfilter import classify_by_boxes
from binsift.fusion import (ClassSet, DepictionPolicy, Reason, TaskSpec,
                            TriValue)
from binsift.ingest import BoxAnnotation

CLASS_SET = ClassSet(positive_ids=frozenset({"person"}),
                     conditional_part_ids=frozenset({"hand"}))

SPEC_VARIANTS = {
    "default": TaskSpec(target_label_ids=frozenset({"person"})),
    "exclude_depictions": TaskSpec(target_label_ids=frozenset({"person"}),
                                   depiction_policy=DepictionPolicy.EXCLUDE),
    "parts_off": TaskSpec(target_label_ids=frozenset({"person"}),
                          treat_parts_as_target=False),
    "strict": TaskSpec(target_label_ids=frozenset({"person"}),
                       require_verified_absence=True),
    "parts_off_strict": TaskSpec(target_label_ids=frozenset({"person"}),
                                 treat_parts_as_target=False,
                                 require_verified_absence=True),
}

# (label_id, width, height, is_depiction, is_group): 0.1*0.5 lands exactly on
# the 0.05 floor in float arithmetic.
REAL_TARGET_CHOICES = {
    "none": (),
    "small": (("person", 0.1, 0.1, False, False),),
    "boundary": (("person", 0.1, 0.5, False, False),),
    "large": (("person", 0.4, 0.5, False, False),),
}
PART_CHOICES = {
    "none": (),
    "real": (("hand", 0.6, 0.5, False, False),),
    "depicted": (("hand", 0.6, 0.5, True, False),),
}
TARGET_DEPICTION = ("person", 0.6, 0.5, True, False)
OTHER_DEPICTION = ("car", 0.6, 0.5, True, False)
GROUP_BOX = ("person", 1.0, 0.5, False, True)


@dataclass(frozen=True)
class GridCase:
    name: str
    spec_name: str
    boxes: tuple[tuple[str, float, float, bool, bool], ...]


def build_grid() -> list[GridCase]:
    cases = []
    for real, tdep, odep, part, group, spec_name in product(
            REAL_TARGET_CHOICES, (False, True), (False, True),
            PART_CHOICES, (False, True), SPEC_VARIANTS):
        boxes = list(REAL_TARGET_CHOICES[real]) + list(PART_CHOICES[part])
        if tdep:
            boxes.append(TARGET_DEPICTION)
        if odep:
            boxes.append(OTHER_DEPICTION)
        if group:
            boxes.append(GROUP_BOX)
        name = f"{real}-tdep{int(tdep)}-odep{int(odep)}-{part}-grp{int(group)}-{spec_name}"
        cases.append(GridCase(name, spec_name, tuple(boxes)))
    return cases


def oracle(case: GridCase):
    """Expected decision, straight from the documented flowchart."""
    spec = SPEC_VARIANTS[case.spec_name]
    parts_on = spec.treat_parts_as_target
    real_areas: list[float] = []
    tdep = odep = disabled_part = group_pos = False
    for label, w, h, dep, grp in case.boxes:
        if not parts_on and label == "hand":
            disabled_part = True
            if dep:
                odep = True
            continue
        if label == "person" or (parts_on and label == "hand"):
            if dep:
                tdep = True
            else:
                real_areas.append(w * h)
                if grp:
                    group_pos = True
        elif dep:
            odep = True
    max_area = max(real_areas, default=0.0)
    if real_areas and max_area >= spec.min_area_fraction:
        value, reason = TriValue.POSITIVE, Reason.CONFIDENT_MATCH
    elif real_areas:
        value, reason = TriValue.EXCLUDED, Reason.SMALL_SUBJECT_ONLY
    elif tdep:
        value = (TriValue.NEGATIVE
                 if spec.depiction_policy is DepictionPolicy.NEGATIVE
                 else TriValue.EXCLUDED)
        reason = Reason.DEPICTION_ONLY
    elif disabled_part:
        value = (TriValue.EXCLUDED if spec.require_verified_absence
                 else TriValue.NEGATIVE)
        reason = Reason.PART_ONLY_DISABLED
    else:
        value, reason = TriValue.NEGATIVE, Reason.NO_ANNOTATION
    return value, reason, max_area, tdep, odep, group_pos


def run_case(case: GridCase):
    spec = SPEC_VARIANTS[case.spec_name]
    boxes = [BoxAnnotation("im", label, 0.0, w, 0.0, h,
                           is_group_of=grp, is_depiction=dep)
             for label, w, h, dep, grp in case.boxes]
    d = classify_by_boxes(boxes, CLASS_SET, spec)
    return (d.label.value, d.label.reason, d.max_target_area,
            d.has_target_depiction, d.has_other_depiction,
            d.has_group_positive)
