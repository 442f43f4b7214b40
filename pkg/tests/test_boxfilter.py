from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from binsift.boxfilter import BoxDecision, box_area_fraction, classify_by_boxes
from binsift.fusion import Reason, TriValue
from binsift.ingest import BoxAnnotation
from box_grid import CLASS_SET, SPEC_VARIANTS, build_grid, oracle, run_case

SPEC = SPEC_VARIANTS["default"]


def _box(label="person", w=0.5, h=0.5, dep=False, grp=False):
    return BoxAnnotation("im", label, 0.0, w, 0.0, h,
                         is_group_of=grp, is_depiction=dep)


GRID = build_grid()


def test_grid_has_480_cases():
    assert len(GRID) == 480
    assert len({c.name for c in GRID}) == 480


@pytest.mark.parametrize("case", GRID, ids=[c.name for c in GRID])
def test_grid_case_matches_oracle(case):
    assert run_case(case) == oracle(case)


class TestFlowchart:
    def test_floor_is_inclusive(self):
        # 0.1 * 0.5 == 0.05 exactly in binary floating point
        d = classify_by_boxes([_box(w=0.1, h=0.5)], CLASS_SET, SPEC)
        assert d.label.value is TriValue.POSITIVE
        assert d.max_target_area == SPEC.min_area_fraction

    def test_small_real_subject_excludes(self):
        d = classify_by_boxes([_box(w=0.1, h=0.1)], CLASS_SET, SPEC)
        assert d.label.value is TriValue.EXCLUDED
        assert d.label.reason is Reason.SMALL_SUBJECT_ONLY

    def test_small_real_beats_large_depiction(self):
        # rule 2 outranks rule 3
        d = classify_by_boxes([_box(w=0.1, h=0.1), _box(dep=True)],
                              CLASS_SET, SPEC)
        assert d.label.reason is Reason.SMALL_SUBJECT_ONLY
        assert d.has_target_depiction

    def test_depiction_only_default_negative(self):
        d = classify_by_boxes([_box(dep=True)], CLASS_SET, SPEC)
        assert d.label.value is TriValue.NEGATIVE
        assert d.label.reason is Reason.DEPICTION_ONLY

    def test_depiction_only_exclude_policy(self):
        d = classify_by_boxes([_box(dep=True)], CLASS_SET,
                              SPEC_VARIANTS["exclude_depictions"])
        assert d.label.value is TriValue.EXCLUDED

    def test_no_boxes_is_negative(self):
        d = classify_by_boxes([], CLASS_SET, SPEC)
        assert d.label.value is TriValue.NEGATIVE
        assert d.label.reason is Reason.NO_ANNOTATION
        assert d == BoxDecision(label=d.label)

    def test_group_box_counts_and_flags(self):
        d = classify_by_boxes([_box(w=1.0, h=0.5, grp=True)], CLASS_SET, SPEC)
        assert d.label.value is TriValue.POSITIVE
        assert d.has_group_positive

    def test_nontarget_real_box_is_invisible(self):
        d = classify_by_boxes([_box(label="car")], CLASS_SET, SPEC)
        assert d == classify_by_boxes([], CLASS_SET, SPEC)

    def test_nontarget_depiction_sets_observation_bit_only(self):
        d = classify_by_boxes([_box(label="car", dep=True)], CLASS_SET, SPEC)
        assert d.label.value is TriValue.NEGATIVE
        assert d.has_other_depiction and not d.has_target_depiction

    def test_part_box_counts_while_parts_on(self):
        d = classify_by_boxes([_box(label="hand")], CLASS_SET, SPEC)
        assert d.label.value is TriValue.POSITIVE

    def test_part_only_when_parts_off(self):
        d = classify_by_boxes([_box(label="hand")], CLASS_SET,
                              SPEC_VARIANTS["parts_off"])
        assert d.label.value is TriValue.NEGATIVE
        assert d.label.reason is Reason.PART_ONLY_DISABLED

    def test_depicted_disabled_part_is_an_other_depiction(self):
        d = classify_by_boxes([_box(label="hand", dep=True)], CLASS_SET,
                              SPEC_VARIANTS["parts_off"])
        assert d.has_other_depiction and not d.has_target_depiction


def area_boxes():
    return st.tuples(
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
        st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    ).map(lambda wh: _box(w=wh[0], h=wh[1]))


any_boxes = st.builds(
    _box,
    label=st.sampled_from(["person", "hand", "car", "tree"]),
    w=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    h=st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
    dep=st.booleans(),
    grp=st.booleans(),
)


class TestProperties:
    @given(st.lists(any_boxes, max_size=10))
    def test_max_target_area_is_max_over_real_target_boxes(self, boxes):
        d = classify_by_boxes(boxes, CLASS_SET, SPEC)
        expected = max((box_area_fraction(b) for b in boxes
                        if b.label_id in ("person", "hand") and not b.is_depiction),
                       default=0.0)
        assert d.max_target_area == expected

    @given(st.lists(any_boxes, max_size=10))
    def test_real_nontarget_boxes_never_matter(self, boxes):
        with_noise = boxes + [_box(label="tree", w=0.9, h=0.9)]
        assert (classify_by_boxes(boxes, CLASS_SET, SPEC)
                == classify_by_boxes(with_noise, CLASS_SET, SPEC))

    @given(st.lists(any_boxes, max_size=10))
    def test_adding_a_big_real_target_always_yields_positive(self, boxes):
        d = classify_by_boxes(boxes + [_box(w=1.0, h=1.0)], CLASS_SET, SPEC)
        assert d.label.value is TriValue.POSITIVE

    @given(area_boxes())
    def test_single_box_band_matches_area(self, box):
        d = classify_by_boxes([box], CLASS_SET, SPEC)
        area = box_area_fraction(box)
        if area >= SPEC.min_area_fraction:
            assert d.label.value is TriValue.POSITIVE
        elif area > 0 or (box.x_max > box.x_min or box.y_max > box.y_min):
            assert d.label.value is TriValue.EXCLUDED
        else:
            # degenerate zero-extent box: still a real annotation, too small
            assert d.label.value is TriValue.EXCLUDED

    @given(st.lists(any_boxes, max_size=10))
    def test_decision_independent_of_box_order(self, boxes):
        assert (classify_by_boxes(boxes, CLASS_SET, SPEC)
                == classify_by_boxes(list(reversed(boxes)), CLASS_SET, SPEC))


def test_box_area_fraction():
    assert box_area_fraction(_box(w=0.5, h=0.5)) == 0.25
    assert box_area_fraction(BoxAnnotation("im", "x", 0.25, 0.75, 0.5, 1.0)) == 0.25
