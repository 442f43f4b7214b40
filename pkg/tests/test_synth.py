from __future__ import annotations

from binsift.assembly import (LABELER_BOUNDING_BOX, LABELER_IMAGE_LEVEL,
                              Split, build_split, group_annotations)
from binsift.fusion import TaskSpec, load_task_spec, resolve_class_set
from binsift.ingest import parse_boxes, parse_hierarchy, parse_image_labels
from binsift.synth import (DEFAULT_TARGET, synthetic_boxes,
                           synthetic_hierarchy, synthetic_image_labels,
                           write_synthetic_corpus)


def test_labels_are_seed_deterministic():
    assert synthetic_image_labels(500, seed=3) == synthetic_image_labels(500, seed=3)
    assert synthetic_image_labels(500, seed=3) != synthetic_image_labels(500, seed=4)


def test_boxes_are_seed_deterministic():
    assert synthetic_boxes(300, seed=9) == synthetic_boxes(300, seed=9)


def test_label_mix_covers_all_tri_states():
    labels = synthetic_image_labels(2000, seed=1)
    spec = TaskSpec(target_label_ids=frozenset({DEFAULT_TARGET}))
    class_set = resolve_class_set(synthetic_hierarchy(), spec)
    records = group_annotations(labels)
    result = build_split(records, LABELER_IMAGE_LEVEL, class_set, spec,
                         split=Split.TRAIN_LARGE, seed=1)
    report = result.report
    assert report.positives > 0
    assert report.excluded > 0
    assert report.positives + report.negatives + report.excluded + report.dropped == 2000


def test_box_mix_exercises_small_subjects_and_depictions(tmp_path):
    boxes = synthetic_boxes(2000, seed=2)
    spec = TaskSpec(target_label_ids=frozenset({DEFAULT_TARGET}))
    class_set = resolve_class_set(synthetic_hierarchy(), spec)
    records = group_annotations([], boxes)
    result = build_split(records, LABELER_BOUNDING_BOX, class_set, spec,
                         split=Split.TEST, seed=2)
    assert result.report.excluded > 0          # small subjects
    assert any(d.has_target_depiction for d in result.decisions.values())


def test_written_corpus_parses_and_resolves(tmp_path):
    out = tmp_path / "corpus"
    write_synthetic_corpus(out, n_images=200, seed=5)
    with (out / "hierarchy.csv").open() as fp:
        hierarchy = parse_hierarchy(fp)
    spec = load_task_spec(out / "task_spec.yaml")
    class_set = resolve_class_set(hierarchy, spec)
    assert DEFAULT_TARGET in class_set.positive_ids
    with (out / "image_labels.csv").open() as fp:
        labels = list(parse_image_labels(fp))
    with (out / "boxes.csv").open() as fp:
        boxes = list(parse_boxes(fp))
    assert len(labels) == 200
    assert len({b.image_id for b in boxes}) == 200


def test_written_corpus_is_byte_stable(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    write_synthetic_corpus(a, n_images=100, seed=7)
    write_synthetic_corpus(b, n_images=100, seed=7)
    for name in ("hierarchy.csv", "image_labels.csv", "boxes.csv", "task_spec.yaml"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
