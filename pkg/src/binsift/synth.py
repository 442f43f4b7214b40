"""Seeded synthetic annotation corpora for stress tests and demos.

Everything here is driven by one integer seed, so two calls with equal
arguments produce byte-identical files. The generated composition covers all
tri-state outcomes: confident positives, verified absences, low-confidence
rows, unrelated labels, and (for boxes) small subjects and depictions.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .ingest import (BoxAnnotation, ImageLevelLabel, LabelHierarchy, Relation,
                     Source, write_boxes_csv, write_hierarchy_edges,
                     write_image_labels_csv)

DEFAULT_TARGET = "target_class"
DEFAULT_SUBCATEGORY = "target_subtype"
DEFAULT_OTHER = ("other_a", "other_b", "other_c")


def synthetic_hierarchy(target: str = DEFAULT_TARGET) -> LabelHierarchy:
    edges = {
        (target, DEFAULT_SUBCATEGORY, Relation.SUBCATEGORY),
        ("stuff", DEFAULT_OTHER[0], Relation.SUBCATEGORY),
    }
    return LabelHierarchy(edges)


def synthetic_image_labels(n_images: int, seed: int, *,
                           target: str = DEFAULT_TARGET) -> list[ImageLevelLabel]:
    """One image-level label row per image with a mixed outcome profile.

    Roughly: 35% confident positives, 10% subcategory positives, 20% verified
    absent, 10% low confidence, 25% unrelated labels.
    """
    rng = np.random.default_rng(seed)
    kinds = rng.choice(5, size=n_images, p=(0.35, 0.10, 0.20, 0.10, 0.25))
    confidences = rng.uniform(7.0, 10.0, size=n_images)
    low = rng.uniform(1.0, 6.5, size=n_images)
    other_pick = rng.integers(0, len(DEFAULT_OTHER), size=n_images)
    records: list[ImageLevelLabel] = []
    for i in range(n_images):
        image_id = f"syn{i:07d}"
        kind = kinds[i]
        if kind == 0:
            records.append(ImageLevelLabel(image_id, target,
                                           Source.MACHINE_GENERATED,
                                           round(float(confidences[i]), 2)))
        elif kind == 1:
            records.append(ImageLevelLabel(image_id, DEFAULT_SUBCATEGORY,
                                           Source.HUMAN_VERIFIED, 10.0))
        elif kind == 2:
            records.append(ImageLevelLabel(image_id, target,
                                           Source.HUMAN_VERIFIED, 0.0))
        elif kind == 3:
            records.append(ImageLevelLabel(image_id, target,
                                           Source.MACHINE_GENERATED,
                                           round(float(low[i]), 2)))
        else:
            records.append(ImageLevelLabel(image_id, DEFAULT_OTHER[int(other_pick[i])],
                                           Source.HUMAN_VERIFIED, 10.0))
    return records


def synthetic_boxes(n_images: int, seed: int, *,
                    target: str = DEFAULT_TARGET) -> list[BoxAnnotation]:
    """One box per image mixing sizes, depictions, and unrelated classes."""
    rng = np.random.default_rng(seed)
    kinds = rng.choice(4, size=n_images, p=(0.40, 0.15, 0.15, 0.30))
    spans = rng.uniform(0.3, 0.95, size=(n_images, 2))
    small = rng.uniform(0.05, 0.2, size=(n_images, 2))
    other_pick = rng.integers(0, len(DEFAULT_OTHER), size=n_images)
    boxes: list[BoxAnnotation] = []
    for i in range(n_images):
        image_id = f"syn{i:07d}"
        kind = kinds[i]
        if kind == 0:
            w, h = spans[i]
            boxes.append(BoxAnnotation(image_id, target, 0.0, round(float(w), 4),
                                       0.0, round(float(h), 4)))
        elif kind == 1:
            w, h = small[i]
            boxes.append(BoxAnnotation(image_id, target, 0.0, round(float(w), 4),
                                       0.0, round(float(h), 4)))
        elif kind == 2:
            w, h = spans[i]
            boxes.append(BoxAnnotation(image_id, target, 0.0, round(float(w), 4),
                                       0.0, round(float(h), 4), is_depiction=True))
        else:
            w, h = spans[i]
            boxes.append(BoxAnnotation(image_id, DEFAULT_OTHER[int(other_pick[i])],
                                       0.0, round(float(w), 4),
                                       0.0, round(float(h), 4)))
    return boxes


def write_synthetic_corpus(out_dir: str | Path, n_images: int, seed: int, *,
                           target: str = DEFAULT_TARGET) -> dict[str, Path]:
    """Write a full synthetic metadata corpus plus a matching task spec."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {
        "hierarchy": out / "hierarchy.csv",
        "image_labels": out / "image_labels.csv",
        "boxes": out / "boxes.csv",
        "task_spec": out / "task_spec.yaml",
    }
    with paths["hierarchy"].open("w", encoding="utf-8", newline="") as fp:
        write_hierarchy_edges(synthetic_hierarchy(target), fp)
    with paths["image_labels"].open("w", encoding="utf-8", newline="") as fp:
        write_image_labels_csv(synthetic_image_labels(n_images, seed, target=target), fp)
    with paths["boxes"].open("w", encoding="utf-8", newline="") as fp:
        write_boxes_csv(synthetic_boxes(n_images, seed + 1, target=target), fp)
    paths["task_spec"].write_text(
        f"target_label_ids: [{target}]\n", encoding="utf-8")
    return paths
