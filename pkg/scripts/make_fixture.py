#!/usr/bin/env python3
"""Regenerate the bundled fixture corpus (and optionally the golden outputs).

The corpus is 40 hand-designed images: 20 in the training pool (annotated
with both image-level labels and boxes), 8 validation and 12 test images
(boxes, demographics, and solid-color thumbnails for lighting). The design
covers every decision branch: boundary confidences and areas, synonyms, core
and conditional parts, group boxes, target and non-target depictions,
verified absences, low-confidence rows, and demographic consensus cases.

Usage:
    python scripts/make_fixture.py [--out tests/data/fixture] [--goldens]

--goldens reruns the full CLI pipeline on the fixture and refreshes
tests/data/golden. Only do that deliberately: goldens are frozen outputs and
tests compare against them byte for byte.
"""

from __future__ import annotations

import argparse
import shutil
import sys
from pathlib import Path

REPO_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO_ROOT / "src"))

from binsift.evaluation import ModelCard, write_model_cards_csv
from binsift.ingest import (AgePresentation, BoxAnnotation, GenderPresentation,
                            ImageLevelLabel, MiapAnnotation, Source,
                            write_boxes_csv, write_image_labels_csv,
                            write_miap_csv)

HUMAN = Source.HUMAN_VERIFIED
MACHINE = Source.MACHINE_GENERATED

HIERARCHY_LINES = """\
person,woman,subcategory
person,man,subcategory
person,girl,subcategory
person,boy,subcategory
person,human_body,part
person,human_face,part
person,human_head,part
person,human_hand,part
person,human_foot,part
person,beard,part
animal,bird,subcategory
animal,cat,subcategory
animal,dog,subcategory
vehicle,car,subcategory
"""

PERSON_TASK = """\
target_label_ids: [person]
synonym_label_ids: [human, child]
core_part_label_ids: [human_body, human_face, human_head]
treat_parts_as_target: true
depiction_policy: negative
min_confidence: 7
min_area_fraction: 0.05
"""

BIRD_TASK = """\
target_label_ids: [bird]
"""

GENERATE_CONFIG = """\
task_spec: person_task.yaml
hierarchy: hierarchy.csv
train_image_labels: train_image_labels.csv
train_boxes: train_boxes.csv
val_boxes: val_boxes.csv
test_boxes: test_boxes.csv
overrides_test: overrides_test.csv
seed: 20240901
workers: 1
output_dir: out
"""

# (image_id, label_id, source, confidence on the 0-10 scale)
IMAGE_LABELS = [
    ("t01", "person", MACHINE, 8.0),
    ("t02", "woman", HUMAN, 10.0),
    ("t03", "man", MACHINE, 7.0),          # exactly at the default threshold
    ("t04", "human", MACHINE, 9.0),        # synonym
    ("t05", "human_hand", MACHINE, 9.0),   # conditional part
    ("t06", "human_face", MACHINE, 8.0),   # core part
    ("t07", "person", HUMAN, 10.0),
    ("t07", "car", HUMAN, 10.0),
    ("t08", "child", MACHINE, 8.0),        # synonym
    ("t09", "person", HUMAN, 0.0),         # verified absent
    ("t10", "person", HUMAN, 0.0),
    ("t10", "car", HUMAN, 10.0),
    ("t11", "car", MACHINE, 9.0),
    ("t12", "bird", HUMAN, 10.0),
    ("t13", "bird", HUMAN, 10.0),
    ("t13", "person", MACHINE, 6.0),       # low confidence -> excluded
    ("t14", "cat", MACHINE, 8.0),
    ("t15", "person", MACHINE, 6.99),      # just below the threshold
    ("t16", "woman", MACHINE, 3.0),
    ("t17", "cat", HUMAN, 10.0),
    ("t18", "bird", MACHINE, 9.0),
    ("t19", "dog", HUMAN, 10.0),
    ("t20", "person", HUMAN, 0.0),
]

# (image_id, label_id, x_min, x_max, y_min, y_max, group, depiction)
TRAIN_BOXES = [
    ("t01", "person", 0.0, 0.8, 0.0, 0.8, 0, 0),        # area 0.64
    ("t02", "woman", 0.2, 0.8, 0.0, 0.5, 0, 0),         # area 0.30
    ("t03", "person", 0.0, 0.1, 0.0, 0.5, 0, 0),        # area exactly 0.05
    ("t04", "human_face", 0.0, 0.5, 0.0, 0.4, 0, 0),    # core part, area 0.20
    ("t05", "human_hand", 0.0, 0.6, 0.0, 0.5, 0, 0),    # conditional part, 0.30
    ("t06", "person", 0.0, 1.0, 0.0, 0.5, 1, 0),        # group box, area 0.50
    ("t07", "person", 0.0, 1.0, 0.0, 0.5, 0, 0),
    ("t07", "person", 0.0, 0.6, 0.0, 0.5, 0, 1),        # plus a depiction
    ("t09", "person", 0.0, 0.2, 0.0, 0.2, 0, 0),        # area 0.04: small
    ("t10", "person", 0.0, 0.1, 0.0, 0.49, 0, 0),       # area 0.049: small
    ("t11", "car", 0.0, 0.6, 0.0, 0.5, 0, 0),
    ("t12", "bird", 0.0, 0.5, 0.0, 0.4, 0, 0),
    ("t13", "bird", 0.0, 1.0, 0.0, 0.6, 0, 0),
    ("t14", "person", 0.0, 1.0, 0.0, 0.5, 0, 1),        # depiction only
    ("t15", "person", 0.0, 0.8, 0.0, 0.5, 0, 1),
    ("t15", "car", 0.0, 0.4, 0.0, 0.5, 0, 0),
    ("t16", "car", 0.0, 0.6, 0.0, 0.5, 0, 1),           # non-target depiction
    ("t17", "bird", 0.0, 0.35, 0.0, 0.2, 0, 0),         # area 0.07
    ("t18", "bird", 0.0, 0.6, 0.0, 0.5, 0, 1),          # bird depiction
    ("t19", "cat", 0.0, 0.4, 0.0, 0.5, 0, 0),
    ("t20", "person", 0.0, 0.1, 0.0, 0.1, 0, 0),        # area 0.01: small
]

VAL_BOXES = [
    ("v01", "person", 0.0, 1.0, 0.0, 0.7, 0, 0),        # 0.70 near
    ("v02", "person", 0.0, 0.6, 0.0, 0.5, 0, 0),        # 0.30 medium
    ("v03", "person", 0.0, 0.2, 0.0, 0.4, 0, 0),        # 0.08 far
    ("v04", "woman", 0.0, 1.0, 0.0, 0.65, 0, 0),        # 0.65 near
    ("v05", "person", 0.0, 0.8, 0.0, 0.5, 0, 1),        # depiction of a person
    ("v06", "car", 0.0, 0.6, 0.0, 0.5, 0, 1),           # depiction, not a person
    ("v07", "car", 0.0, 1.0, 0.0, 0.5, 0, 0),
    ("v07", "bird", 0.0, 0.7, 0.0, 0.5, 0, 0),          # bird-task positive
    ("v08", "person", 0.0, 0.1, 0.0, 0.3, 0, 0),        # 0.03: small
]

TEST_BOXES = [
    ("s01", "person", 0.0, 1.0, 0.0, 0.8, 0, 0),        # 0.80 near (overridden)
    ("s02", "person", 0.0, 0.9, 0.0, 0.5, 0, 0),        # 0.45 medium
    ("s03", "person", 0.0, 0.35, 0.0, 0.2, 0, 0),       # 0.07 far
    ("s04", "man", 0.0, 1.0, 0.0, 0.9, 0, 0),           # 0.90 near
    ("s05", "human_hand", 0.0, 0.5, 0.0, 0.5, 0, 0),    # 0.25 medium
    ("s06", "person", 0.0, 0.4, 0.0, 0.3, 0, 0),        # 0.12 medium
    ("s06", "bird", 0.0, 1.0, 0.0, 0.5, 0, 0),          # bird-task positive
    ("s07", "person", 0.0, 1.0, 0.0, 0.6, 0, 1),
    ("s08", "person", 0.0, 0.4, 0.0, 0.5, 0, 1),
    ("s08", "car", 0.0, 0.6, 0.0, 0.5, 0, 0),
    ("s09", "car", 0.0, 0.8, 0.0, 0.5, 0, 1),
    ("s10", "cat", 0.0, 0.6, 0.0, 0.5, 0, 0),
    ("s11", "bird", 0.0, 0.9, 0.0, 0.5, 0, 0),          # bird-task positive
    ("s12", "person", 0.0, 0.2, 0.0, 0.1, 0, 0),        # 0.02: small
]

FEM = GenderPresentation.FEMININE
MASC = GenderPresentation.MASCULINE
G_UNK = GenderPresentation.UNKNOWN
YOUNG = AgePresentation.YOUNG
MIDDLE = AgePresentation.MIDDLE
OLDER = AgePresentation.OLDER
A_UNK = AgePresentation.UNKNOWN

MIAP_ROWS = [
    ("v01", 0.1, 0.9, 0.1, 0.7, FEM, OLDER),
    ("v02", 0.1, 0.5, 0.2, 0.5, MASC, MIDDLE),
    ("v03", 0.0, 0.1, 0.0, 0.2, FEM, YOUNG),     # two boxes disagree on gender,
    ("v03", 0.1, 0.2, 0.1, 0.4, MASC, YOUNG),    # agree on age
    ("v04", 0.2, 0.8, 0.1, 0.6, G_UNK, A_UNK),
    ("s01", 0.0, 1.0, 0.0, 0.8, MASC, OLDER),
    ("s02", 0.0, 0.9, 0.0, 0.5, FEM, MIDDLE),
    ("s03", 0.0, 0.35, 0.0, 0.2, FEM, YOUNG),
    ("s06", 0.0, 0.4, 0.0, 0.3, MASC, MIDDLE),
]

# Solid-gray thumbnail value per evaluation image; interior to the lighting
# bands on purpose (boundary behavior is pinned by unit tests instead).
IMAGE_MEANS = {
    "v01": 40, "v02": 120, "v03": 200, "v04": 100,
    "v05": 50, "v06": 128, "v07": 220, "v08": 90,
    "s01": 210, "s02": 110, "s03": 70, "s04": 45,
    "s05": 130, "s06": 190, "s07": 140, "s08": 30,
    "s09": 125, "s10": 230, "s11": 135, "s12": 100,
}
PNG_IMAGES = {"s01", "v03"}  # the rest are PPM

MODEL_CARDS = [
    # name, ram kiB, flash kiB, macs, accuracy
    ("MobileNetV2_0.25", 1244.5, 410.55, 36_453_732, 84.9),
    ("MCUNet_10fps_vww", 168.5, 533.84, 5_998_334, 81.7),
    ("MCUNet_5fps_vww", 226.5, 624.55, 11_645_502, 82.9),
    ("MCUNet_320kb-1mb_vww", 393.0, 923.76, 56_022_934, 85.6),
    ("MicroNets_vww2_50_50", 71.50, 225.54, 3_167_382, 71.9),
    ("MicroNets_vww3_128_128", 137.50, 463.73, 22_690_291, 77.8),
    ("MicroNets_vww4_128_128", 123.50, 417.03, 18_963_302, 77.9),
    ("ColabNAS_k_2_c_3", 18.5, 7.66, 250_256, 70.6),
    ("ColabNAS_k_4_c_5", 22.0, 18.49, 688_790, 75.7),
    ("ColabNAS_k_8_c_5", 32.5, 44.56, 2_135_476, 77.3),
]


def write_ppm(path: Path, gray: int, size: int = 6) -> None:
    header = f"P6\n{size} {size}\n255\n".encode("ascii")
    path.write_bytes(header + bytes([gray, gray, gray]) * (size * size))


def write_png(path: Path, gray: int, size: int = 6) -> None:
    from PIL import Image

    Image.new("RGB", (size, size), (gray, gray, gray)).save(path)


def build_fixture(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "hierarchy.csv").write_text(HIERARCHY_LINES, encoding="utf-8")
    (out_dir / "person_task.yaml").write_text(PERSON_TASK, encoding="utf-8")
    (out_dir / "bird_task.yaml").write_text(BIRD_TASK, encoding="utf-8")
    (out_dir / "generate.yaml").write_text(GENERATE_CONFIG, encoding="utf-8")
    (out_dir / "overrides_test.csv").write_text("image_id,label\ns01,1\n", encoding="utf-8")
    # example predictions over the validation split (v05 wrong on purpose)
    (out_dir / "preds_validation.csv").write_text(
        "image_id,predicted\nv01,1\nv02,1\nv03,1\nv05,1\nv06,0\nv07,0\n",
        encoding="utf-8")

    with (out_dir / "train_image_labels.csv").open("w", encoding="utf-8", newline="") as fp:
        write_image_labels_csv(
            [ImageLevelLabel(i, l, s, c) for i, l, s, c in IMAGE_LABELS], fp)
    for name, rows in (("train_boxes.csv", TRAIN_BOXES),
                       ("val_boxes.csv", VAL_BOXES),
                       ("test_boxes.csv", TEST_BOXES)):
        with (out_dir / name).open("w", encoding="utf-8", newline="") as fp:
            write_boxes_csv(
                [BoxAnnotation(i, l, x0, x1, y0, y1,
                               is_group_of=bool(g), is_depiction=bool(d))
                 for i, l, x0, x1, y0, y1, g, d in rows], fp)
    with (out_dir / "miap.csv").open("w", encoding="utf-8", newline="") as fp:
        write_miap_csv(
            [MiapAnnotation(i, x0, x1, y0, y1, g, a)
             for i, x0, x1, y0, y1, g, a in MIAP_ROWS], fp)
    with (out_dir / "model_cards.csv").open("w", encoding="utf-8", newline="") as fp:
        write_model_cards_csv(
            [ModelCard(name, macs, round(flash_kib * 1024), round(ram_kib * 1024), acc)
             for name, ram_kib, flash_kib, macs, acc in MODEL_CARDS], fp)

    images = out_dir / "images"
    images.mkdir(exist_ok=True)
    for image_id, gray in sorted(IMAGE_MEANS.items()):
        if image_id in PNG_IMAGES:
            write_png(images / f"{image_id}.png", gray)
        else:
            write_ppm(images / f"{image_id}.ppm", gray)
    print(f"fixture written to {out_dir}")


GOLDEN_FILES = [
    "train_large.csv", "train_quality.csv", "validation.csv", "test.csv",
    "train_quality_decisions.csv", "validation_decisions.csv",
    "test_decisions.csv", "split_report.csv", "split_report.txt",
]
GOLDEN_BENCH_FILES = [
    "validation_benchmarks.csv", "validation_benchmark_sizes.csv",
    "test_benchmarks.csv", "test_benchmark_sizes.csv",
]


def build_goldens(fixture_dir: Path, golden_dir: Path) -> None:
    import tempfile

    from binsift.cli import main

    golden_dir.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        out = Path(tmp) / "out"
        rc = main(["generate", "--root", str(fixture_dir), "--config", "generate.yaml",
                   "--output-dir", str(out)])
        if rc != 0:
            raise SystemExit(f"generate failed with exit code {rc}")
        for split in ("validation", "test"):
            rc = main(["benchmarks", "--root", str(fixture_dir),
                       "--labels", str(out / f"{split}.csv"),
                       "--decisions", str(out / f"{split}_decisions.csv"),
                       "--miap", "miap.csv", "--images-dir", "images",
                       "--split", split, "--output-dir", str(out)])
            if rc != 0:
                raise SystemExit(f"benchmarks {split} failed with exit code {rc}")
        for name in GOLDEN_FILES + GOLDEN_BENCH_FILES:
            shutil.copyfile(out / name, golden_dir / name)
    print(f"goldens refreshed in {golden_dir}")


def main_script() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default=str(REPO_ROOT / "tests" / "data" / "fixture"))
    parser.add_argument("--goldens", action="store_true",
                        help="also rerun the pipeline and refresh tests/data/golden")
    args = parser.parse_args()
    fixture_dir = Path(args.out)
    build_fixture(fixture_dir)
    if args.goldens:
        build_goldens(fixture_dir, REPO_ROOT / "tests" / "data" / "golden")


if __name__ == "__main__":
    main_script()
