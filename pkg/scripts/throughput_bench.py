#!/usr/bin/env python3
"""Measure end-to-end labeling throughput on a synthetic corpus.

Generates an on-the-fly corpus of annotated images, then times the
image-level labeling stage at several worker counts. Useful for picking a
worker count before launching a full run.

Usage:
    python scripts/throughput_bench.py [--images N] [--workers 1,4,8]
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from binsift.assembly import (LABELER_IMAGE_LEVEL, group_annotations,
                              label_images)
from binsift.fusion import TaskSpec, resolve_class_set
from binsift.synth import (DEFAULT_TARGET, synthetic_hierarchy,
                           synthetic_image_labels)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--images", type=int, default=100_000)
    parser.add_argument("--workers", default="1,2,8")
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    hierarchy = synthetic_hierarchy()
    spec = TaskSpec(target_label_ids=frozenset({DEFAULT_TARGET}))
    class_set = resolve_class_set(hierarchy, spec)
    labels = synthetic_image_labels(args.images, seed=args.seed)
    images = group_annotations(labels, [])
    print(f"{args.images} images, {len(labels)} label rows")

    for workers in (int(w) for w in args.workers.split(",")):
        start = time.perf_counter()
        labeled = label_images(images, LABELER_IMAGE_LEVEL, class_set, spec,
                               workers=workers)
        elapsed = time.perf_counter() - start
        n_pos = sum(1 for im in labeled if im.tri.value.name == "POSITIVE")
        print(f"workers={workers}: {elapsed:6.2f}s "
              f"({args.images / elapsed:,.0f} images/s, {n_pos} positives)")


if __name__ == "__main__":
    main()
