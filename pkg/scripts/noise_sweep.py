#!/usr/bin/env python3
"""Sweep injected label-noise levels and audit how well sampling recovers them.

For each target error rate d we flip a fresh copy of a clean label column so
the *total* disagreement with ground truth lands on d (the injector composes
with an assumed base error rate), then audit a random sample pair-by-pair and
report the Wilson interval around the measured rate.

Usage:
    python scripts/noise_sweep.py [--labels N] [--audits N] [--seed S]
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from binsift.quality import NoiseSpec, estimate_error_rate, inject_noise

SWEEP = [0.05, 0.068, 0.10, 0.15, 0.22, 0.30]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--labels", type=int, default=200_000)
    parser.add_argument("--audits", type=int, default=500)
    parser.add_argument("--base", type=float, default=0.0,
                        help="assumed pre-existing error rate of the clean column")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    truth = rng.integers(0, 2, size=args.labels)
    print(f"{'target':>8} {'flip p':>8} {'measured':>9} {'95% interval':>18}")
    for d in SWEEP:
        spec = NoiseSpec(base_error_rate=args.base, target_error_rate=d,
                         seed=args.seed + int(d * 1000))
        noisy = inject_noise(truth.tolist(), spec)
        idx = rng.choice(args.labels, size=args.audits, replace=False)
        audit = estimate_error_rate(
            [(int(noisy[i]), int(truth[i])) for i in idx])
        print(f"{d:8.3f} {spec.flip_p:8.4f} {audit.point_estimate:9.4f} "
              f"[{audit.interval_low:7.4f}, {audit.interval_high:7.4f}]")


if __name__ == "__main__":
    main()
