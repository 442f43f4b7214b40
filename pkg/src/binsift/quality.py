"""Label-quality instruments: controlled noise, audit estimates, issue flags.

The noise model targets an overall error rate d on labels that already carry
a base error rate e. Flipping each label independently with probability p
satisfies 1 - d = p*e + (1-p)*(1-e), which solves to p = (e-d)/(2e-1). The
identity degenerates at e = 0.5 (flipping cannot move the error rate), and
some (e, d) pairs are unreachable with p in [0, 1].
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

# Two-sided 95% normal quantile, the only distribution constant needed.
Z_95 = 1.959963984540054


def flip_probability(base_error_rate: float, target_error_rate: float) -> float:
    """Per-label flip probability moving error rate e to d."""
    e, d = float(base_error_rate), float(target_error_rate)
    if not 0.0 <= e <= 1.0 or not 0.0 <= d <= 1.0:
        raise ValueError(f"error rates must sit in [0, 1], got e={e}, d={d}")
    if e == 0.5:
        raise ValueError("base error rate 0.5 is degenerate: flipping cannot move it")
    p = (e - d) / (2.0 * e - 1.0)
    if not 0.0 <= p <= 1.0:
        raise ValueError(
            f"target error rate {d} unreachable from base {e} (p={p:.4f} outside [0, 1])")
    return p


@dataclass(frozen=True)
class NoiseSpec:
    """Controlled-noise parameters; the flip probability must be realizable."""

    base_error_rate: float
    target_error_rate: float
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.base_error_rate < 1.0:
            raise ValueError(f"base_error_rate {self.base_error_rate} outside [0, 1)")
        if not 0.0 <= self.target_error_rate < 1.0:
            raise ValueError(f"target_error_rate {self.target_error_rate} outside [0, 1)")
        flip_probability(self.base_error_rate, self.target_error_rate)

    @property
    def flip_p(self) -> float:
        return flip_probability(self.base_error_rate, self.target_error_rate)


def flip_labels(labels: Sequence[int], p: float, seed: int) -> list[int]:
    """Flip each binary label independently with probability p, seeded.

    The noisy copy is materialized once; reusing the same seed reproduces it
    exactly, so training runs see a fixed corrupted dataset rather than fresh
    noise per pass.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"flip probability {p} outside [0, 1]")
    arr = np.asarray(labels, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("labels must be one-dimensional")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("labels must be binary (0 or 1)")
    draws = np.random.default_rng(seed).random(arr.shape[0])
    flipped = np.where(draws < p, 1 - arr, arr)
    return [int(v) for v in flipped]


def inject_noise(labels: Sequence[int], spec: NoiseSpec) -> list[int]:
    """Apply a NoiseSpec to a label sequence (same length, same order)."""
    return flip_labels(labels, spec.flip_p, spec.seed)


def wilson_interval(errors: int, samples: int, z: float = Z_95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Chosen over the normal approximation because audits are small and error
    counts near zero are common; the Wilson bounds stay inside [0, 1] and the
    lower bound is exactly 0 when no errors are found.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    if not 0 <= errors <= samples:
        raise ValueError(f"errors {errors} outside [0, {samples}]")
    n = float(samples)
    p_hat = errors / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p_hat + z2 / (2.0 * n)) / denom
    half = z * ((p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n)) ** 0.5) / denom
    # pin the degenerate endpoints: rounding must not leave a bound at 1e-18
    low = 0.0 if errors == 0 else max(0.0, center - half)
    high = 1.0 if errors == samples else min(1.0, center + half)
    return low, high


@dataclass(frozen=True)
class AuditResult:
    sample_size: int
    errors_found: int
    point_estimate: float
    interval_low: float
    interval_high: float

    def to_text(self) -> str:
        return (f"samples:       {self.sample_size}\n"
                f"errors found:  {self.errors_found}\n"
                f"error rate:    {self.point_estimate * 100:.4g}%\n"
                f"wilson 95% CI: [{self.interval_low * 100:.4g}%, "
                f"{self.interval_high * 100:.4g}%]")


def estimate_error_rate(audit: Sequence[tuple[int, int]]) -> AuditResult:
    """Estimate a label error rate from (given, truth) audit pairs."""
    if not audit:
        raise ValueError("audit is empty")
    samples = len(audit)
    errors = sum(1 for given, truth in audit if given != truth)
    low, high = wilson_interval(errors, samples)
    return AuditResult(sample_size=samples, errors_found=errors,
                       point_estimate=errors / samples,
                       interval_low=low, interval_high=high)


@dataclass(frozen=True)
class IssueFlag:
    """One sample whose given label looks wrong under the model's beliefs."""

    image_id: str
    given_label: int
    suggested_label: int
    margin: float


def flag_label_issues(probs: Sequence[Sequence[float]], labels: Sequence[int],
                      image_ids: Sequence[str] | None = None) -> list[IssueFlag]:
    """Threshold-based label-issue detection over predicted probabilities.

    Per-class threshold t_c is the mean predicted probability of class c over
    the samples labeled c (the model's typical confidence when that label is
    given). A sample is flagged when its probability for the opposite class
    reaches that class's threshold AND the argmax disagrees with the given
    label; an exact probability tie resolves the argmax toward the given
    label, so uninformative models flag nothing. The margin is how far past
    the threshold the opposite-class probability sits.
    """
    prob_arr = np.asarray(probs, dtype=np.float64)
    label_arr = np.asarray(labels, dtype=np.int64)
    if prob_arr.ndim != 2 or prob_arr.shape[1] != 2:
        raise ValueError(f"probs must be Nx2, got shape {prob_arr.shape}")
    if label_arr.shape[0] != prob_arr.shape[0]:
        raise ValueError("probs and labels disagree on sample count")
    if not np.isin(label_arr, (0, 1)).all():
        raise ValueError("labels must be binary (0 or 1)")
    if not np.allclose(prob_arr.sum(axis=1), 1.0, atol=1e-6):
        raise ValueError("probability rows must sum to 1 within 1e-6")
    if image_ids is None:
        image_ids = [str(i) for i in range(prob_arr.shape[0])]
    elif len(image_ids) != prob_arr.shape[0]:
        raise ValueError("image_ids and probs disagree on sample count")

    thresholds = np.empty(2)
    for c in (0, 1):
        mask = label_arr == c
        if not mask.any():
            raise ValueError(f"no samples labeled {c}: class threshold undefined")
        thresholds[c] = prob_arr[mask, c].mean()

    flags: list[IssueFlag] = []
    for i in range(prob_arr.shape[0]):
        given = int(label_arr[i])
        other = 1 - given
        # Tie goes to the given label.
        argmax = given if prob_arr[i, given] >= prob_arr[i, other] else other
        if argmax == given:
            continue
        if prob_arr[i, other] >= thresholds[other]:
            flags.append(IssueFlag(
                image_id=str(image_ids[i]),
                given_label=given,
                suggested_label=other,
                margin=float(prob_arr[i, other] - thresholds[other]),
            ))
    return flags
