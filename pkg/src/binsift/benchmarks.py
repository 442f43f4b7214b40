"""Fine-grained benchmark flags: lighting, distance, depictions, demographics.

Lighting is total (every sample gets a band, computed from mean grayscale).
Distance applies only to positives with box provenance, depiction class only
to negatives, and demographics only to positives that carry demographic
annotation rows. A sample missing an axis simply belongs to none of that
axis's subsets.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .assembly import DatasetRow, Provenance
from .boxfilter import BoxDecision
from .errors import CurationError
from .ingest import AgePresentation, GenderPresentation, MiapAnnotation

# ITU-R BT.601 luma weights; callers may substitute another RGB weighting.
BT601_WEIGHTS = (0.299, 0.587, 0.114)

# Band edges. Lighting bands partition [0, 255] with the boundaries landing
# in the middle band; distance bands partition (0, 1] with boundaries in the
# medium band.
LIGHTING_DARK_BELOW = 85.0
LIGHTING_BRIGHT_ABOVE = 170.0
DISTANCE_NEAR_ABOVE = 0.60
DISTANCE_FAR_BELOW = 0.10


class Lighting(Enum):
    DARK = "dark"
    NORMAL = "normal"
    BRIGHT = "bright"


class DistanceBand(Enum):
    NEAR = "near"
    MEDIUM = "medium"
    FAR = "far"


class DepictionClass(Enum):
    TARGET = "target_depiction"
    OTHER = "other_depiction"
    NONE = "no_depiction"


class Gender(Enum):
    FEMALE = "female"
    MALE = "male"
    UNKNOWN = "unknown"


class AgeGroup(Enum):
    YOUNG = "young"
    MIDDLE = "middle"
    OLDER = "older"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class LuminanceStat:
    """Mean grayscale value of an image on the 0-255 scale."""

    mean_gray: float

    def __post_init__(self):
        if not 0.0 <= self.mean_gray <= 255.0:
            raise ValueError(f"mean_gray {self.mean_gray} outside [0, 255]")


@dataclass(frozen=True)
class BenchmarkFlags:
    """Subset membership for one sample; None means not on that axis."""

    lighting: Lighting
    distance: DistanceBand | None = None
    depiction_class: DepictionClass | None = None
    gender: Gender | None = None
    age: AgeGroup | None = None


def mean_grayscale(pixels: np.ndarray,
                   weights: tuple[float, float, float] = BT601_WEIGHTS) -> LuminanceStat:
    """Mean weighted-gray value of an HxWx3 8-bit RGB array."""
    arr = np.asarray(pixels)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise ValueError(f"expected an HxWx3 array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("empty image")
    gray = arr.astype(np.float64) @ np.asarray(weights, dtype=np.float64)
    return LuminanceStat(float(gray.mean()))


def lighting_flag(stat: LuminanceStat | float) -> Lighting:
    """Band a mean grayscale value: dark below 85, bright above 170."""
    mean = stat.mean_gray if isinstance(stat, LuminanceStat) else float(stat)
    if mean < LIGHTING_DARK_BELOW:
        return Lighting.DARK
    if mean > LIGHTING_BRIGHT_ABOVE:
        return Lighting.BRIGHT
    return Lighting.NORMAL


def distance_flag(max_target_area: float) -> DistanceBand:
    """Band a subject's area fraction: near above 0.60, far below 0.10."""
    if not 0.0 < max_target_area <= 1.0:
        raise ValueError(f"area fraction {max_target_area} outside (0, 1]")
    if max_target_area > DISTANCE_NEAR_ABOVE:
        return DistanceBand.NEAR
    if max_target_area < DISTANCE_FAR_BELOW:
        return DistanceBand.FAR
    return DistanceBand.MEDIUM


def depiction_flag(decision: BoxDecision) -> DepictionClass:
    """Depiction subset for a negative sample, from its box decision."""
    if decision.has_target_depiction:
        return DepictionClass.TARGET
    if decision.has_other_depiction:
        return DepictionClass.OTHER
    return DepictionClass.NONE


def _depiction_from_bits(depiction_target: bool, depiction_other: bool) -> DepictionClass:
    if depiction_target:
        return DepictionClass.TARGET
    if depiction_other:
        return DepictionClass.OTHER
    return DepictionClass.NONE


_GENDER_CONSENSUS = {
    GenderPresentation.FEMININE: Gender.FEMALE,
    GenderPresentation.MASCULINE: Gender.MALE,
}
_AGE_CONSENSUS = {
    AgePresentation.YOUNG: AgeGroup.YOUNG,
    AgePresentation.MIDDLE: AgeGroup.MIDDLE,
    AgePresentation.OLDER: AgeGroup.OLDER,
}


def demographic_flags(miap_rows: Sequence[MiapAnnotation]) -> tuple[Gender | None, AgeGroup | None]:
    """Per-image consensus over demographic annotation boxes.

    All boxes agreeing on a known presentation give that value; any
    disagreement or any unknown box collapses the axis to unknown. No rows at
    all means the image is not in the demographic benchmark (None, None).
    """
    if not miap_rows:
        return None, None
    genders = {row.gender for row in miap_rows}
    ages = {row.age for row in miap_rows}
    gender = (_GENDER_CONSENSUS[next(iter(genders))]
              if len(genders) == 1 and GenderPresentation.UNKNOWN not in genders
              else Gender.UNKNOWN)
    age = (_AGE_CONSENSUS[next(iter(ages))]
           if len(ages) == 1 and AgePresentation.UNKNOWN not in ages
           else AgeGroup.UNKNOWN)
    return gender, age


def synthesize(rows: Sequence[DatasetRow],
               decisions: Mapping[str, BoxDecision],
               miap_by_image: Mapping[str, Sequence[MiapAnnotation]],
               luminance: Mapping[str, float | LuminanceStat],
               ) -> list[tuple[DatasetRow, BenchmarkFlags]]:
    """Attach benchmark flags to every row of a split.

    luminance must cover every row (lighting is total); decisions and
    demographic rows may be partial.
    """
    flagged: list[tuple[DatasetRow, BenchmarkFlags]] = []
    for row in rows:
        if row.image_id not in luminance:
            raise CurationError(f"missing luminance for {row.image_id}")
        lighting = lighting_flag(luminance[row.image_id])

        distance = None
        if row.label == 1 and row.provenance is Provenance.BOUNDING_BOX:
            decision = decisions.get(row.image_id)
            if decision is not None and decision.max_target_area > 0.0:
                distance = distance_flag(decision.max_target_area)

        depiction_class = None
        if row.label == 0:
            decision = decisions.get(row.image_id)
            if decision is not None:
                depiction_class = depiction_flag(decision)
            else:
                depiction_class = _depiction_from_bits(row.depiction_target,
                                                       row.depiction_other)

        gender = age = None
        if row.label == 1:
            gender, age = demographic_flags(tuple(miap_by_image.get(row.image_id, ())))

        flagged.append((row, BenchmarkFlags(
            lighting=lighting, distance=distance,
            depiction_class=depiction_class, gender=gender, age=age)))
    return flagged


# CSV flag columns, in wire order. The depiction benchmark columns carry a
# "depictions_" prefix to stay distinct from the per-row depiction_person /
# depiction_nonperson metadata columns.
FLAG_COLUMNS = (
    "distance_near", "distance_medium", "distance_far",
    "lighting_dark", "lighting_normal", "lighting_bright",
    "depictions_person", "depictions_nonperson", "depictions_none",
    "gender_female", "gender_male", "gender_unknown",
    "age_young", "age_middle", "age_older", "age_unknown",
)

_DISTANCE_COLUMN = {DistanceBand.NEAR: "distance_near",
                    DistanceBand.MEDIUM: "distance_medium",
                    DistanceBand.FAR: "distance_far"}
_LIGHTING_COLUMN = {Lighting.DARK: "lighting_dark",
                    Lighting.NORMAL: "lighting_normal",
                    Lighting.BRIGHT: "lighting_bright"}
_DEPICTION_COLUMN = {DepictionClass.TARGET: "depictions_person",
                     DepictionClass.OTHER: "depictions_nonperson",
                     DepictionClass.NONE: "depictions_none"}
_GENDER_COLUMN = {Gender.FEMALE: "gender_female",
                  Gender.MALE: "gender_male",
                  Gender.UNKNOWN: "gender_unknown"}
_AGE_COLUMN = {AgeGroup.YOUNG: "age_young",
               AgeGroup.MIDDLE: "age_middle",
               AgeGroup.OLDER: "age_older",
               AgeGroup.UNKNOWN: "age_unknown"}


def flags_to_bits(flags: BenchmarkFlags) -> dict[str, int]:
    """Expand flags into the 16 wire columns as 0/1 bits."""
    bits = {column: 0 for column in FLAG_COLUMNS}
    bits[_LIGHTING_COLUMN[flags.lighting]] = 1
    if flags.distance is not None:
        bits[_DISTANCE_COLUMN[flags.distance]] = 1
    if flags.depiction_class is not None:
        bits[_DEPICTION_COLUMN[flags.depiction_class]] = 1
    if flags.gender is not None:
        bits[_GENDER_COLUMN[flags.gender]] = 1
    if flags.age is not None:
        bits[_AGE_COLUMN[flags.age]] = 1
    return bits


def flags_from_bits(bits: Mapping[str, str | int]) -> BenchmarkFlags:
    """Rebuild flags from wire columns (inverse of flags_to_bits)."""

    def active(columns: Mapping) -> object | None:
        hits = [value for value, column in columns.items() if int(bits[column]) == 1]
        if len(hits) > 1:
            raise CurationError(f"multiple bits set within one flag family: {hits}")
        return hits[0] if hits else None

    lighting = active(_LIGHTING_COLUMN)
    if lighting is None:
        raise CurationError("lighting flag missing; lighting is total")
    return BenchmarkFlags(
        lighting=lighting,
        distance=active(_DISTANCE_COLUMN),
        depiction_class=active(_DEPICTION_COLUMN),
        gender=active(_GENDER_COLUMN),
        age=active(_AGE_COLUMN),
    )


# Display order for size summaries (demographics first, then capture
# conditions), independent of the CSV column order.
SUBSET_ORDER = (
    "gender_female", "gender_male", "gender_unknown",
    "age_young", "age_middle", "age_older", "age_unknown",
    "distance_near", "distance_medium", "distance_far",
    "lighting_dark", "lighting_normal", "lighting_bright",
    "depictions_person", "depictions_nonperson", "depictions_none",
)


def subset_sizes(flagged: Iterable[tuple[DatasetRow, BenchmarkFlags]]) -> dict[str, int]:
    """Sample count per benchmark subset, in display order."""
    sizes = {name: 0 for name in SUBSET_ORDER}
    for _, flags in flagged:
        bits = flags_to_bits(flags)
        for name in SUBSET_ORDER:
            sizes[name] += bits[name]
    return sizes


def format_subset_sizes(sizes: Mapping[str, int]) -> str:
    width = max(len(name) for name in SUBSET_ORDER)
    lines = [f"{name:<{width}}  {sizes.get(name, 0)}" for name in SUBSET_ORDER]
    return "\n".join(lines)


_SUPPORTED_SUFFIXES = {".ppm", ".png"}


def load_image_rgb(path: str | Path) -> np.ndarray:
    """Decode a PPM or PNG file to an HxWx3 uint8 array.

    The decoder surface is deliberately small; convert other formats before
    ingest.
    """
    path = Path(path)
    if path.suffix.lower() not in _SUPPORTED_SUFFIXES:
        raise CurationError(
            f"unsupported image format {path.suffix!r} for {path.name}; "
            f"expected one of {sorted(_SUPPORTED_SUFFIXES)}")
    from PIL import Image

    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)
