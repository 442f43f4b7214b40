"""Curate balanced binary-classification datasets and benchmark suites
from Open-Images-style annotation metadata."""

from .assembly import (DatasetRow, ImageAnnotations, Provenance, Split,
                       SplitReport, apply_overrides, balance, build_split,
                       check_split_hygiene, group_annotations, write_labels_csv)
from .benchmarks import (BenchmarkFlags, DepictionClass, DistanceBand, Gender,
                         AgeGroup, Lighting, LuminanceStat, demographic_flags,
                         depiction_flag, distance_flag, lighting_flag,
                         mean_grayscale, subset_sizes, synthesize)
from .boxfilter import BoxDecision, box_area_fraction, classify_by_boxes
from .errors import (ConfigError, CurationError, HierarchyError, RowError,
                     SchemaError, UnknownLabelError)
from .evaluation import (ConfusionMatrix, Metrics, ModelCard, PredictionRecord,
                         SubsetMetrics, confusion, metrics, pareto_frontier,
                         subset_metrics)
from .fusion import (ClassSet, DepictionPolicy, Reason, TaskSpec, TriLabel,
                     TriValue, image_level_label, load_task_spec,
                     resolve_class_set, task_spec_from_mapping)
from .ingest import (AgePresentation, BoxAnnotation, GenderPresentation,
                     ImageLevelLabel, LabelHierarchy, MiapAnnotation, Relation,
                     Source, parse_boxes, parse_hierarchy, parse_image_labels,
                     parse_miap)
from .quality import (AuditResult, IssueFlag, NoiseSpec, estimate_error_rate,
                      flag_label_issues, flip_labels, flip_probability,
                      inject_noise, wilson_interval)

__version__ = "0.1.0"

__all__ = [
    # assembly
    "DatasetRow", "ImageAnnotations", "Provenance", "Split", "SplitReport",
    "apply_overrides", "balance", "build_split", "check_split_hygiene",
    "group_annotations", "write_labels_csv",
    # benchmarks
    "BenchmarkFlags", "DepictionClass", "DistanceBand", "Gender", "AgeGroup",
    "Lighting", "LuminanceStat", "demographic_flags", "depiction_flag",
    "distance_flag", "lighting_flag", "mean_grayscale", "subset_sizes",
    "synthesize",
    # boxfilter
    "BoxDecision", "box_area_fraction", "classify_by_boxes",
    # errors
    "ConfigError", "CurationError", "HierarchyError", "RowError",
    "SchemaError", "UnknownLabelError",
    # evaluation
    "ConfusionMatrix", "Metrics", "ModelCard", "PredictionRecord",
    "SubsetMetrics", "confusion", "metrics", "pareto_frontier",
    "subset_metrics",
    # fusion
    "ClassSet", "DepictionPolicy", "Reason", "TaskSpec", "TriLabel",
    "TriValue", "image_level_label", "load_task_spec", "resolve_class_set",
    "task_spec_from_mapping",
    # ingest
    "AgePresentation", "BoxAnnotation", "GenderPresentation",
    "ImageLevelLabel", "LabelHierarchy", "MiapAnnotation", "Relation",
    "Source", "parse_boxes", "parse_hierarchy", "parse_image_labels",
    "parse_miap",
    # quality
    "AuditResult", "IssueFlag", "NoiseSpec", "estimate_error_rate",
    "flag_label_issues", "flip_labels", "flip_probability", "inject_noise",
    "wilson_interval",
]
