"""Command-line interface wiring the pipeline stages together.

Every subcommand takes ``--root`` (base for relative paths), optionally a
YAML ``--config`` whose keys mirror the flag names, and ``--dry-run`` to
print the resolved configuration and planned outputs without writing.
Explicit flags override config values. Exit codes: 0 success, 1 runtime
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from collections.abc import Mapping
from dataclasses import replace
from pathlib import Path

import yaml

from . import assembly, benchmarks, evaluation, quality
from .assembly import (LABELER_BOUNDING_BOX, LABELER_IMAGE_LEVEL, DatasetRow,
                       Provenance, Split, SplitResult)
from .boxfilter import BoxDecision
from .errors import (ConfigError, CurationError, RowError, SchemaError,
                     UnknownLabelError)
from .fusion import (Reason, TaskSpec, TriLabel, TriValue, load_task_spec,
                     resolve_class_set)
from .ingest import parse_boxes, parse_hierarchy, parse_image_labels, parse_miap

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2


# --- config plumbing ---------------------------------------------------------

def _load_config(path: Path | None) -> dict:
    if path is None:
        return {}
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    data = yaml.safe_load(path.read_text(encoding="utf-8"))
    if data is None:
        return {}
    if not isinstance(data, Mapping):
        raise ConfigError(f"config file {path} must contain a mapping")
    return dict(data)


class Settings:
    """Flag-over-config resolution with path anchoring at --root."""

    def __init__(self, args: argparse.Namespace):
        self.root = Path(args.root).resolve()
        config_path = None
        if getattr(args, "config", None):
            config_path = self._anchor(Path(args.config))
        self.config = _load_config(config_path)
        self.args = args
        self.resolved: dict = {"root": str(self.root)}
        if config_path is not None:
            self.resolved["config"] = str(config_path)

    def _anchor(self, path: Path) -> Path:
        return path if path.is_absolute() else self.root / path

    def value(self, key: str, default=None, required: bool = False, cast=None):
        raw = getattr(self.args, key, None)
        if raw is None:
            raw = self.config.get(key, default)
        if raw is None:
            if required:
                raise ConfigError(f"missing required setting: {key}")
            self.resolved[key] = None
            return None
        if cast is not None:
            try:
                raw = cast(raw)
            except (TypeError, ValueError):
                raise ConfigError(f"bad value for {key}: {raw!r}") from None
        self.resolved[key] = raw
        return raw

    def path(self, key: str, required: bool = False, must_exist: bool = True) -> Path | None:
        raw = self.value(key, required=required)
        if raw is None:
            return None
        path = self._anchor(Path(str(raw)))
        if must_exist and not path.exists():
            raise ConfigError(f"{key} file not found: {path}")
        self.resolved[key] = str(path)
        return path

    def out_dir(self, key: str = "output_dir", required: bool = True) -> Path | None:
        raw = self.value(key, required=required)
        if raw is None:
            return None
        path = self._anchor(Path(str(raw)))
        self.resolved[key] = str(path)
        return path


def _echo_config(settings: Settings, out_dir: Path, command: str,
                 extra: Mapping | None = None) -> None:
    payload = dict(settings.resolved)
    payload["command"] = command
    if extra:
        payload.update(extra)
    out_path = out_dir / f"resolved_config.{command}.yaml"
    out_path.write_text(yaml.safe_dump(payload, sort_keys=True), encoding="utf-8")


def _dry_run_report(settings: Settings, command: str, planned: list[Path],
                    extra: Mapping | None = None) -> int:
    payload = dict(settings.resolved)
    payload["command"] = command
    if extra:
        payload.update(extra)
    print(yaml.safe_dump(payload, sort_keys=True), end="")
    print("planned outputs:")
    for path in planned:
        print(f"  {path}")
    print("dry run: nothing written")
    return EXIT_OK


def _warn_rejects(name: str, rejects: list[RowError]) -> None:
    if rejects:
        log.warning("%s: rejected %d malformed row(s); first: %s",
                    name, len(rejects), rejects[0])


def _image_id_from_file_name(file_name: str) -> str:
    stem, _, _ = file_name.rpartition(".")
    return stem or file_name


# --- generate ----------------------------------------------------------------

def _task_spec_payload(spec: TaskSpec) -> dict:
    return {
        "target_label_ids": sorted(spec.target_label_ids),
        "synonym_label_ids": sorted(spec.synonym_label_ids),
        "core_part_label_ids": sorted(spec.core_part_label_ids),
        "treat_parts_as_target": spec.treat_parts_as_target,
        "depiction_policy": spec.depiction_policy.value,
        "min_confidence": spec.min_confidence,
        "min_area_fraction": spec.min_area_fraction,
        "require_verified_absence": spec.require_verified_absence,
    }


_DECISION_COLUMNS = ("image_id", "value", "reason", "provenance",
                     "max_target_area", "depiction_person", "depiction_nonperson",
                     "group_positive")


def _write_decisions_csv(path: Path, result: SplitResult,
                         provenance_by_id: Mapping[str, Provenance]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(_DECISION_COLUMNS)
        for image_id in sorted(result.decisions):
            decision = result.decisions[image_id]
            provenance = provenance_by_id.get(image_id, Provenance.BOUNDING_BOX)
            writer.writerow((
                image_id, decision.label.value.value, decision.label.reason.value,
                provenance.value, repr(decision.max_target_area),
                int(decision.has_target_depiction), int(decision.has_other_depiction),
                int(decision.has_group_positive)))


def _load_overrides(path: Path) -> list[tuple[str, int]]:
    with path.open("r", encoding="utf-8", newline="") as fp:
        reader = csv.DictReader(fp)
        fields = reader.fieldnames or ()
        if "image_id" not in fields or "label" not in fields:
            raise ConfigError(f"override CSV {path} needs image_id and label columns")
        overrides = []
        for row in reader:
            try:
                overrides.append((row["image_id"].strip(), int(row["label"])))
            except (TypeError, ValueError):
                raise CurationError(
                    f"{path}: line {reader.line_num}: bad override label") from None
    return overrides


def cmd_generate(args: argparse.Namespace) -> int:
    settings = Settings(args)
    task_spec_path = settings.path("task_spec", required=True)
    hierarchy_path = settings.path("hierarchy", required=True)
    train_labels_path = settings.path("train_image_labels")
    train_boxes_path = settings.path("train_boxes")
    val_boxes_path = settings.path("val_boxes")
    test_boxes_path = settings.path("test_boxes")
    overrides_val_path = settings.path("overrides_validation")
    overrides_test_path = settings.path("overrides_test")
    seed = settings.value("seed", default=0, cast=int)
    workers = settings.value("workers", default=os.cpu_count() or 1, cast=int)
    out_dir = settings.out_dir()
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    if not any((train_labels_path, train_boxes_path, val_boxes_path, test_boxes_path)):
        raise ConfigError("no split inputs configured: nothing to generate")

    spec = load_task_spec(task_spec_path)
    planned: list[Path] = []
    split_inputs: list[tuple[Split, str, Path]] = []
    if train_labels_path:
        split_inputs.append((Split.TRAIN_LARGE, LABELER_IMAGE_LEVEL, train_labels_path))
    if train_boxes_path:
        split_inputs.append((Split.TRAIN_QUALITY, LABELER_BOUNDING_BOX, train_boxes_path))
    if val_boxes_path:
        split_inputs.append((Split.VALIDATION, LABELER_BOUNDING_BOX, val_boxes_path))
    if test_boxes_path:
        split_inputs.append((Split.TEST, LABELER_BOUNDING_BOX, test_boxes_path))
    for split, labeler, _ in split_inputs:
        planned.append(out_dir / f"{split.value}.csv")
        if labeler == LABELER_BOUNDING_BOX:
            planned.append(out_dir / f"{split.value}_decisions.csv")
    planned += [out_dir / "split_report.txt", out_dir / "split_report.csv",
                out_dir / "resolved_config.generate.yaml"]

    if args.dry_run:
        return _dry_run_report(settings, "generate", planned,
                               {"task_spec_resolved": _task_spec_payload(spec)})

    with hierarchy_path.open("r", encoding="utf-8") as fp:
        hierarchy = parse_hierarchy(fp)
    class_set = resolve_class_set(hierarchy, spec)
    log.info("class set: %d positive ids, %d conditional part ids",
             len(class_set.positive_ids), len(class_set.conditional_part_ids))

    out_dir.mkdir(parents=True, exist_ok=True)
    results: dict[Split, SplitResult] = {}
    rows_by_split: dict[Split, list[DatasetRow]] = {}
    stats_lines: list[str] = []
    for split, labeler, in_path in split_inputs:
        rejects: list[RowError] = []
        with in_path.open("r", encoding="utf-8", newline="") as fp:
            if labeler == LABELER_IMAGE_LEVEL:
                records = assembly.group_annotations(
                    labels=parse_image_labels(fp, errors=rejects))
            else:
                records = assembly.group_annotations(
                    boxes=parse_boxes(fp, errors=rejects))
        _warn_rejects(in_path.name, rejects)
        result = assembly.build_split(records, labeler, class_set, spec,
                                      split=split, seed=seed, workers=workers)
        rows = result.rows
        provenance_by_id = {row.image_id: row.provenance for row in rows}
        overrides_path = {Split.VALIDATION: overrides_val_path,
                          Split.TEST: overrides_test_path}.get(split)
        if overrides_path:
            overrides = _load_overrides(overrides_path)
            # An override may point at an image the balancer dropped (the
            # audit predates this run's seed). Skip those, loudly.
            present = {row.image_id for row in rows}
            stale = sorted({i for i, _ in overrides} - present)
            if stale:
                log.warning("%s: %d override(s) reference images not in the "
                            "split and were skipped: %s",
                            split.value, len(stale), ", ".join(stale[:5]))
                overrides = [(i, v) for i, v in overrides if i in present]
            rows, stats = assembly.apply_overrides(rows, overrides)
            provenance_by_id = {row.image_id: row.provenance for row in rows}
            log.info("%s: applied %d override(s), %d label(s) flipped",
                     split.value, stats.applied, stats.flipped)
            stats_lines.append(f"{split.value}: overrides applied={stats.applied} "
                               f"flipped={stats.flipped}")
        results[split] = result
        rows_by_split[split] = rows
        with (out_dir / f"{split.value}.csv").open("w", encoding="utf-8", newline="") as fp:
            assembly.write_labels_csv(rows, fp)
        if labeler == LABELER_BOUNDING_BOX:
            _write_decisions_csv(out_dir / f"{split.value}_decisions.csv",
                                 result, provenance_by_id)

    assembly.check_split_hygiene(rows_by_split)

    report_text = "\n\n".join(results[s].report.to_text() for s, _, _ in split_inputs)
    if stats_lines:
        report_text += "\n\n" + "\n".join(stats_lines)
    (out_dir / "split_report.txt").write_text(report_text + "\n", encoding="utf-8")
    with (out_dir / "split_report.csv").open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(("split", "field", "value"))
        for split, _, _ in split_inputs:
            report = results[split].report
            writer.writerow((split.value, "input_images", report.input_images))
            writer.writerow((split.value, "positives", report.positives))
            writer.writerow((split.value, "negatives", report.negatives))
            writer.writerow((split.value, "excluded", report.excluded))
            writer.writerow((split.value, "dropped", report.dropped))
            for reason, count in sorted(report.exclusion_reasons.items(),
                                        key=lambda item: item[0].value):
                writer.writerow((split.value, f"excluded_{reason.value}", count))
            writer.writerow((split.value, "verified_conflicts", report.verified_conflicts))
    _echo_config(settings, out_dir, "generate",
                 {"task_spec_resolved": _task_spec_payload(spec)})
    for split, _, _ in split_inputs:
        report = results[split].report
        print(f"{split.value}: {report.positives} positive / {report.negatives} negative "
              f"({report.excluded} excluded, {report.dropped} dropped)")
    return EXIT_OK


# --- benchmarks --------------------------------------------------------------

def _load_label_rows(path: Path, split: Split,
                     provenance_by_id: Mapping[str, Provenance]) -> list[DatasetRow]:
    rows: list[DatasetRow] = []
    with path.open("r", encoding="utf-8", newline="") as fp:
        reader = csv.DictReader(fp)
        fields = reader.fieldnames or ()
        missing = [c for c in assembly.LABEL_COLUMNS if c not in fields]
        if missing:
            raise SchemaError(f"{path}: missing columns: {', '.join(missing)}")
        for row in reader:
            image_id = _image_id_from_file_name(row["file_name"].strip())
            rows.append(DatasetRow(
                image_id=image_id,
                file_name=row["file_name"].strip(),
                label=int(row["person"]),
                split=split,
                depiction_target=row["depiction_person"] == "1",
                depiction_other=row["depiction_nonperson"] == "1",
                provenance=provenance_by_id.get(image_id, Provenance.BOUNDING_BOX),
            ))
    return rows


def _load_decisions_csv(path: Path) -> tuple[dict[str, BoxDecision], dict[str, Provenance]]:
    decisions: dict[str, BoxDecision] = {}
    provenance: dict[str, Provenance] = {}
    with path.open("r", encoding="utf-8", newline="") as fp:
        reader = csv.DictReader(fp)
        fields = reader.fieldnames or ()
        missing = [c for c in _DECISION_COLUMNS if c not in fields]
        if missing:
            raise SchemaError(f"{path}: missing columns: {', '.join(missing)}")
        for row in reader:
            image_id = row["image_id"].strip()
            label = TriLabel(TriValue(row["value"]), Reason(row["reason"]))
            decisions[image_id] = BoxDecision(
                label=label,
                max_target_area=float(row["max_target_area"]),
                has_target_depiction=row["depiction_person"] == "1",
                has_other_depiction=row["depiction_nonperson"] == "1",
                has_group_positive=row["group_positive"] == "1",
            )
            provenance[image_id] = Provenance(row["provenance"])
    return decisions, provenance


def _luminance_for(rows: list[DatasetRow], images_dir: Path | None,
                   luminance_csv: Path | None) -> dict[str, float]:
    luminance: dict[str, float] = {}
    if luminance_csv is not None:
        with luminance_csv.open("r", encoding="utf-8", newline="") as fp:
            reader = csv.DictReader(fp)
            fields = reader.fieldnames or ()
            if "image_id" not in fields or "mean_gray" not in fields:
                raise SchemaError(f"{luminance_csv}: needs image_id and mean_gray columns")
            for row in reader:
                luminance[row["image_id"].strip()] = float(row["mean_gray"])
        return luminance
    assert images_dir is not None
    for row in rows:
        for suffix in (".ppm", ".png"):
            candidate = images_dir / f"{row.image_id}{suffix}"
            if candidate.is_file():
                stat = benchmarks.mean_grayscale(benchmarks.load_image_rgb(candidate))
                luminance[row.image_id] = stat.mean_gray
                break
    return luminance


def cmd_benchmarks(args: argparse.Namespace) -> int:
    settings = Settings(args)
    labels_path = settings.path("labels", required=True)
    decisions_path = settings.path("decisions", required=True)
    miap_path = settings.path("miap")
    images_dir = settings.path("images_dir", must_exist=True)
    luminance_csv = settings.path("luminance_csv")
    split_name = settings.value("split", default="validation")
    out_dir = settings.out_dir()
    try:
        split = Split(split_name)
    except ValueError:
        raise ConfigError(f"unknown split {split_name!r}") from None
    if images_dir is None and luminance_csv is None:
        raise ConfigError("benchmarks needs --images-dir or --luminance-csv")

    planned = [out_dir / f"{split.value}_benchmarks.csv",
               out_dir / f"{split.value}_benchmark_sizes.csv",
               out_dir / f"{split.value}_benchmark_sizes.txt",
               out_dir / "resolved_config.benchmarks.yaml"]
    if args.dry_run:
        return _dry_run_report(settings, "benchmarks", planned)

    decisions, provenance_by_id = _load_decisions_csv(decisions_path)
    rows = _load_label_rows(labels_path, split, provenance_by_id)

    miap_by_image: dict[str, list] = {}
    if miap_path is not None:
        rejects: list[RowError] = []
        with miap_path.open("r", encoding="utf-8", newline="") as fp:
            for record in parse_miap(fp, errors=rejects):
                miap_by_image.setdefault(record.image_id, []).append(record)
        _warn_rejects(miap_path.name, rejects)

    luminance = _luminance_for(rows, images_dir, luminance_csv)
    flagged = benchmarks.synthesize(rows, decisions, miap_by_image, luminance)
    flags_by_id = {row.image_id: flags for row, flags in flagged}

    out_dir.mkdir(parents=True, exist_ok=True)
    with planned[0].open("w", encoding="utf-8", newline="") as fp:
        assembly.write_labels_csv(rows, fp, flags=flags_by_id)
    sizes = benchmarks.subset_sizes(flagged)
    with planned[1].open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(("subset", "size"))
        for name in benchmarks.SUBSET_ORDER:
            writer.writerow((name, sizes[name]))
    planned[2].write_text(benchmarks.format_subset_sizes(sizes) + "\n", encoding="utf-8")
    _echo_config(settings, out_dir, "benchmarks")
    print(benchmarks.format_subset_sizes(sizes))
    return EXIT_OK


# --- inject-noise ------------------------------------------------------------

def cmd_inject_noise(args: argparse.Namespace) -> int:
    settings = Settings(args)
    labels_path = settings.path("labels", required=True)
    base_error = settings.value("base_error", required=True, cast=float)
    target_error = settings.value("target_error", required=True, cast=float)
    seed = settings.value("seed", default=0, cast=int)
    out_raw = settings.value("out", required=True)
    out_path = settings._anchor(Path(str(out_raw)))
    settings.resolved["out"] = str(out_path)

    if args.dry_run:
        return _dry_run_report(settings, "inject-noise", [out_path])

    try:
        spec = quality.NoiseSpec(base_error_rate=base_error,
                                 target_error_rate=target_error, seed=seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    with labels_path.open("r", encoding="utf-8", newline="") as fp:
        reader = csv.reader(fp)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{labels_path}: empty file") from None
        if "person" not in header:
            raise SchemaError(f"{labels_path}: no person column")
        label_col = header.index("person")
        data = list(reader)
    labels = [int(row[label_col]) for row in data]
    noisy = quality.inject_noise(labels, spec)
    flips = sum(1 for a, b in zip(labels, noisy) if a != b)

    out_path.parent.mkdir(parents=True, exist_ok=True)
    with out_path.open("w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        for row, label in zip(data, noisy):
            row = list(row)
            row[label_col] = str(label)
            writer.writerow(row)
    print(f"flip probability: {spec.flip_p:.6f}")
    print(f"labels flipped:   {flips} of {len(labels)}")
    return EXIT_OK


# --- estimate-error ----------------------------------------------------------

def cmd_estimate_error(args: argparse.Namespace) -> int:
    settings = Settings(args)
    audit_path = settings.path("audit", required=True)
    out_raw = settings.value("out")
    out_path = settings._anchor(Path(str(out_raw))) if out_raw else None
    if out_path is not None:
        settings.resolved["out"] = str(out_path)

    if args.dry_run:
        return _dry_run_report(settings, "estimate-error",
                               [out_path] if out_path else [])

    pairs: list[tuple[int, int]] = []
    with audit_path.open("r", encoding="utf-8", newline="") as fp:
        reader = csv.DictReader(fp)
        fields = reader.fieldnames or ()
        missing = [c for c in ("image_id", "given", "truth") if c not in fields]
        if missing:
            raise SchemaError(f"{audit_path}: missing columns: {', '.join(missing)}")
        for row in reader:
            try:
                pairs.append((int(row["given"]), int(row["truth"])))
            except (TypeError, ValueError):
                raise CurationError(
                    f"{audit_path}: line {reader.line_num}: labels must be 0 or 1") from None
    try:
        result = quality.estimate_error_rate(pairs)
    except ValueError as exc:
        raise CurationError(str(exc)) from None
    print(result.to_text())
    if out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with out_path.open("w", encoding="utf-8", newline="") as fp:
            writer = csv.writer(fp, lineterminator="\n")
            writer.writerow(("samples", "errors", "point_estimate",
                             "wilson_low", "wilson_high"))
            writer.writerow((result.sample_size, result.errors_found,
                             repr(result.point_estimate),
                             repr(result.interval_low), repr(result.interval_high)))
    return EXIT_OK


# --- evaluate ----------------------------------------------------------------

def cmd_evaluate(args: argparse.Namespace) -> int:
    settings = Settings(args)
    predictions_path = settings.path("predictions", required=True)
    labels_path = settings.path("labels", required=True)
    single_class = settings.value("single_class", default="pool")
    out_raw = settings.value("out")
    out_path = settings._anchor(Path(str(out_raw))) if out_raw else None
    if out_path is not None:
        settings.resolved["out"] = str(out_path)
    if single_class not in ("pool", "accuracy"):
        raise ConfigError(f"single_class must be 'pool' or 'accuracy', got {single_class!r}")

    if args.dry_run:
        return _dry_run_report(settings, "evaluate", [out_path] if out_path else [])

    with predictions_path.open("r", encoding="utf-8", newline="") as fp:
        predictions = evaluation.load_predictions(fp)
    # accept either bare image ids or the file names from the labels CSV
    predictions = [replace(p, image_id=_image_id_from_file_name(p.image_id))
                   for p in predictions]

    with labels_path.open("r", encoding="utf-8", newline="") as fp:
        reader = csv.DictReader(fp)
        fields = tuple(reader.fieldnames or ())
        missing = [c for c in assembly.LABEL_COLUMNS if c not in fields]
        if missing:
            raise SchemaError(f"{labels_path}: missing columns: {', '.join(missing)}")
        has_flags = all(c in fields for c in benchmarks.FLAG_COLUMNS)
        label_rows = list(reader)

    labels = {_image_id_from_file_name(row["file_name"].strip()): int(row["person"])
              for row in label_rows}

    if has_flags:
        flagged = []
        for row in label_rows:
            image_id = _image_id_from_file_name(row["file_name"].strip())
            record = DatasetRow(image_id=image_id, file_name=row["file_name"].strip(),
                                label=int(row["person"]), split=Split.TEST)
            flagged.append((record, benchmarks.flags_from_bits(row)))
        try:
            table = evaluation.subset_metrics(predictions, flagged,
                                              single_class=single_class)
        except ValueError as exc:
            raise CurationError(str(exc)) from None
        print(evaluation.format_subset_table(table))
        if out_path is not None:
            out_path.parent.mkdir(parents=True, exist_ok=True)
            with out_path.open("w", encoding="utf-8", newline="") as fp:
                evaluation.write_subset_metrics_csv(table, fp)
    else:
        try:
            cm = evaluation.confusion(predictions, labels)
            m = evaluation.metrics(cm)
        except ValueError as exc:
            raise CurationError(str(exc)) from None
        print(f"samples:   {cm.total}")
        print(f"tp={cm.tp} fp={cm.fp} tn={cm.tn} fn={cm.fn}")
        print(f"accuracy:  {m.accuracy:.6f}")
        print(f"precision: {m.precision:.6f}")
        print(f"recall:    {m.recall:.6f}")
        print(f"f1:        {m.f1:.6f}")
        if out_path is not None:
            out_path.parent.mkdir(parents=True, exist_ok=True)
            with out_path.open("w", encoding="utf-8", newline="") as fp:
                writer = csv.writer(fp, lineterminator="\n")
                writer.writerow(("samples", "tp", "fp", "tn", "fn",
                                 "accuracy", "precision", "recall", "f1"))
                writer.writerow((cm.total, cm.tp, cm.fp, cm.tn, cm.fn,
                                 repr(m.accuracy), repr(m.precision),
                                 repr(m.recall), repr(m.f1)))
    return EXIT_OK


# --- pareto ------------------------------------------------------------------

def cmd_pareto(args: argparse.Namespace) -> int:
    settings = Settings(args)
    cards_path = settings.path("cards", required=True)
    out_raw = settings.value("out")
    out_path = settings._anchor(Path(str(out_raw))) if out_raw else None
    if out_path is not None:
        settings.resolved["out"] = str(out_path)

    if args.dry_run:
        return _dry_run_report(settings, "pareto", [out_path] if out_path else [])

    with cards_path.open("r", encoding="utf-8", newline="") as fp:
        cards = evaluation.load_model_cards(fp)
    if not cards:
        raise CurationError(f"{cards_path}: no model cards")
    frontier = evaluation.pareto_frontier(cards)
    print(evaluation.format_frontier(cards, frontier))
    if out_path is not None:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        with out_path.open("w", encoding="utf-8", newline="") as fp:
            evaluation.write_model_cards_csv(frontier, fp)
    return EXIT_OK


# --- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="binsift",
        description="Curate balanced binary datasets and benchmark suites "
                    "from annotation metadata.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--root", default=".", help="base directory for relative paths")
        p.add_argument("--config", help="YAML config; flags override its keys")
        p.add_argument("--dry-run", action="store_true",
                       help="print resolved config and planned outputs, write nothing")

    p = sub.add_parser("generate", help="label, balance, and write dataset splits")
    common(p)
    p.add_argument("--task-spec", dest="task_spec", help="task spec YAML")
    p.add_argument("--hierarchy", help="label hierarchy edge list")
    p.add_argument("--train-image-labels", dest="train_image_labels",
                   help="image-level label CSV for the large training split")
    p.add_argument("--train-boxes", dest="train_boxes",
                   help="box CSV for the quality training split")
    p.add_argument("--val-boxes", dest="val_boxes", help="box CSV for validation")
    p.add_argument("--test-boxes", dest="test_boxes", help="box CSV for test")
    p.add_argument("--overrides-validation", dest="overrides_validation",
                   help="manual relabel CSV applied to validation")
    p.add_argument("--overrides-test", dest="overrides_test",
                   help="manual relabel CSV applied to test")
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int,
                   help="labeling worker processes (default: logical cores)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("benchmarks", help="attach benchmark flags to a split")
    common(p)
    p.add_argument("--labels", help="split label CSV from generate")
    p.add_argument("--decisions", help="decision sidecar CSV from generate")
    p.add_argument("--miap", help="demographic annotation CSV")
    p.add_argument("--images-dir", dest="images_dir", help="directory of .ppm/.png images")
    p.add_argument("--luminance-csv", dest="luminance_csv",
                   help="precomputed image_id,mean_gray CSV")
    p.add_argument("--split", choices=[s.value for s in Split])
    p.add_argument("--output-dir", dest="output_dir")
    p.set_defaults(func=cmd_benchmarks)

    p = sub.add_parser("inject-noise", help="materialize a label-noise copy of a split")
    common(p)
    p.add_argument("--labels", help="split label CSV")
    p.add_argument("--base-error", dest="base_error", type=float,
                   help="estimated error rate already present")
    p.add_argument("--target-error", dest="target_error", type=float,
                   help="overall error rate to reach")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output CSV path")
    p.set_defaults(func=cmd_inject_noise)

    p = sub.add_parser("estimate-error", help="estimate label error from an audit CSV")
    common(p)
    p.add_argument("--audit", help="CSV with image_id,given,truth columns")
    p.add_argument("--out", help="optional output CSV path")
    p.set_defaults(func=cmd_estimate_error)

    p = sub.add_parser("evaluate", help="score predictions against a split")
    common(p)
    p.add_argument("--predictions", help="CSV with image_id,predicted[,score]")
    p.add_argument("--labels", help="label CSV, with or without benchmark flags")
    p.add_argument("--single-class", dest="single_class", choices=("pool", "accuracy"),
                   help="how to score single-class subsets (default: pool)")
    p.add_argument("--out", help="optional metrics CSV path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pareto", help="compute the cost/accuracy frontier of model cards")
    common(p)
    p.add_argument("--cards", help="model card CSV")
    p.add_argument("--out", help="optional frontier CSV path")
    p.set_defaults(func=cmd_pareto)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, UnknownLabelError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CurationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
