"""File formats: line-delimited embedding files, CSV tables, INI manifests.

Formats are text-first and diffable. Floating-point values are serialized in
shortest round-trip decimal form (Python's ``repr``), so write-then-read is
bit-exact and fixtures stay stable across languages.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

from .core import (
    AccuracyRun,
    DatasetManifest,
    EmbeddingRecord,
    Family,
    Gender,
    LabelVocabulary,
    PredictionLog,
    PredictionRecord,
    Variant,
    record_problems,
)

EMB_FORMAT = "biaslens-emb"
EMB_VERSION = 1

ACCURACY_COLUMNS = ["model", "family", "variant", "iteration", "accuracy"]
PREDICTION_COLUMNS = ["image_id", "gender", "label", "encoder", "family"]

_DATA_DIR = Path(__file__).resolve().parent / "data"


class IngestError(Exception):
    """A file failed to load. ``kind`` is one of: parse, dimension-mismatch,
    zero-vector, duplicate-id, vocabulary-violation, io."""

    def __init__(self, kind: str, message: str, line: int | None = None):
        self.kind = kind
        self.message = message
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}{message} [{kind}]")


def _reject_constant(token: str):
    raise ValueError(f"non-finite number {token}")


def _load_json_line(text: str, line_no: int) -> dict:
    try:
        obj = json.loads(text, parse_constant=_reject_constant)
    except ValueError as exc:
        raise IngestError("parse", f"invalid JSON: {exc}", line=line_no) from exc
    if not isinstance(obj, dict):
        raise IngestError("parse", "expected a JSON object", line=line_no)
    return obj


def load_embeddings(path: str | Path) -> list[EmbeddingRecord]:
    """Load an ``.embj`` file: one header line, then one record per line.

    Enforces every embedding invariant at load time (uniform dimension,
    finite non-zero vectors, unique ids, declared record count). Record order
    is preserved.
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IngestError("io", f"cannot read {path}: {exc}") from exc

    if not lines:
        raise IngestError("parse", "empty file, expected header line", line=1)

    header = _load_json_line(lines[0], 1)
    if header.get("format") != EMB_FORMAT or header.get("version") != EMB_VERSION:
        raise IngestError(
            "parse",
            f"unsupported header {header.get('format')!r} v{header.get('version')!r}, "
            f"expected {EMB_FORMAT!r} v{EMB_VERSION}",
            line=1,
        )
    dim = header.get("dim")
    count = header.get("count")
    if not isinstance(dim, int) or dim < 1:
        raise IngestError("parse", f"header dim must be a positive integer, got {dim!r}", line=1)
    if not isinstance(count, int) or count < 0:
        raise IngestError("parse", f"header count must be a non-negative integer, got {count!r}", line=1)

    records: list[EmbeddingRecord] = []
    seen_ids: set[str] = set()
    for line_no, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            raise IngestError("parse", "blank record line", line=line_no)
        obj = _load_json_line(raw, line_no)
        try:
            vec = obj["vec"]
            if not isinstance(vec, list) or not all(isinstance(x, (int, float)) for x in vec):
                raise ValueError("vec must be an array of numbers")
            record = EmbeddingRecord(
                id=str(obj["id"]),
                vec=tuple(float(x) for x in vec),
                gender=Gender(obj["gender"]),
                class_label=str(obj["class"]),
                masked=_require_bool(obj, "masked"),
                model=str(obj["model"]),
                family=Family(obj["family"]),
                variant=Variant(obj["variant"]),
                iteration=_require_int(obj, "iteration"),
            )
        except KeyError as exc:
            raise IngestError("parse", f"missing field {exc.args[0]!r}", line=line_no) from exc
        except ValueError as exc:
            raise IngestError("parse", str(exc), line=line_no) from exc

        if record.dim != dim:
            raise IngestError(
                "dimension-mismatch",
                f"record {record.id!r} vec has length {record.dim}, header declares dim {dim}",
                line=line_no,
            )
        for problem in record_problems(record):
            kind = "zero-vector" if "zero" in problem else "parse"
            raise IngestError(kind, f"record {record.id!r}: {problem}", line=line_no)
        if record.id in seen_ids:
            raise IngestError("duplicate-id", f"duplicate record id {record.id!r}", line=line_no)
        seen_ids.add(record.id)
        records.append(record)

    if len(records) != count:
        raise IngestError(
            "parse", f"header declares count {count}, file holds {len(records)} records"
        )
    return records


def _require_bool(obj: dict, key: str) -> bool:
    value = obj[key]
    if not isinstance(value, bool):
        raise ValueError(f"{key} must be true or false, got {value!r}")
    return value


def _require_int(obj: dict, key: str) -> int:
    value = obj[key]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ValueError(f"{key} must be an integer, got {value!r}")
    return value


def write_embeddings(
    records: Sequence[EmbeddingRecord], path: str | Path, dim: int | None = None
) -> None:
    """Write records as ``.embj``. ``dim`` is only needed for empty collections."""
    records = list(records)
    if records:
        dim = records[0].dim
    elif dim is None:
        raise ValueError("dim is required when writing an empty embedding file")
    header = {"format": EMB_FORMAT, "version": EMB_VERSION, "dim": dim, "count": len(records)}
    lines = [json.dumps(header, separators=(",", ":"))]
    for r in records:
        lines.append(
            json.dumps(
                {
                    "id": r.id,
                    "vec": list(r.vec),
                    "gender": r.gender.value,
                    "class": r.class_label,
                    "masked": r.masked,
                    "model": r.model,
                    "family": r.family.value,
                    "variant": r.variant.value,
                    "iteration": r.iteration,
                },
                separators=(",", ":"),
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _open_csv(path: Path, expected_columns: list[str]):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError("io", f"cannot read {path}: {exc}") from exc
    rows = list(csv.reader(text.splitlines()))
    if not rows:
        return []
    if rows[0] != expected_columns:
        raise IngestError(
            "parse",
            f"bad header {rows[0]!r}, expected {expected_columns!r}",
            line=1,
        )
    return rows[1:]


def load_accuracy_runs(path: str | Path) -> list[AccuracyRun]:
    """Load the accuracy table: ``model,family,variant,iteration,accuracy``."""
    rows = _open_csv(Path(path), ACCURACY_COLUMNS)
    runs: list[AccuracyRun] = []
    seen: set[tuple] = set()
    for line_no, row in enumerate(rows, start=2):
        if len(row) != len(ACCURACY_COLUMNS):
            raise IngestError("parse", f"expected {len(ACCURACY_COLUMNS)} cells, got {len(row)}", line=line_no)
        model, family, variant, iteration, accuracy = row
        try:
            acc = float(accuracy)
            if not math.isfinite(acc):
                raise ValueError(f"accuracy {accuracy!r} is not finite")
            run = AccuracyRun(
                model=model,
                family=Family(family),
                variant=Variant(variant),
                iteration=int(iteration),
                accuracy=acc,
            )
        except ValueError as exc:
            raise IngestError("parse", str(exc), line=line_no) from exc
        if run.key in seen:
            raise IngestError(
                "duplicate-id",
                f"duplicate run (model={run.model}, variant={run.variant.value}, "
                f"iteration={run.iteration})",
                line=line_no,
            )
        seen.add(run.key)
        runs.append(run)
    return runs


def write_accuracy_runs(runs: Sequence[AccuracyRun], path: str | Path) -> None:
    lines = [",".join(ACCURACY_COLUMNS)]
    for r in runs:
        lines.append(f"{r.model},{r.family.value},{r.variant.value},{r.iteration},{r.accuracy!r}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_predictions(path: str | Path, vocab: LabelVocabulary) -> PredictionLog:
    """Load a zero-shot prediction log, verifying every label against ``vocab``."""
    rows = _open_csv(Path(path), PREDICTION_COLUMNS)
    allowed = set(vocab.labels)
    records: list[PredictionRecord] = []
    for line_no, row in enumerate(rows, start=2):
        if len(row) != len(PREDICTION_COLUMNS):
            raise IngestError("parse", f"expected {len(PREDICTION_COLUMNS)} cells, got {len(row)}", line=line_no)
        image_id, gender, label, encoder, family = row
        if label not in allowed:
            raise IngestError(
                "vocabulary-violation", f"label {label!r} is not in the vocabulary", line=line_no
            )
        try:
            records.append(
                PredictionRecord(
                    image_id=image_id,
                    gender=Gender(gender),
                    label=label,
                    encoder=encoder,
                    family=Family(family),
                )
            )
        except ValueError as exc:
            raise IngestError("parse", str(exc), line=line_no) from exc
    return PredictionLog(records=tuple(records), vocab=vocab)


def write_predictions(log: PredictionLog, path: str | Path) -> None:
    lines = [",".join(PREDICTION_COLUMNS)]
    for r in log.records:
        lines.append(f"{r.image_id},{r.gender.value},{r.label},{r.encoder},{r.family.value}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_manifest(path: str | Path) -> DatasetManifest:
    """Parse a manifest: ``[attributes]``, ``[targets.<class>]``, ``[protocol]``."""
    parser = configparser.ConfigParser()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IngestError("io", f"cannot read {path}: {exc}") from exc
    try:
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise IngestError("parse", f"invalid manifest: {exc}") from exc

    try:
        attrs = parser["attributes"]
        attribute_size = attrs.getint("size_per_gender")
        attribute_class = attrs.get("class", fallback="person")
        targets = {}
        for section in parser.sections():
            if section.startswith("targets."):
                cls = section.split(".", 1)[1]
                targets[cls] = parser[section].getint("size_per_gender")
        protocol = parser["protocol"]
        iterations = protocol.getint("iterations")
        masked = protocol.getboolean("masked")
        if attribute_size is None or iterations is None or masked is None:
            raise ValueError("missing required manifest keys")
        if any(size is None for size in targets.values()):
            raise ValueError("target section missing size_per_gender")
        return DatasetManifest(
            attribute_size=attribute_size,
            targets=targets,
            iterations=iterations,
            masked=masked,
            attribute_class=attribute_class,
        )
    except (KeyError, ValueError, configparser.Error) as exc:
        raise IngestError("parse", f"invalid manifest: {exc}") from exc


def write_manifest(manifest: DatasetManifest, path: str | Path) -> None:
    lines = [
        "[attributes]",
        f"class = {manifest.attribute_class}",
        f"size_per_gender = {manifest.attribute_size}",
        "",
    ]
    for cls in sorted(manifest.targets):
        lines += [f"[targets.{cls}]", f"size_per_gender = {manifest.targets[cls]}", ""]
    lines += [
        "[protocol]",
        f"iterations = {manifest.iterations}",
        f"masked = {str(manifest.masked).lower()}",
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_vocabulary(path: str | Path) -> LabelVocabulary:
    """Load a vocabulary file: one label per line, lowercased, blanks skipped."""
    path = Path(path)
    try:
        raw_lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise IngestError("io", f"cannot read {path}: {exc}") from exc
    labels: list[str] = []
    seen: set[str] = set()
    for line_no, raw in enumerate(raw_lines, start=1):
        label = raw.strip().lower()
        if not label:
            continue
        if label in seen:
            raise IngestError("parse", f"duplicate vocabulary label {label!r}", line=line_no)
        seen.add(label)
        labels.append(label)
    if not labels:
        raise IngestError("parse", "vocabulary file holds no labels")
    return LabelVocabulary(tuple(labels))


def default_vocabulary() -> LabelVocabulary:
    """The bundled 100-term occupation vocabulary."""
    return load_vocabulary(_DATA_DIR / "occupations.txt")
