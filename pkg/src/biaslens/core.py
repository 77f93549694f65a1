"""Shared domain model: embedding records, manifests, runs, prediction logs.

All types are immutable value objects; anything loaded from disk is safe to
share across workers. Numeric invariants on embedding vectors are enforced at
the ingest boundary and by :func:`validate_manifest`, so metric code can
assume clean input.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence


class Gender(str, Enum):
    MAN = "man"
    WOMAN = "woman"


class Family(str, Enum):
    """Architecture family used for all comparative aggregates."""

    CNN = "cnn"
    VIT = "vit"


class Variant(str, Enum):
    """Which training dataset a model was fine-tuned on."""

    BIASED = "biased"
    UNBIASED = "unbiased"


class DomainError(ValueError):
    """An operation was called outside its numeric domain."""


# Class label conventionally carried by gender-attribute records (images of
# men/women that anchor the association score, as opposed to target classes).
ATTRIBUTE_CLASS = "person"


def _coerce_enum(obj, name: str, enum_cls) -> None:
    value = getattr(obj, name)
    if not isinstance(value, enum_cls):
        object.__setattr__(obj, name, enum_cls(value))


@dataclass(frozen=True)
class EmbeddingRecord:
    """One image's feature vector plus its semantic tags.

    ``vec`` holds the flattened activations of the extractor layer; the tags
    say which image pool the record belongs to (gender, class, masked) and
    which model produced it (model, family, variant, iteration of the
    fine-tuning run).
    """

    id: str
    vec: tuple[float, ...]
    gender: Gender
    class_label: str
    masked: bool
    model: str
    family: Family
    variant: Variant
    iteration: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "vec", tuple(float(x) for x in self.vec))
        _coerce_enum(self, "gender", Gender)
        _coerce_enum(self, "family", Family)
        _coerce_enum(self, "variant", Variant)

    @property
    def dim(self) -> int:
        return len(self.vec)


def record_problems(record: EmbeddingRecord) -> list[str]:
    """Check one record against the embedding invariants.

    Returns human-readable problem strings; empty means the record is valid.
    Used both by the ingest loaders (which turn problems into errors) and by
    :func:`validate_manifest` (which reports them as violations).
    """
    problems = []
    if len(record.vec) == 0:
        problems.append("vec is empty")
        return problems
    if not all(math.isfinite(x) for x in record.vec):
        problems.append("vec contains non-finite values")
    elif all(x == 0.0 for x in record.vec):
        problems.append("vec is the zero vector")
    if record.iteration < 1:
        problems.append(f"iteration {record.iteration} < 1")
    return problems


@dataclass(frozen=True)
class DatasetManifest:
    """Declares the image sets of one association-score analysis.

    ``attribute_size`` and each ``targets[class]`` entry are per-gender
    sample sizes drawn in every protocol iteration; the record pools backing
    them must hold ``iterations`` times that many images per gender so the
    draws never repeat an image.
    """

    attribute_size: int
    targets: Mapping[str, int]
    iterations: int = 1
    masked: bool = False
    attribute_class: str = ATTRIBUTE_CLASS

    def __post_init__(self) -> None:
        object.__setattr__(self, "targets", dict(self.targets))
        if self.attribute_size < 1:
            raise ValueError(f"attribute_size must be >= 1, got {self.attribute_size}")
        if not self.targets:
            raise ValueError("manifest declares no target classes")
        for cls, size in self.targets.items():
            if size < 1:
                raise ValueError(f"target {cls!r} size must be >= 1, got {size}")
        if self.iterations < 1:
            raise ValueError(f"iterations must be >= 1, got {self.iterations}")

    @property
    def condition(self) -> str:
        return "masked" if self.masked else "unmasked"


@dataclass(frozen=True)
class AccuracyRun:
    """One (model, variant, iteration) test-accuracy observation."""

    model: str
    family: Family
    variant: Variant
    iteration: int
    accuracy: float

    def __post_init__(self) -> None:
        _coerce_enum(self, "family", Family)
        _coerce_enum(self, "variant", Variant)
        if not 0.0 <= self.accuracy <= 1.0:
            raise ValueError(f"accuracy must be in [0, 1], got {self.accuracy}")
        if self.iteration < 1:
            raise ValueError(f"iteration must be >= 1, got {self.iteration}")

    @property
    def key(self) -> tuple[str, Variant, int]:
        return (self.model, self.variant, self.iteration)


@dataclass(frozen=True)
class LabelVocabulary:
    """Ordered list of distinct lowercase labels a prediction may take."""

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "labels", tuple(self.labels))
        if not self.labels:
            raise ValueError("vocabulary is empty")
        seen = set()
        for label in self.labels:
            if label != label.strip().lower() or not label:
                raise ValueError(f"vocabulary label {label!r} is not a lowercase term")
            if label in seen:
                raise ValueError(f"duplicate vocabulary label {label!r}")
            seen.add(label)

    def __contains__(self, label: object) -> bool:
        return label in set(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)


@dataclass(frozen=True)
class PredictionRecord:
    """One zero-shot prediction: image, gender tag, predicted label, encoder."""

    image_id: str
    gender: Gender
    label: str
    encoder: str
    family: Family

    def __post_init__(self) -> None:
        _coerce_enum(self, "gender", Gender)
        _coerce_enum(self, "family", Family)


@dataclass(frozen=True)
class PredictionLog:
    """Prediction records grouped by encoder and gender, plus their vocabulary."""

    records: tuple[PredictionRecord, ...]
    vocab: LabelVocabulary

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        allowed = set(self.vocab.labels)
        for rec in self.records:
            if rec.label not in allowed:
                raise ValueError(f"prediction label {rec.label!r} not in vocabulary")

    def __len__(self) -> int:
        return len(self.records)

    def encoders(self) -> list[str]:
        return sorted({r.encoder for r in self.records})

    def encoder_family(self, encoder: str) -> Family:
        families = {r.family for r in self.records if r.encoder == encoder}
        if not families:
            raise DomainError(f"no predictions for encoder {encoder!r}")
        if len(families) > 1:
            raise DomainError(f"encoder {encoder!r} carries conflicting family tags")
        return families.pop()

    def slice(self, encoder: str, gender: Gender) -> tuple[PredictionRecord, ...]:
        gender = Gender(gender)
        return tuple(
            r for r in self.records if r.encoder == encoder and r.gender == gender
        )


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        lines = [f"{len(self.violations)} violations"]
        lines.extend(f"- [{v.kind}] {v.message}" for v in self.violations)
        return "\n".join(lines)


def _pool_counts(
    records: Sequence[EmbeddingRecord], class_label: str, masked: bool
) -> dict[Gender, int]:
    counts = {Gender.MAN: 0, Gender.WOMAN: 0}
    for r in records:
        if r.class_label == class_label and r.masked == masked:
            counts[r.gender] += 1
    return counts


def validate_manifest(
    manifest: DatasetManifest, records: Iterable[EmbeddingRecord]
) -> ValidationReport:
    """Check a record collection against a manifest's protocol requirements.

    Violations are data, not failures: the report lists every problem found
    (duplicate ids, bad vectors, dimension spread, unbalanced or undersized
    attribute/target pools per model slice). Deterministic and insensitive to
    record order.
    """
    records = list(records)
    violations: list[Violation] = []

    if not records:
        return ValidationReport((Violation("empty", "no embedding records supplied"),))

    id_counts = Counter(r.id for r in records)
    for rec_id, n in sorted(id_counts.items()):
        if n > 1:
            violations.append(
                Violation("duplicate-id", f"duplicate record id {rec_id!r} ({n} occurrences)")
            )

    for rec in sorted(records, key=lambda r: r.id):
        for problem in record_problems(rec):
            kind = "zero-vector" if "zero" in problem or "empty" in problem else "bad-record"
            violations.append(Violation(kind, f"record {rec.id!r}: {problem}"))

    dims = Counter(r.dim for r in records)
    if len(dims) > 1:
        spread = ", ".join(f"d={d}: {n} records" for d, n in sorted(dims.items()))
        violations.append(Violation("dimension-mismatch", f"dimension mismatch across records ({spread})"))

    need_attr = manifest.iterations * manifest.attribute_size
    need_target = {cls: manifest.iterations * size for cls, size in manifest.targets.items()}

    slices = sorted({(r.model, r.variant) for r in records})
    for model, variant in slices:
        in_slice = [r for r in records if r.model == model and r.variant == variant]
        where = f"model={model} variant={variant.value}"

        attrs = _pool_counts(in_slice, manifest.attribute_class, masked=False)
        if attrs[Gender.MAN] != attrs[Gender.WOMAN]:
            violations.append(
                Violation(
                    "attribute-imbalance",
                    f"{where}: attribute imbalance A={attrs[Gender.MAN]} B={attrs[Gender.WOMAN]}",
                )
            )
        for gender in (Gender.MAN, Gender.WOMAN):
            if attrs[gender] < need_attr:
                violations.append(
                    Violation(
                        "attribute-pool-too-small",
                        f"{where}: attribute pool gender={gender.value} has "
                        f"{attrs[gender]} records, needs {need_attr}",
                    )
                )

        for cls in sorted(manifest.targets):
            pool = _pool_counts(in_slice, cls, masked=manifest.masked)
            if pool[Gender.MAN] != pool[Gender.WOMAN]:
                violations.append(
                    Violation(
                        "target-imbalance",
                        f"{where}: target {cls!r} imbalance "
                        f"men={pool[Gender.MAN]} women={pool[Gender.WOMAN]}",
                    )
                )
            for gender in (Gender.MAN, Gender.WOMAN):
                if pool[gender] < need_target[cls]:
                    violations.append(
                        Violation(
                            "target-pool-too-small",
                            f"{where}: target {cls!r} gender={gender.value} has "
                            f"{pool[gender]} records, needs {need_target[cls]}",
                        )
                    )

    violations.sort(key=lambda v: (v.kind, v.message))
    return ValidationReport(tuple(violations))
