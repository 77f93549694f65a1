"""Core bias metrics: cosine similarity, association scores, accuracy deltas.

Everything here is a pure function over immutable inputs, computed at full
double precision; display rounding happens in the report module. The image
association score follows the sign convention that a positive value means the
target sits closer to the men attribute set.
"""

from __future__ import annotations

import hashlib
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .core import (
    DatasetManifest,
    DomainError,
    EmbeddingRecord,
    Family,
    Gender,
    Variant,
)

Vector = Sequence[float]


def _as_vector(v: Vector, name: str) -> np.ndarray:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError(f"{name} must be a non-empty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} contains non-finite values")
    return arr


def cosine_similarity(v1: Vector, v2: Vector) -> float:
    """Cosine of the angle between two feature vectors.

    Result lies in [-1, 1]; it is confined to [0, 1] only when both vectors
    are entrywise non-negative (post-rectification activations). Raises
    :class:`DomainError` on length mismatch or a zero vector.
    """
    a = _as_vector(v1, "v1")
    b = _as_vector(v2, "v2")
    if a.shape != b.shape:
        raise DomainError(f"length mismatch: {a.size} vs {b.size}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise DomainError("cosine similarity is undefined for the zero vector")
    return float(np.dot(a, b) / (norm_a * norm_b))


def association_score(w: Vector, attrs_a: Iterable[Vector], attrs_b: Iterable[Vector]) -> float:
    """Differential similarity of target ``w`` to attribute sets A and B:
    mean cosine to A minus mean cosine to B."""
    attrs_a = list(attrs_a)
    attrs_b = list(attrs_b)
    if not attrs_a or not attrs_b:
        raise DomainError("attribute sets must be non-empty")
    mean_a = sum(cosine_similarity(w, a) for a in attrs_a) / len(attrs_a)
    mean_b = sum(cosine_similarity(w, b) for b in attrs_b) / len(attrs_b)
    return mean_a - mean_b


def iias(
    targets: Iterable[Vector], attrs_a: Iterable[Vector], attrs_b: Iterable[Vector]
) -> float:
    """Image association score: mean of :func:`association_score` over targets.

    Positive values associate the target class with set A (men), negative
    with set B (women); magnitude measures the strength.
    """
    targets = list(targets)
    if not targets:
        raise DomainError("target set must be non-empty")
    attrs_a = list(attrs_a)
    attrs_b = list(attrs_b)
    return sum(association_score(w, attrs_a, attrs_b) for w in targets) / len(targets)


def total_absolute_iias(per_class: Iterable[float]) -> float:
    """Sum of absolute per-class scores; compares bias magnitude across models."""
    values = list(per_class)
    if not values:
        raise DomainError("need at least one per-class value")
    return float(sum(abs(v) for v in values))


def accuracy_from_labels(truth: Sequence[str], predicted: Sequence[str]) -> float:
    """Fraction of positions where predicted label equals the true label."""
    if len(truth) == 0 or len(truth) != len(predicted):
        raise DomainError(
            f"need equal non-empty label sequences, got {len(truth)} and {len(predicted)}"
        )
    hits = sum(1 for t, p in zip(truth, predicted) if t == p)
    return hits / len(truth)


@dataclass(frozen=True)
class DeltaResult:
    """Accuracy difference of one model pair.

    ``delta`` is the absolute gap between the unbiased-trained and
    biased-trained accuracies; ``percent_delta`` normalizes it by the
    unbiased accuracy (None when that accuracy is zero and the percentage is
    undefined).
    """

    a_unbiased: float
    a_biased: float
    delta: float
    percent_delta: float | None
    model: str = ""
    family: Family | None = None


def accuracy_difference(
    a_unbiased: float, a_biased: float, model: str = "", family: Family | None = None
) -> DeltaResult:
    """Accuracy difference |a_unbiased - a_biased| and its percentage form."""
    for name, a in (("a_unbiased", a_unbiased), ("a_biased", a_biased)):
        if not 0.0 <= a <= 1.0:
            raise DomainError(f"{name} must be in [0, 1], got {a}")
    delta = abs(a_unbiased - a_biased)
    percent = delta / a_unbiased * 100.0 if a_unbiased > 0 else None
    return DeltaResult(
        a_unbiased=a_unbiased,
        a_biased=a_biased,
        delta=delta,
        percent_delta=percent,
        model=model,
        family=family,
    )


def percent_increase(value: float, baseline: float) -> float:
    """Relative change of ``value`` over ``baseline``, in percent."""
    if baseline <= 0:
        raise DomainError(f"baseline must be positive, got {baseline}")
    return (value - baseline) / baseline * 100.0


def aggregate_mean(values: Iterable[float]) -> float:
    """Arithmetic mean; raises on empty input."""
    values = list(values)
    if not values:
        raise DomainError("cannot average an empty sequence")
    return float(sum(values)) / len(values)


@dataclass(frozen=True)
class ModelDelta:
    """Per-model accuracy difference, averaged over fine-tuning iterations."""

    model: str
    family: Family
    mean_delta: float
    mean_percent_delta: float
    iterations: int


def summarize_accuracy_runs(runs: Iterable) -> list[ModelDelta]:
    """Pair biased/unbiased runs per (model, iteration) and average the deltas.

    Every iteration must appear with both variants; unbiased accuracy must be
    positive so the percentage is defined.
    """
    by_model: dict[str, dict[int, dict[Variant, float]]] = defaultdict(lambda: defaultdict(dict))
    families: dict[str, set[Family]] = defaultdict(set)
    for run in runs:
        by_model[run.model][run.iteration][run.variant] = run.accuracy
        families[run.model].add(run.family)

    out: list[ModelDelta] = []
    for model in sorted(by_model):
        if len(families[model]) != 1:
            raise DomainError(f"model {model!r} carries conflicting family tags")
        deltas: list[float] = []
        percents: list[float] = []
        for iteration in sorted(by_model[model]):
            pair = by_model[model][iteration]
            if set(pair) != {Variant.BIASED, Variant.UNBIASED}:
                raise DomainError(
                    f"model {model!r} iteration {iteration} lacks a biased/unbiased pair"
                )
            result = accuracy_difference(pair[Variant.UNBIASED], pair[Variant.BIASED])
            if result.percent_delta is None:
                raise DomainError(
                    f"model {model!r} iteration {iteration} has zero unbiased accuracy"
                )
            deltas.append(result.delta)
            percents.append(result.percent_delta)
        out.append(
            ModelDelta(
                model=model,
                family=families[model].pop(),
                mean_delta=aggregate_mean(deltas),
                mean_percent_delta=aggregate_mean(percents),
                iterations=len(deltas),
            )
        )
    return out


@dataclass(frozen=True)
class AssociationResult:
    """Association score of one class under one condition/variant/family.

    ``iias`` is the arithmetic mean of ``per_iteration`` values, each computed
    on freshly sampled attribute and target subsets.
    """

    class_label: str
    condition: str
    variant: Variant
    family: Family
    per_iteration: tuple[float, ...]
    iias: float

    @classmethod
    def from_iterations(
        cls, class_label: str, condition: str, variant: Variant, family: Family,
        per_iteration: Sequence[float],
    ) -> "AssociationResult":
        values = tuple(float(v) for v in per_iteration)
        return cls(
            class_label=class_label,
            condition=condition,
            variant=variant,
            family=family,
            per_iteration=values,
            iias=aggregate_mean(values),
        )


def _sub_rng(seed: int, *parts: str) -> np.random.Generator:
    """Deterministic per-pool generator so parallel evaluation order cannot
    change results."""
    digest = hashlib.sha256("|".join(parts).encode("utf-8")).digest()
    words = [int.from_bytes(digest[i : i + 4], "big") for i in range(0, 16, 4)]
    return np.random.default_rng([seed, *words])


def _partition(
    pool: list[EmbeddingRecord], per_iteration: int, iterations: int,
    rng: np.random.Generator, what: str,
) -> list[list[EmbeddingRecord]]:
    """Shuffle a pool and split the head into ``iterations`` disjoint samples."""
    need = per_iteration * iterations
    if len(pool) < need:
        raise DomainError(
            f"{what}: pool has {len(pool)} records, needs {need} "
            f"for {iterations} iterations of {per_iteration} without repetition"
        )
    order = rng.permutation(len(pool))
    shuffled = [pool[i] for i in order]
    return [
        shuffled[k * per_iteration : (k + 1) * per_iteration] for k in range(iterations)
    ]


def iias_protocol_run(
    records: Iterable[EmbeddingRecord], manifest: DatasetManifest, seed: int
) -> list[AssociationResult]:
    """Run the sampled association-score protocol over an embedding collection.

    For every (model, variant) slice the attribute and per-class target pools
    are shuffled with seed-derived generators and partitioned into
    ``manifest.iterations`` disjoint per-gender samples, so no image repeats
    across iterations. Models sharing a family are averaged per iteration
    into one result per class, condition, variant and family.
    """
    records = list(records)
    if not records:
        raise DomainError("no embedding records supplied")
    if seed < 0:
        raise DomainError(f"seed must be non-negative, got {seed}")

    slices: dict[tuple[str, Variant], list[EmbeddingRecord]] = defaultdict(list)
    model_families: dict[str, set[Family]] = defaultdict(set)
    for r in records:
        slices[(r.model, r.variant)].append(r)
        model_families[r.model].add(r.family)
    for model, fams in model_families.items():
        if len(fams) > 1:
            raise DomainError(f"model {model!r} carries conflicting family tags")

    # per-iteration scores of each model, keyed for the family-level average
    collected: dict[tuple[str, Variant, Family], dict[str, list[list[float]]]] = defaultdict(
        lambda: defaultdict(list)
    )

    for (model, variant), in_slice in sorted(slices.items()):
        family = model_families[model].copy().pop()
        where = f"model={model} variant={variant.value}"

        def pool(class_label: str, gender: Gender, masked: bool) -> list[EmbeddingRecord]:
            members = [
                r for r in in_slice
                if r.class_label == class_label and r.gender == gender and r.masked == masked
            ]
            return sorted(members, key=lambda r: r.id)

        rng_attr = _sub_rng(seed, model, variant.value, "attributes")
        attr_samples = {
            gender: _partition(
                pool(manifest.attribute_class, gender, masked=False),
                manifest.attribute_size,
                manifest.iterations,
                rng_attr,
                f"{where} attribute gender={gender.value}",
            )
            for gender in (Gender.MAN, Gender.WOMAN)
        }

        for class_label in sorted(manifest.targets):
            rng_target = _sub_rng(seed, model, variant.value, "targets", class_label)
            target_samples = {
                gender: _partition(
                    pool(class_label, gender, masked=manifest.masked),
                    manifest.targets[class_label],
                    manifest.iterations,
                    rng_target,
                    f"{where} target {class_label!r} gender={gender.value}",
                )
                for gender in (Gender.MAN, Gender.WOMAN)
            }
            per_iteration = []
            for k in range(manifest.iterations):
                targets = target_samples[Gender.MAN][k] + target_samples[Gender.WOMAN][k]
                score = iias(
                    [r.vec for r in targets],
                    [r.vec for r in attr_samples[Gender.MAN][k]],
                    [r.vec for r in attr_samples[Gender.WOMAN][k]],
                )
                per_iteration.append(score)
            collected[(class_label, variant, family)][model].append(per_iteration)

    results: list[AssociationResult] = []
    for (class_label, variant, family), per_model in sorted(collected.items()):
        rows = [vals for runs in per_model.values() for vals in runs]
        family_iterations = [
            aggregate_mean([row[k] for row in rows]) for k in range(manifest.iterations)
        ]
        results.append(
            AssociationResult.from_iterations(
                class_label, manifest.condition, variant, family, family_iterations
            )
        )
    return results
