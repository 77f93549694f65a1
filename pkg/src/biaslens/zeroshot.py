"""Zero-shot prediction analysis: label distributions, top-k share, skewness.

Distributions are built over the full vocabulary so that never-predicted
labels show up as zero counts. Skewness supports two domains: all vocabulary
counts (default) or only the observed labels; the reference study's published
values are reproducible only in the observed-labels mode, so the replication
path uses that one and says so.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .core import DomainError, Family, Gender, LabelVocabulary, PredictionLog
from .metrics import aggregate_mean, percent_increase


@dataclass(frozen=True)
class LabelDistribution:
    """Prediction counts of one (encoder, gender) slice over a vocabulary."""

    encoder: str
    family: Family
    gender: Gender
    counts: Mapping[str, int]
    total: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", dict(self.counts))
        if self.total <= 0:
            raise ValueError("distribution total must be positive")
        if sum(self.counts.values()) != self.total:
            raise ValueError("counts do not sum to total")
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("counts must be non-negative")


@dataclass(frozen=True)
class ConcentrationResult:
    """The k most frequent labels of a distribution and their joint share."""

    encoder: str
    gender: Gender
    top_labels: tuple[str, ...]
    occurrence_percent: float


def build_distribution(
    log: PredictionLog, encoder: str, gender: Gender, vocab: LabelVocabulary
) -> LabelDistribution:
    """Count one (encoder, gender) slice over the full vocabulary."""
    rows = log.slice(encoder, gender)
    if not rows:
        raise DomainError(f"no predictions for encoder={encoder!r} gender={Gender(gender).value}")
    counted = Counter(r.label for r in rows)
    counts = {label: counted.get(label, 0) for label in vocab.labels}
    return LabelDistribution(
        encoder=encoder,
        family=log.encoder_family(encoder),
        gender=Gender(gender),
        counts=counts,
        total=len(rows),
    )


def topk_occurrence(dist: LabelDistribution, k: int = 3) -> ConcentrationResult:
    """Top-k labels (ties broken by ascending label) and their percent share.

    ``k`` clamps to the number of labels that actually occur.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    nonzero = [(label, n) for label, n in dist.counts.items() if n > 0]
    nonzero.sort(key=lambda item: (-item[1], item[0]))
    top = nonzero[: min(k, len(nonzero))]
    share = sum(n for _, n in top) / dist.total * 100.0
    return ConcentrationResult(
        encoder=dist.encoder,
        gender=dist.gender,
        top_labels=tuple(label for label, _ in top),
        occurrence_percent=share,
    )


def _moment_skewness(values: Sequence[float], bias_corrected: bool) -> float:
    n = len(values)
    mean = sum(values) / n
    m2 = sum((x - mean) ** 2 for x in values) / n
    if m2 == 0.0:
        return 0.0
    m3 = sum((x - mean) ** 3 for x in values) / n
    g1 = m3 / m2**1.5
    if bias_corrected:
        if n < 3:
            raise DomainError("sample-adjusted skewness needs at least 3 values")
        g1 *= (n * (n - 1)) ** 0.5 / (n - 2)
    return g1


def skewness(
    dist: LabelDistribution, *, include_zero_counts: bool = True, bias_corrected: bool = False
) -> float:
    """Fisher-Pearson moment skewness of the per-label count multiset.

    ``include_zero_counts`` keeps vocabulary labels that were never predicted
    in the multiset (the default); set it False to measure only observed
    labels. ``bias_corrected`` switches to the sample-adjusted estimator.
    Returns 0 when all counts are equal.
    """
    values = [float(c) for c in dist.counts.values()]
    if not include_zero_counts:
        values = [v for v in values if v > 0]
    if not values:
        raise DomainError("distribution has no counts to measure")
    return _moment_skewness(values, bias_corrected)


@dataclass(frozen=True)
class FamilyComparison:
    """Family means of a per-encoder scalar plus the relative gap."""

    cnn_mean: float
    vit_mean: float
    vit_over_cnn_percent: float


def family_comparison(results: Iterable[tuple[str, Family, float]]) -> FamilyComparison:
    """Average a per-encoder scalar within each family and compare them.

    ``results`` yields (encoder, family, value) triples; both families must
    be present. The comparison is the percent increase of the ViT mean over
    the CNN mean (negative when ViT is lower).
    """
    by_family: dict[Family, list[float]] = {Family.CNN: [], Family.VIT: []}
    for _, family, value in results:
        by_family[Family(family)].append(value)
    for family, values in by_family.items():
        if not values:
            raise DomainError(f"no encoders in family {family.value!r}")
    cnn_mean = aggregate_mean(by_family[Family.CNN])
    vit_mean = aggregate_mean(by_family[Family.VIT])
    return FamilyComparison(
        cnn_mean=cnn_mean,
        vit_mean=vit_mean,
        vit_over_cnn_percent=percent_increase(vit_mean, cnn_mean),
    )
