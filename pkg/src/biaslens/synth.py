"""Synthetic embedding pools with a planted, tunable gender signal.

The generator places the men attribute cluster on one unit direction, the
women cluster on another, and class targets on a mixture controlled by the
bias strength: at full strength a male-coded target sits exactly on the men
direction, at zero strength on the midpoint between the two clusters. With
zero noise the resulting association score has a closed form, which gives
every metric an oracle that needs no real model.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    ATTRIBUTE_CLASS,
    DatasetManifest,
    DomainError,
    EmbeddingRecord,
    Family,
    Gender,
    Variant,
)
from .metrics import cosine_similarity

MALE_CODED_CLASS = "male_coded"
FEMALE_CODED_CLASS = "female_coded"

# sub-stream tags, one per generated set
_STREAMS = {
    (ATTRIBUTE_CLASS, Gender.MAN): 1,
    (ATTRIBUTE_CLASS, Gender.WOMAN): 2,
    (MALE_CODED_CLASS, Gender.MAN): 3,
    (MALE_CODED_CLASS, Gender.WOMAN): 4,
    (FEMALE_CODED_CLASS, Gender.MAN): 5,
    (FEMALE_CODED_CLASS, Gender.WOMAN): 6,
}


@dataclass(frozen=True)
class SynthConfig:
    """Parameters of one synthetic pool.

    ``bias`` interpolates target directions between the neutral midpoint (0)
    and the matching attribute direction (1). ``noise`` is the per-coordinate
    Gaussian scale; with ``non_negative`` on, negative coordinates are
    truncated to zero, mimicking post-rectification activations.
    ``attribute_count`` and ``target_count`` are per gender.
    """

    dim: int = 2
    bias: float = 1.0
    noise: float = 0.0
    attribute_count: int = 10
    target_count: int = 10
    seed: int = 0
    non_negative: bool = True
    angle_degrees: float = 90.0

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise DomainError(f"dim must be at least 2, got {self.dim}")
        if not 0.0 <= self.bias <= 1.0:
            raise DomainError(f"bias must be in [0, 1], got {self.bias}")
        if self.noise < 0.0:
            raise DomainError(f"noise must be >= 0, got {self.noise}")
        if self.attribute_count < 1 or self.target_count < 1:
            raise DomainError("attribute_count and target_count must be >= 1")
        if self.seed < 0:
            raise DomainError(f"seed must be non-negative, got {self.seed}")
        if not 0.0 < self.angle_degrees <= 180.0:
            raise DomainError("angle_degrees must be in (0, 180]")


def _directions(config: SynthConfig) -> dict[str, np.ndarray]:
    u_a = np.zeros(config.dim)
    u_a[0] = 1.0
    theta = math.radians(config.angle_degrees)
    u_b = np.zeros(config.dim)
    u_b[0] = math.cos(theta)
    u_b[1] = math.sin(theta)
    u_b[np.abs(u_b) < 1e-15] = 0.0  # right angles place the cluster exactly on an axis
    neutral = (u_a + u_b) / 2.0
    return {
        "attr_a": u_a,
        "attr_b": u_b,
        "male_target": config.bias * u_a + (1.0 - config.bias) * neutral,
        "female_target": config.bias * u_b + (1.0 - config.bias) * neutral,
    }


def _draw(
    direction: np.ndarray, config: SynthConfig, rng: np.random.Generator
) -> tuple[float, ...]:
    for _ in range(64):
        vec = direction + config.noise * rng.standard_normal(config.dim)
        if config.non_negative:
            vec = np.maximum(vec, 0.0)
        if np.any(vec != 0.0):
            return tuple(float(x) for x in vec)
    raise DomainError("could not draw a non-zero vector; noise drowns the signal")


def generate_pool(config: SynthConfig) -> list[EmbeddingRecord]:
    """Generate attribute and target records for one synthetic analysis.

    Deterministic for a given seed; each set draws from its own sub-stream so
    set sizes can change without reshuffling the others.
    """
    dirs = _directions(config)
    plan = [
        (ATTRIBUTE_CLASS, Gender.MAN, dirs["attr_a"], config.attribute_count),
        (ATTRIBUTE_CLASS, Gender.WOMAN, dirs["attr_b"], config.attribute_count),
        (MALE_CODED_CLASS, Gender.MAN, dirs["male_target"], config.target_count),
        (MALE_CODED_CLASS, Gender.WOMAN, dirs["male_target"], config.target_count),
        (FEMALE_CODED_CLASS, Gender.MAN, dirs["female_target"], config.target_count),
        (FEMALE_CODED_CLASS, Gender.WOMAN, dirs["female_target"], config.target_count),
    ]
    records: list[EmbeddingRecord] = []
    for class_label, gender, direction, count in plan:
        rng = np.random.default_rng([config.seed, _STREAMS[(class_label, gender)]])
        for i in range(count):
            records.append(
                EmbeddingRecord(
                    id=f"{class_label}-{gender.value}-{i:04d}",
                    vec=_draw(direction, config, rng),
                    gender=gender,
                    class_label=class_label,
                    masked=False,
                    model="synth",
                    family=Family.CNN,
                    variant=Variant.UNBIASED,
                    iteration=1,
                )
            )
    return records


def expected_iias(config: SynthConfig, n_samples: int = 2000) -> float:
    """Association score the male-coded class should show for this config.

    Closed form when ``noise`` is zero; otherwise a Monte-Carlo estimate over
    ``n_samples`` draws (see :func:`expected_iias_mc` for the standard
    error).
    """
    if config.noise == 0.0:
        dirs = _directions(config)
        t = dirs["male_target"]
        return cosine_similarity(t, dirs["attr_a"]) - cosine_similarity(t, dirs["attr_b"])
    value, _ = expected_iias_mc(config, n_samples)
    return value


def expected_iias_mc(config: SynthConfig, n_samples: int = 2000) -> tuple[float, float]:
    """Monte-Carlo estimate (mean, standard error) of the male-coded class
    association score under the configured noise."""
    dirs = _directions(config)
    rng = np.random.default_rng([config.seed, 7001])
    scores = []
    for _ in range(n_samples):
        w = np.asarray(_draw(dirs["male_target"], config, rng))
        a = np.asarray(_draw(dirs["attr_a"], config, rng))
        b = np.asarray(_draw(dirs["attr_b"], config, rng))
        scores.append(cosine_similarity(w, a) - cosine_similarity(w, b))
    mean = float(np.mean(scores))
    stderr = float(np.std(scores, ddof=1) / math.sqrt(len(scores)))
    return mean, stderr


def pool_manifest(config: SynthConfig, iterations: int = 1) -> DatasetManifest:
    """Manifest matching a generated pool, splitting it into ``iterations``
    disjoint per-iteration samples."""
    if iterations < 1:
        raise DomainError(f"iterations must be >= 1, got {iterations}")
    attr_size = config.attribute_count // iterations
    target_size = config.target_count // iterations
    if attr_size < 1 or target_size < 1:
        raise DomainError(
            f"pool too small to split into {iterations} iterations "
            f"(attribute_count={config.attribute_count}, target_count={config.target_count})"
        )
    return DatasetManifest(
        attribute_size=attr_size,
        targets={MALE_CODED_CLASS: target_size, FEMALE_CODED_CLASS: target_size},
        iterations=iterations,
        masked=False,
        attribute_class=ATTRIBUTE_CLASS,
    )
