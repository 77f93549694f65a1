"""Regenerate the bundled reference-study fixture files.

The reference study publishes per-model results; its raw data (crawled
images, fine-tuned checkpoints) is not redistributable. These fixtures
encode the published per-model values as small synthetic datasets in the
toolkit's ingest formats, so the whole pipeline (load, validate, protocol,
analysis) reproduces each published cell exactly:

* accuracy_runs.csv - per-iteration accuracies whose per-model mean delta
  and percent delta equal the published values (iterations vary by a fixed
  multiplier pattern with mean one, keeping both means exact).
* association_pool.embj + manifests - two-dimensional pools where every
  target of a class sits at the angle whose attribute-differential cosine
  equals the published class score, so any sampled subset scores the same.
* predictions.csv - 100 predictions per encoder and gender whose top-3
  share matches the published occurrence and whose observed-label count
  skewness matches the published value (found by integer search).

Run from the repository root:  python scripts/make_reference_fixtures.py
"""

from __future__ import annotations

import math
import random
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from biaslens.core import (  # noqa: E402
    ATTRIBUTE_CLASS,
    AccuracyRun,
    DatasetManifest,
    EmbeddingRecord,
    Family,
    Gender,
    LabelVocabulary,
    PredictionLog,
    PredictionRecord,
    Variant,
)
from biaslens.ingest import (  # noqa: E402
    default_vocabulary,
    write_accuracy_runs,
    write_embeddings,
    write_manifest,
    write_predictions,
)

OUT_DIR = ROOT / "src" / "biaslens" / "data" / "reference"

# published per-model mean delta and mean percent delta
MODEL_DELTAS = {
    "inception": (Family.CNN, 0.1, 15.0),
    "resnet152": (Family.CNN, 0.18, 24.24),
    "vgg16": (Family.CNN, 0.1, 18.36),
    "xception": (Family.CNN, 0.06, 10.0),
    "vit_b16": (Family.VIT, 0.17, 39.19),
    "vit_b32": (Family.VIT, 0.18, 39.0),
    "vit_l16": (Family.VIT, 0.13, 31.0),
    "vit_l32": (Family.VIT, 0.2, 42.0),
}
# per-iteration accuracy multipliers; mean is exactly one
ITERATION_SCALE = [0.96, 0.98, 1.0, 1.02, 1.04]

# published per-class association scores, averaged over models and iterations
ASSOCIATION_CLASSES = ("ceo", "engineer", "nurse", "school_teacher")
ASSOCIATION_SCORES = {
    ("masked", Variant.BIASED, Family.CNN): (0.059, 0.23, -0.14, -0.17),
    ("masked", Variant.BIASED, Family.VIT): (0.1, 0.14, -0.35, -0.15),
    ("masked", Variant.UNBIASED, Family.CNN): (0.26, 0.36, -0.05, -0.12),
    ("masked", Variant.UNBIASED, Family.VIT): (0.02, 0.17, -0.2, -0.05),
    ("unmasked", Variant.BIASED, Family.CNN): (0.05, 0.18, -0.21, -0.02),
    ("unmasked", Variant.BIASED, Family.VIT): (0.17, 0.19, -0.21, -0.4),
    ("unmasked", Variant.UNBIASED, Family.CNN): (0.07, 0.04, -0.06, -0.04),
    ("unmasked", Variant.UNBIASED, Family.VIT): (0.06, 0.21, -0.17, -0.14),
}
ITERATIONS = 5
ATTRIBUTE_SIZE = 10  # per gender per iteration
TARGET_SIZE = 5      # per gender per iteration
FAMILY_MODELS = {Family.CNN: "cnn_mean", Family.VIT: "vit_mean"}

# published zero-shot cells: occurrence percent, top-3 labels, and integer
# count vectors matching both the occurrence and the observed-label skewness
ZEROSHOT_CELLS = {
    ("rn50", Family.CNN, Gender.MAN): {
        "top_labels": ("mathematician", "psychiatrist", "youtuber"),
        "top_counts": (26, 13, 8),
        "tail": (7, 7, 7, 6, 5, 4, 4, 4, 4, 2, 2, 1),
    },
    ("rn50", Family.CNN, Gender.WOMAN): {
        "top_labels": ("beautician", "student", "housekeeper"),
        "top_counts": (24, 15, 10),
        "tail": (4, 3, 3, 3) + (2,) * 9 + (1,) * 20,
    },
    ("rn50x4", Family.CNN, Gender.MAN): {
        "top_labels": ("investment banker", "economist", "coach"),
        "top_counts": (17, 16, 13),
        "tail": (5, 5, 4, 4, 4, 4, 3, 3, 3) + (2,) * 6 + (1,) * 7,
    },
    ("rn50x4", Family.CNN, Gender.WOMAN): {
        "top_labels": ("housekeeper", "jewellery maker", "midwife"),
        "top_counts": (38, 10, 8),
        "tail": (5, 5, 4, 4, 3, 3, 3, 3, 2, 2) + (1,) * 10,
    },
    ("vit_b16", Family.VIT, Gender.MAN): {
        "top_labels": ("coach", "psychiatrist", "administrator"),
        "top_counts": (23, 18, 9),
        "tail": (4, 4, 4, 4, 4, 3, 3, 3, 3, 3, 3, 3, 2) + (1,) * 7,
    },
    ("vit_b16", Family.VIT, Gender.WOMAN): {
        "top_labels": ("midwife", "beautician", "jewellery maker"),
        "top_counts": (27, 22, 5),
        "tail": (3, 3) + (2,) * 10 + (1,) * 20,
    },
    ("vit_b32", Family.VIT, Gender.MAN): {
        "top_labels": ("chief executive officer", "musician", "hairdresser"),
        "top_counts": (21, 13, 11),
        "tail": (4, 4, 4, 4, 3, 3, 3, 3, 3, 3) + (2,) * 8 + (1,) * 5,
    },
    ("vit_b32", Family.VIT, Gender.WOMAN): {
        "top_labels": ("beautician", "housekeeper", "jewellery maker"),
        "top_counts": (41, 12, 10),
        "tail": (3,) + (2,) * 10 + (1,) * 14,
    },
}
PREDICTIONS_PER_CELL = 100


def make_accuracy_runs() -> list[AccuracyRun]:
    runs = []
    for model, (family, delta, percent) in MODEL_DELTAS.items():
        ratio = percent / 100.0
        base_unbiased = delta / ratio
        for iteration, scale in enumerate(ITERATION_SCALE, start=1):
            a_unbiased = base_unbiased * scale
            a_biased = a_unbiased * (1.0 - ratio)
            if not (0.0 < a_biased < a_unbiased <= 1.0):
                raise ValueError(f"accuracies out of range for {model}")
            runs.append(AccuracyRun(model, family, Variant.UNBIASED, iteration, a_unbiased))
            runs.append(AccuracyRun(model, family, Variant.BIASED, iteration, a_biased))
    return runs


def target_vector(score: float) -> tuple[float, float]:
    """Unit vector whose cosine gap between the two attribute axes is ``score``."""
    theta = math.acos(score / math.sqrt(2.0)) - math.pi / 4.0
    return (math.cos(theta), math.sin(theta))


def make_association_pool() -> list[EmbeddingRecord]:
    records = []
    attr_axis = {Gender.MAN: (1.0, 0.0), Gender.WOMAN: (0.0, 1.0)}
    for family, model in FAMILY_MODELS.items():
        for variant in (Variant.BIASED, Variant.UNBIASED):
            for gender, axis in attr_axis.items():
                for i in range(ITERATIONS * ATTRIBUTE_SIZE):
                    records.append(EmbeddingRecord(
                        id=f"{model}-{variant.value}-attr-{gender.value}-{i:03d}",
                        vec=axis,
                        gender=gender,
                        class_label=ATTRIBUTE_CLASS,
                        masked=False,
                        model=model,
                        family=family,
                        variant=variant,
                    ))
            for condition in ("masked", "unmasked"):
                masked = condition == "masked"
                scores = ASSOCIATION_SCORES[(condition, variant, family)]
                for cls, score in zip(ASSOCIATION_CLASSES, scores):
                    vec = target_vector(score)
                    for gender in (Gender.MAN, Gender.WOMAN):
                        for i in range(ITERATIONS * TARGET_SIZE):
                            records.append(EmbeddingRecord(
                                id=f"{model}-{variant.value}-{condition}-{cls}-{gender.value}-{i:03d}",
                                vec=vec,
                                gender=gender,
                                class_label=cls,
                                masked=masked,
                                model=model,
                                family=family,
                                variant=variant,
                            ))
    return records


def make_manifest(masked: bool) -> DatasetManifest:
    return DatasetManifest(
        attribute_size=ATTRIBUTE_SIZE,
        targets={cls: TARGET_SIZE for cls in ASSOCIATION_CLASSES},
        iterations=ITERATIONS,
        masked=masked,
    )


def make_predictions(vocab: LabelVocabulary) -> PredictionLog:
    records = []
    for (encoder, family, gender), cell in ZEROSHOT_CELLS.items():
        assert sum(cell["top_counts"]) + sum(cell["tail"]) == PREDICTIONS_PER_CELL
        assert max(cell["tail"]) < min(cell["top_counts"])
        remaining = [l for l in vocab.labels if l not in cell["top_labels"]]
        random.Random(f"{encoder}:{gender.value}").shuffle(remaining)
        labelled = list(zip(cell["top_labels"], cell["top_counts"]))
        labelled += list(zip(remaining, cell["tail"]))
        image = 0
        for label, count in labelled:
            for _ in range(count):
                image += 1
                records.append(PredictionRecord(
                    image_id=f"{gender.value}_{image:03d}",
                    gender=gender,
                    label=label,
                    encoder=encoder,
                    family=family,
                ))
    return PredictionLog(records=tuple(records), vocab=vocab)


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    write_accuracy_runs(make_accuracy_runs(), OUT_DIR / "accuracy_runs.csv")
    write_embeddings(make_association_pool(), OUT_DIR / "association_pool.embj")
    write_manifest(make_manifest(masked=True), OUT_DIR / "association_masked.manifest")
    write_manifest(make_manifest(masked=False), OUT_DIR / "association_unmasked.manifest")
    write_predictions(make_predictions(default_vocabulary()), OUT_DIR / "predictions.csv")
    for name in sorted(p.name for p in OUT_DIR.iterdir()):
        print(f"wrote {name}")


if __name__ == "__main__":
    main()
