"""Result tables, text rendering, and replication of the reference study.

The four table shapes mirror the audit's outputs: per-model accuracy
differences, per-class association scores with absolute totals, zero-shot
occurrence concentration, and prediction skewness. Family-average rows and
percent-increase annotations are always computed from the table's own cells.

``replicate_reference`` rebuilds every aggregate cell of the bundled
reference-study results from per-model fixture files shipped in the ingest
formats, and reports pass/fail per cell at fixed tolerances. Because the
published values round inconsistently, a cell also passes when the computed
value rounds to the published one at its printed precision.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .core import DomainError, Family, Gender, Variant
from .ingest import (
    default_vocabulary,
    load_accuracy_runs,
    load_embeddings,
    load_manifest,
    load_predictions,
)
from .metrics import (
    AssociationResult,
    ModelDelta,
    aggregate_mean,
    iias_protocol_run,
    percent_increase,
    summarize_accuracy_runs,
    total_absolute_iias,
)
from .zeroshot import (
    ConcentrationResult,
    build_distribution,
    family_comparison,
    skewness,
    topk_occurrence,
)

_REFERENCE_DIR = Path(__file__).resolve().parent / "data" / "reference"
_REPLICATION_SEED = 0

TABLE_KINDS = ("accuracy-difference", "iias", "zeroshot-occurrence", "zeroshot-skewness")


@dataclass(frozen=True)
class TableRow:
    label: str
    values: Mapping[str, object]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", dict(self.values))


@dataclass(frozen=True)
class Annotation:
    """Percent-increase marker attached to one (row, column) cell."""

    row: str
    column: str
    percent: float
    direction: str = "up"


@dataclass(frozen=True)
class ReportTable:
    kind: str
    columns: tuple[str, ...]
    rows: tuple[TableRow, ...] = ()
    family_rows: tuple[TableRow, ...] = ()
    annotations: tuple[Annotation, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in TABLE_KINDS:
            raise ValueError(f"unknown table kind {self.kind!r}")


def _annotation_text(ann: Annotation) -> str:
    arrow = "↑" if ann.direction == "up" else "↓"
    return f"({int(ann.percent)}% {arrow})"  # whole percents, truncated


def _format_cell(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


def render(table: ReportTable, fmt: str = "md") -> str:
    """Render a table as markdown (display-rounded) or CSV (full precision)."""
    if fmt not in ("md", "csv"):
        raise DomainError(f"format must be 'md' or 'csv', got {fmt!r}")
    ann_by_cell = {(a.row, a.column): a for a in table.annotations}
    all_rows = [("row", r) for r in table.rows] + [("family", r) for r in table.family_rows]

    if fmt == "md":
        lines = ["| " + " | ".join(table.columns) + " |",
                 "| " + " | ".join("---" for _ in table.columns) + " |"]
        for _, row in all_rows:
            cells = [row.label]
            for col in table.columns[1:]:
                text = _format_cell(row.values.get(col))
                ann = ann_by_cell.get((row.label, col))
                if ann is not None:
                    text = f"{text} {_annotation_text(ann)}".strip()
                cells.append(text)
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"

    annotated_columns = sorted({a.column for a in table.annotations})
    header = list(table.columns) + ["row_type"]
    header += [f"{col}_increase_percent" for col in annotated_columns]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row_type, row in all_rows:
        cells: list[object] = [row.label]
        for col in table.columns[1:]:
            value = row.values.get(col)
            cells.append(repr(value) if isinstance(value, float) else ("" if value is None else value))
        cells.append(row_type)
        for col in annotated_columns:
            ann = ann_by_cell.get((row.label, col))
            cells.append(repr(ann.percent) if ann is not None else "")
        writer.writerow(cells)
    return buf.getvalue()


def _family_annotations(
    row_labels: Mapping[Family, str], columns: Iterable[str],
    values: Mapping[Family, Mapping[str, float]],
) -> list[Annotation]:
    """Annotate the higher family's cell with its increase over the lower."""
    annotations = []
    for col in columns:
        cnn, vit = values[Family.CNN][col], values[Family.VIT][col]
        if cnn == vit or min(cnn, vit) <= 0:
            continue
        hi_family = Family.VIT if vit > cnn else Family.CNN
        hi, lo = max(cnn, vit), min(cnn, vit)
        annotations.append(
            Annotation(row=row_labels[hi_family], column=col, percent=percent_increase(hi, lo))
        )
    return annotations


def build_accuracy_difference_table(model_deltas: Sequence[ModelDelta]) -> ReportTable:
    """Per-model mean deltas with family averages and increase annotations."""
    columns = ("model", "family", "mean_delta", "mean_percent_delta")
    ordered = sorted(model_deltas, key=lambda m: (m.family, m.model))
    rows = tuple(
        TableRow(
            m.model,
            {"family": m.family.value, "mean_delta": m.mean_delta,
             "mean_percent_delta": m.mean_percent_delta},
        )
        for m in ordered
    )
    family_rows = []
    family_values: dict[Family, dict[str, float]] = {}
    labels = {Family.CNN: "cnn average", Family.VIT: "vit average"}
    for family in (Family.CNN, Family.VIT):
        members = [m for m in ordered if m.family == family]
        if not members:
            raise DomainError(f"no models in family {family.value!r}")
        family_values[family] = {
            "mean_delta": aggregate_mean([m.mean_delta for m in members]),
            "mean_percent_delta": aggregate_mean([m.mean_percent_delta for m in members]),
        }
        family_rows.append(
            TableRow(labels[family], {"family": family.value, **family_values[family]})
        )
    annotations = _family_annotations(labels, ("mean_delta", "mean_percent_delta"), family_values)
    return ReportTable(
        kind="accuracy-difference",
        columns=columns,
        rows=rows,
        family_rows=tuple(family_rows),
        annotations=tuple(annotations),
    )


def _iias_column(condition: str, variant: Variant, family: Family) -> str:
    return f"{condition}_{variant.value}_{family.value}"


def build_iias_table(results: Sequence[AssociationResult]) -> ReportTable:
    """Per-class association scores with absolute totals and increase markers."""
    if not results:
        return ReportTable(kind="iias", columns=("class",))
    combos = sorted(
        {(r.condition, r.variant, r.family) for r in results},
        key=lambda c: (c[0], c[1].value, c[2].value),
    )
    columns = ("class",) + tuple(_iias_column(*c) for c in combos)
    by_cell = {(r.class_label, r.condition, r.variant, r.family): r.iias for r in results}
    classes = sorted({r.class_label for r in results})

    rows = tuple(
        TableRow(
            cls,
            {_iias_column(*c): by_cell.get((cls, *c)) for c in combos},
        )
        for cls in classes
    )
    totals = {
        _iias_column(*c): total_absolute_iias(
            [by_cell[(cls, *c)] for cls in classes if (cls, *c) in by_cell]
        )
        for c in combos
    }
    total_row = TableRow("total_absolute_iias", totals)

    annotations = []
    for condition in sorted({c[0] for c in combos}):
        for variant in (Variant.BIASED, Variant.UNBIASED):
            pair = {
                family: totals.get(_iias_column(condition, variant, family))
                for family in (Family.CNN, Family.VIT)
            }
            if None in pair.values():
                continue
            if pair[Family.CNN] == pair[Family.VIT] or min(pair.values()) <= 0:
                continue
            hi_family = max(pair, key=pair.get)
            lo = min(pair.values())
            annotations.append(
                Annotation(
                    row="total_absolute_iias",
                    column=_iias_column(condition, variant, hi_family),
                    percent=percent_increase(pair[hi_family], lo),
                )
            )
    return ReportTable(
        kind="iias",
        columns=columns,
        rows=rows,
        family_rows=(total_row,),
        annotations=tuple(annotations),
    )


def build_occurrence_table(
    cells: Sequence[tuple[str, Family, ConcentrationResult, ConcentrationResult]],
) -> ReportTable:
    """Top-k concentration per encoder: (encoder, family, man, woman) cells."""
    columns = (
        "encoder", "family",
        "man_occurrence", "man_top_labels",
        "woman_occurrence", "woman_top_labels",
    )
    ordered = sorted(cells, key=lambda c: (c[1], c[0]))
    rows = tuple(
        TableRow(
            encoder,
            {
                "family": family.value,
                "man_occurrence": man.occurrence_percent,
                "man_top_labels": ", ".join(man.top_labels),
                "woman_occurrence": woman.occurrence_percent,
                "woman_top_labels": ", ".join(woman.top_labels),
            },
        )
        for encoder, family, man, woman in ordered
    )
    labels = {Family.CNN: "cnn average", Family.VIT: "vit average"}
    family_values: dict[Family, dict[str, float]] = {}
    family_rows = []
    for family in (Family.CNN, Family.VIT):
        members = [c for c in ordered if c[1] == family]
        if not members:
            raise DomainError(f"no encoders in family {family.value!r}")
        family_values[family] = {
            "man_occurrence": aggregate_mean([m[2].occurrence_percent for m in members]),
            "woman_occurrence": aggregate_mean([m[3].occurrence_percent for m in members]),
        }
        family_rows.append(
            TableRow(labels[family], {"family": family.value, **family_values[family]})
        )
    annotations = _family_annotations(
        labels, ("man_occurrence", "woman_occurrence"), family_values
    )
    return ReportTable(
        kind="zeroshot-occurrence",
        columns=columns,
        rows=rows,
        family_rows=tuple(family_rows),
        annotations=tuple(annotations),
    )


def build_skewness_table(
    cells: Sequence[tuple[str, Family, float, float]],
) -> ReportTable:
    """Prediction skewness per encoder: (encoder, family, man, woman) cells."""
    columns = ("encoder", "family", "man_skewness", "woman_skewness")
    ordered = sorted(cells, key=lambda c: (c[1], c[0]))
    rows = tuple(
        TableRow(
            encoder,
            {"family": family.value, "man_skewness": man, "woman_skewness": woman},
        )
        for encoder, family, man, woman in ordered
    )
    labels = {Family.CNN: "cnn average", Family.VIT: "vit average"}
    family_values: dict[Family, dict[str, float]] = {}
    family_rows = []
    for family in (Family.CNN, Family.VIT):
        members = [c for c in ordered if c[1] == family]
        if not members:
            raise DomainError(f"no encoders in family {family.value!r}")
        family_values[family] = {
            "man_skewness": aggregate_mean([m[2] for m in members]),
            "woman_skewness": aggregate_mean([m[3] for m in members]),
        }
        family_rows.append(
            TableRow(labels[family], {"family": family.value, **family_values[family]})
        )
    annotations = _family_annotations(labels, ("man_skewness", "woman_skewness"), family_values)
    return ReportTable(
        kind="zeroshot-skewness",
        columns=columns,
        rows=rows,
        family_rows=tuple(family_rows),
        annotations=tuple(annotations),
    )


# ---------------------------------------------------------------------------
# Reference-study replication
# ---------------------------------------------------------------------------
# Published values of the reference study, kept as printed strings so each
# cell's displayed precision is known. The bundled fixture files reproduce the
# per-model cells through the regular ingest/metrics pipelines; everything
# aggregate is recomputed and compared against these.

_PUBLISHED_MODEL_DELTAS: dict[str, tuple[str, str, str]] = {
    # model: (family, mean delta, mean percent delta)
    "inception": ("cnn", "0.1", "15"),
    "resnet152": ("cnn", "0.18", "24.24"),
    "vgg16": ("cnn", "0.1", "18.36"),
    "xception": ("cnn", "0.06", "10"),
    "vit_b16": ("vit", "0.17", "39.19"),
    "vit_b32": ("vit", "0.18", "39"),
    "vit_l16": ("vit", "0.13", "31"),
    "vit_l32": ("vit", "0.2", "42"),
}
_PUBLISHED_DELTA_AGGREGATES = {
    "cnn/average_delta": "0.11",
    "vit/average_delta": "0.17",
    "cnn/average_percent_delta": "16.88",
    "vit/average_percent_delta": "37.8",
}
_PUBLISHED_DELTA_INCREASES = {"delta_increase": "54", "percent_delta_increase": "123"}

_ASSOCIATION_CLASSES = ("ceo", "engineer", "nurse", "school_teacher")
_PUBLISHED_ASSOCIATION: dict[tuple[str, str, str], tuple[str, str, str, str]] = {
    # (condition, variant, family): per-class scores in _ASSOCIATION_CLASSES order
    ("masked", "biased", "cnn"): ("0.059", "0.23", "-0.14", "-0.17"),
    ("masked", "biased", "vit"): ("0.1", "0.14", "-0.35", "-0.15"),
    ("masked", "unbiased", "cnn"): ("0.26", "0.36", "-0.05", "-0.12"),
    ("masked", "unbiased", "vit"): ("0.02", "0.17", "-0.2", "-0.05"),
    ("unmasked", "biased", "cnn"): ("0.05", "0.18", "-0.21", "-0.02"),
    ("unmasked", "biased", "vit"): ("0.17", "0.19", "-0.21", "-0.4"),
    ("unmasked", "unbiased", "cnn"): ("0.07", "0.04", "-0.06", "-0.04"),
    ("unmasked", "unbiased", "vit"): ("0.06", "0.21", "-0.17", "-0.14"),
}
_PUBLISHED_ASSOCIATION_TOTALS = {
    ("masked", "biased", "cnn"): "0.599",
    ("masked", "biased", "vit"): "0.74",
    ("masked", "unbiased", "cnn"): "0.79",
    ("masked", "unbiased", "vit"): "0.44",
    ("unmasked", "biased", "cnn"): "0.46",
    ("unmasked", "biased", "vit"): "0.97",
    ("unmasked", "unbiased", "cnn"): "0.21",
    ("unmasked", "unbiased", "vit"): "0.58",
}
_PUBLISHED_ASSOCIATION_INCREASES = {
    # (condition, variant): (higher family, published increase)
    ("masked", "biased"): ("vit", "23"),
    ("masked", "unbiased"): ("cnn", "80"),
    ("unmasked", "biased"): ("vit", "111"),
    ("unmasked", "unbiased"): ("vit", "176"),
}

_PUBLISHED_OCCURRENCE: dict[tuple[str, str], tuple[str, tuple[str, ...]]] = {
    # (encoder, gender): (occurrence percent, top-3 labels)
    ("rn50", "man"): ("47", ("mathematician", "psychiatrist", "youtuber")),
    ("rn50", "woman"): ("49", ("beautician", "student", "housekeeper")),
    ("rn50x4", "man"): ("46", ("investment banker", "economist", "coach")),
    ("rn50x4", "woman"): ("56", ("housekeeper", "jewellery maker", "midwife")),
    ("vit_b16", "man"): ("50", ("coach", "psychiatrist", "administrator")),
    ("vit_b16", "woman"): ("54", ("midwife", "beautician", "jewellery maker")),
    ("vit_b32", "man"): ("45", ("chief executive officer", "musician", "hairdresser")),
    ("vit_b32", "woman"): ("63", ("beautician", "housekeeper", "jewellery maker")),
}
_PUBLISHED_OCCURRENCE_AGGREGATES = {
    "cnn/man/average": "46.5",
    "cnn/woman/average": "52.5",
    "vit/man/average": "48",
    "vit/woman/average": "59",
}
_PUBLISHED_OCCURRENCE_INCREASES = {"man": "3.3", "woman": "12.53"}

_PUBLISHED_SKEWNESS: dict[tuple[str, str], str] = {
    ("rn50", "man"): "2.27",
    ("rn50", "woman"): "3.6",
    ("rn50x4", "man"): "2.06",
    ("rn50x4", "woman"): "3.84",
    ("vit_b16", "man"): "2.54",
    ("vit_b16", "woman"): "3.75",
    ("vit_b32", "man"): "2.73",
    ("vit_b32", "woman"): "4.26",
}
_PUBLISHED_SKEWNESS_AGGREGATES = {
    "cnn/man/average": "2.16",
    "vit/man/average": "2.63",
    "cnn/woman/average": "3.7",
    "vit/woman/average": "4",
}
_PUBLISHED_SKEWNESS_INCREASES = {"man": "21.7", "woman": "8"}

_ENCODER_FAMILIES = {
    "rn50": Family.CNN,
    "rn50x4": Family.CNN,
    "vit_b16": Family.VIT,
    "vit_b32": Family.VIT,
}

# the published values are reproducible only when skewness is measured over
# the labels that actually occur, so the replication pipeline uses that mode
_SKEWNESS_NOTE = "skewness measured over observed labels (zero counts excluded)"
_OCCURRENCE_INCREASE_NOTE = (
    "published increase does not follow from the published means "
    "(recomputation shown); informational only"
)


@dataclass(frozen=True)
class CellCheck:
    """One replicated cell: computed vs published, with its verdict."""

    table: str
    cell: str
    computed: object
    expected: object
    tolerance: float | None
    status: str  # pass | fail | info
    note: str = ""


def _printed_decimals(printed: str) -> int:
    return len(printed.split(".")[1]) if "." in printed else 0


def _check_number(
    table: str, cell: str, computed: float, printed: str, tolerance: float, note: str = ""
) -> CellCheck:
    expected = float(printed)
    within = abs(computed - expected) <= tolerance
    rounds_to = abs(round(computed, _printed_decimals(printed)) - expected) <= 1e-9
    return CellCheck(
        table=table,
        cell=cell,
        computed=computed,
        expected=expected,
        tolerance=tolerance,
        status="pass" if (within or rounds_to) else "fail",
        note=note,
    )


def _check_text(table: str, cell: str, computed: str, expected: str, note: str = "") -> CellCheck:
    return CellCheck(
        table=table,
        cell=cell,
        computed=computed,
        expected=expected,
        tolerance=None,
        status="pass" if computed == expected else "fail",
        note=note,
    )


def _info(table: str, cell: str, computed: object, expected: object, note: str) -> CellCheck:
    return CellCheck(
        table=table, cell=cell, computed=computed, expected=expected,
        tolerance=None, status="info", note=note,
    )


@dataclass(frozen=True)
class ReplicationSummary:
    cells: tuple[CellCheck, ...]

    @property
    def ok(self) -> bool:
        return all(c.status != "fail" for c in self.cells)

    @property
    def counts(self) -> dict[str, int]:
        out = {"pass": 0, "fail": 0, "info": 0}
        for c in self.cells:
            out[c.status] += 1
        return out

    def to_text(self) -> str:
        counts = self.counts
        lines = [
            f"replication: {counts['pass']} passed, {counts['fail']} failed, "
            f"{counts['info']} informational"
        ]
        for c in self.cells:
            computed = f"{c.computed:.6g}" if isinstance(c.computed, float) else str(c.computed)
            expected = f"{c.expected:.6g}" if isinstance(c.expected, float) else str(c.expected)
            tol = f" tol={c.tolerance:g}" if c.tolerance is not None else ""
            note = f"  ({c.note})" if c.note else ""
            lines.append(
                f"[{c.status.upper():4s}] {c.table:20s} {c.cell:40s} "
                f"computed={computed} published={expected}{tol}{note}"
            )
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["table", "cell", "computed", "published", "tolerance", "status", "note"])
        for c in self.cells:
            writer.writerow([
                c.table,
                c.cell,
                repr(c.computed) if isinstance(c.computed, float) else c.computed,
                repr(c.expected) if isinstance(c.expected, float) else c.expected,
                "" if c.tolerance is None else repr(c.tolerance),
                c.status,
                c.note,
            ])
        return buf.getvalue()


def _replicate_accuracy(cells: list[CellCheck]) -> None:
    runs = load_accuracy_runs(_REFERENCE_DIR / "accuracy_runs.csv")
    summaries = summarize_accuracy_runs(runs)
    by_model = {m.model: m for m in summaries}
    for model, (family, delta_str, pct_str) in _PUBLISHED_MODEL_DELTAS.items():
        summary = by_model[model]
        cells.append(_check_number(
            "accuracy_difference", f"{model}/mean_delta", summary.mean_delta, delta_str, 0.005
        ))
        cells.append(_check_number(
            "accuracy_difference", f"{model}/mean_percent_delta",
            summary.mean_percent_delta, pct_str, 0.005,
        ))

    means: dict[Family, dict[str, float]] = {}
    for family in (Family.CNN, Family.VIT):
        members = [m for m in summaries if m.family == family]
        means[family] = {
            "delta": aggregate_mean([m.mean_delta for m in members]),
            "percent": aggregate_mean([m.mean_percent_delta for m in members]),
        }
        cells.append(_check_number(
            "accuracy_difference", f"{family.value}/average_delta",
            means[family]["delta"], _PUBLISHED_DELTA_AGGREGATES[f"{family.value}/average_delta"],
            0.05,
        ))
        cells.append(_check_number(
            "accuracy_difference", f"{family.value}/average_percent_delta",
            means[family]["percent"],
            _PUBLISHED_DELTA_AGGREGATES[f"{family.value}/average_percent_delta"], 0.05,
        ))
    cells.append(_check_number(
        "accuracy_difference", "delta_increase",
        percent_increase(means[Family.VIT]["delta"], means[Family.CNN]["delta"]),
        _PUBLISHED_DELTA_INCREASES["delta_increase"], 1.0,
    ))
    cells.append(_check_number(
        "accuracy_difference", "percent_delta_increase",
        percent_increase(means[Family.VIT]["percent"], means[Family.CNN]["percent"]),
        _PUBLISHED_DELTA_INCREASES["percent_delta_increase"], 1.0,
    ))


def _replicate_association(cells: list[CellCheck]) -> None:
    records = load_embeddings(_REFERENCE_DIR / "association_pool.embj")
    results: list[AssociationResult] = []
    for condition in ("masked", "unmasked"):
        manifest = load_manifest(_REFERENCE_DIR / f"association_{condition}.manifest")
        results.extend(iias_protocol_run(records, manifest, seed=_REPLICATION_SEED))

    by_cell = {(r.condition, r.variant.value, r.family.value, r.class_label): r.iias for r in results}
    totals: dict[tuple[str, str, str], float] = {}
    for combo, printed_scores in _PUBLISHED_ASSOCIATION.items():
        condition, variant, family = combo
        per_class = []
        for cls, printed in zip(_ASSOCIATION_CLASSES, printed_scores):
            computed = by_cell[(condition, variant, family, cls)]
            per_class.append(computed)
            cells.append(_check_number(
                "association", f"{condition}/{variant}/{family}/{cls}", computed, printed, 0.001
            ))
        totals[combo] = total_absolute_iias(per_class)
        cells.append(_check_number(
            "association", f"{condition}/{variant}/{family}/total",
            totals[combo], _PUBLISHED_ASSOCIATION_TOTALS[combo], 0.001,
        ))
    for (condition, variant), (hi_family, printed) in _PUBLISHED_ASSOCIATION_INCREASES.items():
        lo_family = "cnn" if hi_family == "vit" else "vit"
        increase = percent_increase(
            totals[(condition, variant, hi_family)], totals[(condition, variant, lo_family)]
        )
        cells.append(_check_number(
            "association", f"{condition}/{variant}/increase_{hi_family}_over_{lo_family}",
            increase, printed, 1.0,
        ))


def _replicate_zeroshot(cells: list[CellCheck]) -> None:
    vocab = default_vocabulary()
    log = load_predictions(_REFERENCE_DIR / "predictions.csv", vocab)

    occurrences: list[tuple[str, Family, str, float]] = []
    skews: list[tuple[str, Family, str, float]] = []
    for encoder, family in _ENCODER_FAMILIES.items():
        for gender in (Gender.MAN, Gender.WOMAN):
            dist = build_distribution(log, encoder, gender, vocab)
            conc = topk_occurrence(dist, k=3)
            printed_occ, printed_labels = _PUBLISHED_OCCURRENCE[(encoder, gender.value)]
            cells.append(_check_number(
                "occurrence", f"{encoder}/{gender.value}", conc.occurrence_percent,
                printed_occ, 0.005,
            ))
            cells.append(_check_text(
                "occurrence", f"{encoder}/{gender.value}/top_labels",
                ", ".join(conc.top_labels), ", ".join(printed_labels),
            ))
            occurrences.append((encoder, family, gender.value, conc.occurrence_percent))

            skew = skewness(dist, include_zero_counts=False)
            cells.append(_check_number(
                "skewness", f"{encoder}/{gender.value}", skew,
                _PUBLISHED_SKEWNESS[(encoder, gender.value)], 0.005, note=_SKEWNESS_NOTE,
            ))
            skews.append((encoder, family, gender.value, skew))

    for table, rows, aggregates, increases, increase_tol, agg_tol in (
        ("occurrence", occurrences, _PUBLISHED_OCCURRENCE_AGGREGATES,
         _PUBLISHED_OCCURRENCE_INCREASES, None, None),
        ("skewness", skews, _PUBLISHED_SKEWNESS_AGGREGATES,
         _PUBLISHED_SKEWNESS_INCREASES, 0.5, 0.01),
    ):
        for gender in ("man", "woman"):
            comparison = family_comparison(
                (enc, fam, value) for enc, fam, g, value in rows if g == gender
            )
            for family, mean in (("cnn", comparison.cnn_mean), ("vit", comparison.vit_mean)):
                printed = aggregates[f"{family}/{gender}/average"]
                if agg_tol is None:
                    # published CNN means are exact; published ViT means round
                    # the computed halves up, so they get a one-point window
                    tol = 1e-6 if family == "cnn" else 1.0
                else:
                    tol = agg_tol
                cells.append(_check_number(
                    table, f"{family}/{gender}/average", mean, printed, tol
                ))
            if increase_tol is None:
                cells.append(_info(
                    table, f"{gender}/vit_increase", comparison.vit_over_cnn_percent,
                    float(increases[gender]), _OCCURRENCE_INCREASE_NOTE,
                ))
            else:
                cells.append(_check_number(
                    table, f"{gender}/vit_increase", comparison.vit_over_cnn_percent,
                    increases[gender], increase_tol,
                ))


def replicate_reference() -> ReplicationSummary:
    """Recompute every aggregate of the reference study from bundled fixtures.

    Self-contained: needs no network, models, or external data. Mismatched
    cells are reported, not raised.
    """
    cells: list[CellCheck] = []
    _replicate_accuracy(cells)
    _replicate_association(cells)
    _replicate_zeroshot(cells)
    return ReplicationSummary(tuple(cells))
