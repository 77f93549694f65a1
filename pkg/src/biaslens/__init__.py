"""biaslens: audit gender-bias amplification in vision-model architectures.

Measures three things over exported artifacts, never running inference
itself: accuracy differences between models fine-tuned on gender-balanced
and imbalanced data, image association scores of target classes against
gender attribute sets, and concentration/skewness of zero-shot prediction
logs.
"""

from .core import (
    ATTRIBUTE_CLASS,
    AccuracyRun,
    DatasetManifest,
    DomainError,
    EmbeddingRecord,
    Family,
    Gender,
    LabelVocabulary,
    PredictionLog,
    PredictionRecord,
    ValidationReport,
    Variant,
    Violation,
    validate_manifest,
)
from .ingest import (
    IngestError,
    default_vocabulary,
    load_accuracy_runs,
    load_embeddings,
    load_manifest,
    load_predictions,
    load_vocabulary,
    write_accuracy_runs,
    write_embeddings,
    write_manifest,
    write_predictions,
)
from .metrics import (
    AssociationResult,
    DeltaResult,
    ModelDelta,
    accuracy_difference,
    accuracy_from_labels,
    aggregate_mean,
    association_score,
    cosine_similarity,
    iias,
    iias_protocol_run,
    percent_increase,
    summarize_accuracy_runs,
    total_absolute_iias,
)
from .report import (
    Annotation,
    CellCheck,
    ReplicationSummary,
    ReportTable,
    TableRow,
    build_accuracy_difference_table,
    build_iias_table,
    build_occurrence_table,
    build_skewness_table,
    render,
    replicate_reference,
)
from .synth import (
    FEMALE_CODED_CLASS,
    MALE_CODED_CLASS,
    SynthConfig,
    expected_iias,
    expected_iias_mc,
    generate_pool,
    pool_manifest,
)
from .zeroshot import (
    ConcentrationResult,
    FamilyComparison,
    LabelDistribution,
    build_distribution,
    family_comparison,
    skewness,
    topk_occurrence,
)

__version__ = "0.1.0"
