import random
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from biaslens.core import (
    AccuracyRun,
    DatasetManifest,
    DomainError,
    EmbeddingRecord,
    Family,
    Gender,
    LabelVocabulary,
    PredictionLog,
    PredictionRecord,
    Variant,
    validate_manifest,
)

from conftest import make_record


def manifest(**overrides) -> DatasetManifest:
    kwargs = dict(attribute_size=10, targets={"ceo": 5}, iterations=1, masked=False)
    kwargs.update(overrides)
    return DatasetManifest(**kwargs)


class TestValidateManifest:
    def test_conforming_collection_is_valid(self, balanced_records):
        report = validate_manifest(manifest(), balanced_records)
        assert report.ok
        assert report.violations == ()
        assert report.summary() == "0 violations"

    def test_missing_attribute_record_reports_imbalance(self, balanced_records):
        records = [r for r in balanced_records if r.id != "am9"]
        report = validate_manifest(manifest(), records)
        assert not report.ok
        messages = [v.message for v in report.violations]
        assert any("attribute imbalance A=9 B=10" in m for m in messages)

    def test_dimension_mismatch_reported_once(self, balanced_records):
        records = balanced_records + [
            make_record("odd1", (1.0, 2.0), class_label="other"),
            make_record("odd2", (1.0, 2.0, 3.0, 4.0), class_label="other"),
        ]
        report = validate_manifest(manifest(), records)
        kinds = [v.kind for v in report.violations]
        assert kinds.count("dimension-mismatch") == 1

    def test_duplicate_ids_reported(self, balanced_records):
        records = balanced_records + [balanced_records[0]]
        report = validate_manifest(manifest(), records)
        assert any(v.kind == "duplicate-id" for v in report.violations)

    def test_zero_vector_reported(self, balanced_records):
        records = balanced_records + [make_record("z", (0.0, 0.0, 0.0), class_label="other")]
        report = validate_manifest(manifest(), records)
        assert any(v.kind == "zero-vector" for v in report.violations)

    def test_pool_too_small_for_iterations(self, balanced_records):
        report = validate_manifest(manifest(iterations=2), balanced_records)
        kinds = Counter(v.kind for v in report.violations)
        assert kinds["attribute-pool-too-small"] == 2
        assert kinds["target-pool-too-small"] == 2

    def test_missing_target_class_flagged(self, balanced_records):
        report = validate_manifest(manifest(targets={"ceo": 5, "nurse": 5}), balanced_records)
        assert any(
            v.kind == "target-pool-too-small" and "'nurse'" in v.message
            for v in report.violations
        )

    def test_masked_condition_selects_target_pool(self, balanced_records):
        report = validate_manifest(manifest(masked=True), balanced_records)
        assert any(v.kind == "target-pool-too-small" for v in report.violations)

    def test_empty_collection(self):
        report = validate_manifest(manifest(), [])
        assert [v.kind for v in report.violations] == ["empty"]

    @given(st.integers(0, 2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_order_insensitive(self, seed):
        records = []
        for i in range(10):
            records.append(make_record(f"am{i}", (1.0, 0.2), gender=Gender.MAN))
            records.append(make_record(f"aw{i}", (0.1, 1.0), gender=Gender.WOMAN))
        for i in range(4):  # deliberately unbalanced targets
            records.append(make_record(f"tm{i}", (0.9, 0.4), gender=Gender.MAN, class_label="ceo"))
        records.append(make_record("tw0", (0.8, 0.5), gender=Gender.WOMAN, class_label="ceo"))
        records.append(make_record("z", (0.0, 0.0), class_label="other"))

        baseline = validate_manifest(manifest(), records)
        shuffled = records[:]
        random.Random(seed).shuffle(shuffled)
        permuted = validate_manifest(manifest(), shuffled)
        assert Counter(baseline.violations) == Counter(permuted.violations)
        assert baseline.violations == permuted.violations  # sorted, so lists match too

    @given(
        corruption=st.sampled_from(["drop-attr", "duplicate-id", "zero-vec", "dim"]),
        index=st.integers(0, 9),
    )
    @settings(max_examples=60, deadline=None)
    def test_random_corruptions_detected(self, corruption, index):
        records = []
        for i in range(10):
            records.append(make_record(f"am{i}", (1.0, 0.2, 0.1), gender=Gender.MAN))
            records.append(make_record(f"aw{i}", (0.1, 1.0, 0.2), gender=Gender.WOMAN))
        for i in range(5):
            records.append(make_record(f"tm{i}", (0.9, 0.4, 0.1), gender=Gender.MAN, class_label="ceo"))
            records.append(make_record(f"tw{i}", (0.8, 0.5, 0.1), gender=Gender.WOMAN, class_label="ceo"))
        assert validate_manifest(manifest(), records).ok

        if corruption == "drop-attr":
            records.remove(records[2 * index])
        elif corruption == "duplicate-id":
            records.append(records[index])
        elif corruption == "zero-vec":
            records[index] = make_record(records[index].id, (0.0, 0.0, 0.0))
        elif corruption == "dim":
            source = records[index]
            records[index] = make_record(
                source.id, (1.0, 2.0), gender=source.gender, class_label=source.class_label
            )
        assert not validate_manifest(manifest(), records).ok


class TestDomainTypes:
    def test_record_normalizes_fields(self):
        rec = EmbeddingRecord(
            id="x", vec=[1, 2], gender="woman", class_label="ceo", masked=True,
            model="m", family="vit", variant="biased", iteration=3,
        )
        assert rec.vec == (1.0, 2.0)
        assert rec.gender is Gender.WOMAN
        assert rec.family is Family.VIT
        assert rec.variant is Variant.BIASED
        assert rec.dim == 2

    def test_record_rejects_unknown_tags(self):
        with pytest.raises(ValueError):
            make_record("x", (1.0,), gender="other")

    def test_manifest_invariants(self):
        with pytest.raises(ValueError):
            DatasetManifest(attribute_size=0, targets={"ceo": 5})
        with pytest.raises(ValueError):
            DatasetManifest(attribute_size=10, targets={})
        with pytest.raises(ValueError):
            DatasetManifest(attribute_size=10, targets={"ceo": 5}, iterations=0)
        assert manifest(masked=True).condition == "masked"
        assert manifest().condition == "unmasked"

    def test_accuracy_run_invariants(self):
        run = AccuracyRun("m", Family.CNN, Variant.BIASED, 1, 0.5)
        assert run.key == ("m", Variant.BIASED, 1)
        with pytest.raises(ValueError):
            AccuracyRun("m", Family.CNN, Variant.BIASED, 1, 1.2)
        with pytest.raises(ValueError):
            AccuracyRun("m", Family.CNN, Variant.BIASED, 0, 0.5)

    def test_vocabulary_invariants(self):
        vocab = LabelVocabulary(("nurse", "ceo"))
        assert "nurse" in vocab and "pilot" not in vocab
        assert len(vocab) == 2
        with pytest.raises(ValueError):
            LabelVocabulary(())
        with pytest.raises(ValueError):
            LabelVocabulary(("nurse", "nurse"))
        with pytest.raises(ValueError):
            LabelVocabulary(("Nurse",))

    def test_prediction_log_checks_vocabulary(self):
        vocab = LabelVocabulary(("nurse",))
        record = PredictionRecord("i1", Gender.MAN, "nurse", "rn50", Family.CNN)
        log = PredictionLog((record,), vocab)
        assert log.slice("rn50", Gender.MAN) == (record,)
        assert log.slice("rn50", Gender.WOMAN) == ()
        assert log.encoder_family("rn50") is Family.CNN
        with pytest.raises(ValueError):
            PredictionLog(
                (PredictionRecord("i1", Gender.MAN, "pilot", "rn50", Family.CNN),),
                vocab,
            )

    def test_encoder_family_conflict(self):
        vocab = LabelVocabulary(("nurse",))
        log = PredictionLog(
            (
                PredictionRecord("i1", Gender.MAN, "nurse", "rn50", Family.CNN),
                PredictionRecord("i2", Gender.MAN, "nurse", "rn50", Family.VIT),
            ),
            vocab,
        )
        with pytest.raises(DomainError):
            log.encoder_family("rn50")
