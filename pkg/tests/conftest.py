import math

import pytest

from biaslens.core import EmbeddingRecord, Family, Gender, Variant


def make_record(rec_id: str, vec, **overrides) -> EmbeddingRecord:
    """Embedding record with sensible defaults for tests."""
    kwargs = dict(
        id=rec_id,
        vec=vec,
        gender=Gender.MAN,
        class_label="person",
        masked=False,
        model="m0",
        family=Family.CNN,
        variant=Variant.UNBIASED,
        iteration=1,
    )
    kwargs.update(overrides)
    return EmbeddingRecord(**kwargs)


def oracle_cosine(a, b) -> float:
    """Direct-summation cosine, independent of the numpy implementation."""
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(x * x for x in b))
    return dot / (na * nb)


def oracle_iias(targets, attrs_a, attrs_b) -> float:
    """Brute-force association score by direct summation."""
    total = 0.0
    for w in targets:
        mean_a = sum(oracle_cosine(w, a) for a in attrs_a) / len(attrs_a)
        mean_b = sum(oracle_cosine(w, b) for b in attrs_b) / len(attrs_b)
        total += mean_a - mean_b
    return total / len(targets)


def oracle_skewness(values) -> float:
    """Brute-force population moment skewness."""
    n = len(values)
    mean = sum(values) / n
    m2 = sum((x - mean) ** 2 for x in values) / n
    if m2 == 0:
        return 0.0
    m3 = sum((x - mean) ** 3 for x in values) / n
    return m3 / m2**1.5


@pytest.fixture
def balanced_records():
    """10+10 attribute records and 5+5 targets for one class, dimension 3."""
    records = []
    for i in range(10):
        records.append(make_record(f"am{i}", (1.0, 0.2, 0.1), gender=Gender.MAN))
        records.append(make_record(f"aw{i}", (0.1, 1.0, 0.2), gender=Gender.WOMAN))
    for i in range(5):
        records.append(
            make_record(f"tm{i}", (0.9, 0.4, 0.1), gender=Gender.MAN, class_label="ceo")
        )
        records.append(
            make_record(f"tw{i}", (0.8, 0.5, 0.1), gender=Gender.WOMAN, class_label="ceo")
        )
    return records
