import math
import random

import pytest

from botsift.errors import BelowFittedMin, EmptyFit, MalformedJson, UnlabeledRecord
from botsift.features import FEATURE_COLUMNS, FeatureVector
from botsift.ingest import Label
from botsift.normalize import (
    MINMAX,
    NormalizationStats,
    emit_csv,
    fit,
    load_csv,
    load_stats,
    save_stats,
    stats_sidecar_path,
    transform_row,
    transform_rows,
    transform_value,
)


def vec(*values: float) -> FeatureVector:
    assert len(values) == 9
    return FeatureVector(*values)


def random_vec(rng: random.Random) -> FeatureVector:
    return vec(*(rng.uniform(0, 1000) for _ in range(9)))


def test_fit_single_row_equals_that_row():
    row = vec(1, 2, 3, 4, 5, 0.5, 1, 0, 2.5)
    stats = fit([row])
    assert stats.column_mins == tuple(row)
    assert stats.column_maxs == tuple(row)
    assert stats.fitted_on == 1


def test_fit_takes_column_minimum():
    rows = [vec(3, 3, 3, 3, 3, 0.3, 1, 1, 3), vec(1, 7, 1, 7, 1, 0.1, 0, 0, 1), vec(7, 1, 7, 1, 7, 0.7, 1, 0, 7)]
    stats = fit(rows)
    assert stats.column_mins == (1, 1, 1, 1, 1, 0.1, 0, 0, 1)


def test_fit_matches_brute_force_scan():
    rng = random.Random(33)
    rows = [random_vec(rng) for _ in range(100)]
    stats = fit(rows)
    for j in range(9):
        # oracle: explicit scan over the column
        low = min(row[j] for row in rows)
        high = max(row[j] for row in rows)
        assert stats.column_mins[j] == low
        assert stats.column_maxs[j] == high


def test_fit_rejects_empty():
    with pytest.raises(EmptyFit):
        fit([])


def test_transform_value_at_min_is_zero():
    for m in (0.0, 0.5, 3.0, 100.0):
        assert transform_value(m, m) == 0.0


def test_transform_value_known_point():
    # oracle: direct high-precision evaluation of log2((3-1)/(3+1) + 1)
    assert transform_value(3.0, 1.0) == pytest.approx(0.584963, abs=1e-6)
    assert transform_value(3.0, 1.0) == pytest.approx(math.log2(1.5), abs=1e-15)


def test_transform_value_min_zero_collapses_to_one():
    for x in (1e-9, 0.5, 5.0, 1e12):
        assert transform_value(x, 0.0) == 1.0
    assert transform_value(0.0, 0.0) == 0.0


def test_transform_value_below_min_policy():
    assert transform_value(0.5, 1.0) == 0.0  # clamp by default
    with pytest.raises(BelowFittedMin):
        transform_value(0.5, 1.0, clamp=False)


def test_transform_value_range_and_monotonicity():
    rng = random.Random(55)
    for _ in range(2000):
        m = rng.uniform(0, 100)
        x1 = m + rng.uniform(0, 100)
        x2 = x1 + rng.uniform(0, 100)
        v1 = transform_value(x1, m)
        v2 = transform_value(x2, m)
        assert 0.0 <= v1 <= 1.0
        assert 0.0 <= v2 <= 1.0
        assert v2 >= v1
        if m > 0 and x2 > x1:
            assert v2 > v1


def test_transform_row_zero_vector_zero_mins():
    stats = fit([vec(0, 0, 0, 0, 0, 0, 0, 0, 0)])
    assert transform_row(vec(0, 0, 0, 0, 0, 0, 0, 0, 0), stats) == tuple([0.0] * 9)


def test_transform_row_at_mins_is_all_zero():
    rows = [vec(1, 2, 3, 4, 5, 0.1, 0, 1, 2), vec(2, 3, 4, 5, 6, 0.2, 1, 1, 3)]
    stats = fit(rows)
    assert transform_row(vec(*stats.column_mins), stats) == tuple([0.0] * 9)


def test_transform_row_matches_elementwise_loop():
    rng = random.Random(66)
    rows = [random_vec(rng) for _ in range(30)]
    stats = fit(rows)
    for row in rows:
        got = transform_row(row, stats)
        # oracle: per-element call
        expected = tuple(transform_value(x, m) for x, m in zip(row, stats.column_mins))
        assert got == expected


def test_transform_rows_counts_clamped_values():
    stats = fit([vec(1, 1, 1, 1, 1, 0.5, 1, 1, 1)])
    transformed, clamped = transform_rows([vec(0, 0, 2, 2, 2, 0.6, 1, 1, 2)], stats)
    assert clamped == 2
    assert transformed[0][0] == 0.0


def test_minmax_variant():
    rows = [vec(0, 0, 10, 1, 1, 0.0, 0, 0, 0), vec(10, 0, 20, 3, 2, 1.0, 1, 0, 4)]
    stats = fit(rows, method=MINMAX)
    got = transform_row(vec(5, 0, 15, 2, 1.5, 0.5, 0, 0, 2), stats)
    assert got[0] == pytest.approx(0.5)
    assert got[1] == 0.0  # constant column maps to 0
    assert got[2] == pytest.approx(0.5)
    assert got[8] == pytest.approx(0.5)


def test_stats_round_trip(tmp_path):
    rows = [random_vec(random.Random(67)) for _ in range(5)]
    stats = fit(rows, method=MINMAX)
    path = tmp_path / "stats.json"
    save_stats(stats, path)
    assert load_stats(path) == stats


def labeled_rows(rng: random.Random, n: int):
    return [
        (random_vec(rng), Label.BOT if rng.random() < 0.5 else Label.HUMAN)
        for _ in range(n)
    ]


def test_emit_csv_header_only_for_empty_rows(tmp_path):
    stats = fit([vec(0, 0, 0, 0, 0, 0, 0, 0, 0)])
    path = tmp_path / "out.csv"
    emit_csv([], stats, path)
    lines = path.read_text().splitlines()
    assert lines == [",".join(FEATURE_COLUMNS + ("label",))]


def test_emit_csv_line_count_and_sidecar(tmp_path):
    rng = random.Random(14)
    rows = labeled_rows(rng, 860)
    stats = fit([v for v, _ in rows])
    path = tmp_path / "out.csv"
    emit_csv(rows, stats, path)
    assert len(path.read_text().splitlines()) == 861
    assert stats_sidecar_path(path).exists()
    assert load_stats(stats_sidecar_path(path)) == stats


def test_emit_csv_round_trips_through_load_csv(tmp_path):
    rng = random.Random(15)
    rows = labeled_rows(rng, 40)
    stats = fit([v for v, _ in rows])
    path = tmp_path / "out.csv"
    emit_csv(rows, stats, path)
    values, labels = load_csv(path)
    assert len(values) == 40
    for (raw, label), got_values, got_label in zip(rows, values, labels):
        expected = transform_row(raw, stats)
        assert got_label is label
        for a, b in zip(got_values, expected):
            assert a == pytest.approx(b, abs=1e-6)


def test_emit_csv_rejects_unlabeled(tmp_path):
    stats = fit([vec(0, 0, 0, 0, 0, 0, 0, 0, 0)])
    with pytest.raises(UnlabeledRecord):
        emit_csv([(vec(0, 0, 0, 0, 0, 0, 0, 0, 0), Label.UNLABELED)], stats, tmp_path / "x.csv")


def test_load_csv_rejects_wrong_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b,c\n")
    with pytest.raises(MalformedJson):
        load_csv(path)


def test_load_csv_rejects_bad_label(tmp_path):
    path = tmp_path / "bad.csv"
    header = ",".join(FEATURE_COLUMNS + ("label",))
    path.write_text(header + "\n" + ",".join(["0.1"] * 9) + ",7\n")
    with pytest.raises(MalformedJson):
        load_csv(path)


def test_stats_validation():
    with pytest.raises(Exception):
        NormalizationStats(column_mins=(1.0,), column_maxs=(1.0,), fitted_on=1)
