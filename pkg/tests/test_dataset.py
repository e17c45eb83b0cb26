import numpy as np
import pytest
from numpy.testing import assert_allclose

from branchline import dataset as ds
from branchline.couplers import bounds_arrays
from branchline.errors import SchemaError, ValidationError
from branchline.microstrip import Substrate

SUB_THIN = Substrate(2.2, 0.0009, 0.508)


def make_records(n, d=5, seed=0):
    rng = np.random.default_rng(seed)
    return [
        ds.SampleRecord(
            x=rng.uniform(1.0, 2.0, d),
            f=float(rng.uniform(0.8, 1.7)),
            y=rng.uniform(-40.0, 40.0, 6),
        )
        for _ in range(n)
    ]


def dataset_equal(a, b):
    if a.kind != b.kind or len(a.records) != len(b.records):
        return False
    for ra, rb in zip(a.records, b.records):
        if not (
            np.array_equal(ra.x, rb.x)
            and ra.f == rb.f
            and np.array_equal(ra.y, rb.y)
        ):
            return False
    return True


class TestLhs:
    def test_stratification(self):
        for seed in (0, 1, 2):
            pts = ds.lhs_sample(np.array([[0.0, 1.0]]), 4, seed)[:, 0]
            occupied = sorted(int(p * 4) for p in pts)
            assert occupied == [0, 1, 2, 3]

    def test_stratification_multidim(self):
        bounds = np.array([[0.0, 1.0], [10.0, 20.0], [-5.0, 5.0]])
        n = 17
        pts = ds.lhs_sample(bounds, n, 9)
        for j, (lo, hi) in enumerate(bounds):
            strata = sorted(int((p - lo) / (hi - lo) * n) for p in pts[:, j])
            assert strata == list(range(n))

    def test_deterministic(self):
        bounds = np.array([[0.0, 1.0], [2.0, 3.0]])
        assert np.array_equal(ds.lhs_sample(bounds, 8, 5), ds.lhs_sample(bounds, 8, 5))

    def test_single_point(self):
        pts = ds.lhs_sample(np.array([[2.0, 4.0]]), 1, 0)
        assert 2.0 <= pts[0, 0] <= 4.0

    def test_invalid_bounds(self):
        with pytest.raises(ValidationError):
            ds.lhs_sample(np.array([[1.0, 1.0]]), 4, 0)
        with pytest.raises(ValidationError):
            ds.lhs_sample(np.array([[0.0, 1.0]]), 0, 0)


class TestGenerate:
    def test_counts_and_bounds(self):
        d = ds.generate("folded", SUB_THIN, 50, (0.8, 1.7), seed=7)
        assert len(d.records) == 50
        lo, hi = bounds_arrays("folded")
        for r in d.records:
            assert np.all(r.x >= lo) and np.all(r.x <= hi)
            assert 0.8 <= r.f <= 1.7
            assert np.all(np.isfinite(r.y))
            assert -180.0 < r.y[4] <= 180.0
            assert -180.0 < r.y[5] <= 180.0

    def test_power_conservation(self):
        d = ds.generate("folded", SUB_THIN, 30, (0.8, 1.7), seed=3)
        for r in d.records:
            mags = 10.0 ** (r.y[:4] / 20.0)
            assert abs(np.sum(mags**2) - 1.0) < 1e-6

    def test_deterministic(self):
        a = ds.generate("folded", SUB_THIN, 25, (0.8, 1.7), seed=11)
        b = ds.generate("folded", SUB_THIN, 25, (0.8, 1.7), seed=11)
        assert dataset_equal(a, b)

    def test_kind_validation(self):
        with pytest.raises(ValidationError):
            ds.generate("classical", SUB_THIN, 25, (0.8, 1.7), seed=0)

    def test_minimum_count(self):
        with pytest.raises(ValidationError):
            ds.generate("folded", SUB_THIN, 5, (0.8, 1.7), seed=0)


class TestSplit:
    def test_flooring_rule(self):
        d = ds.Dataset("folded", make_records(500), ds.compute_stats(make_records(500)))
        train, test = ds.split(d, 1.0 / 6.0, seed=0)
        assert len(train.records) == 417
        assert len(test.records) == 83

    def test_disjoint_exhaustive(self):
        records = make_records(60)
        d = ds.Dataset("folded", records, ds.compute_stats(records))
        train, test = ds.split(d, 1.0 / 6.0, seed=1)
        assert len(train.records) + len(test.records) == 60
        ids = {id(r) for r in records}
        out_ids = {id(r) for r in train.records} | {id(r) for r in test.records}
        assert out_ids == ids
        assert {id(r) for r in train.records}.isdisjoint({id(r) for r in test.records})

    def test_seed_deterministic(self):
        records = make_records(40)
        d = ds.Dataset("folded", records, ds.compute_stats(records))
        t1, s1 = ds.split(d, 0.25, seed=9)
        t2, s2 = ds.split(d, 0.25, seed=9)
        assert dataset_equal(t1, t2) and dataset_equal(s1, s2)

    def test_test_side_carries_train_stats(self):
        records = make_records(40)
        d = ds.Dataset("folded", records, ds.compute_stats(records))
        train, test = ds.split(d, 0.25, seed=2)
        assert np.array_equal(train.norm.in_min, test.norm.in_min)
        assert np.array_equal(train.norm.out_max, test.norm.out_max)

    def test_empty_side_rejected(self):
        records = make_records(10)
        d = ds.Dataset("folded", records, ds.compute_stats(records))
        with pytest.raises(ValidationError):
            ds.split(d, 0.01, seed=0)
        with pytest.raises(ValidationError):
            ds.split(d, 1.5, seed=0)


class TestPersistence:
    def test_round_trip(self, tmp_path):
        d = ds.generate("folded", SUB_THIN, 20, (0.8, 1.7), seed=5)
        path = tmp_path / "data.csv"
        ds.save(d, path)
        loaded = ds.load(path)
        assert dataset_equal(d, loaded)
        assert_allclose(loaded.norm.out_min, d.norm.out_min, rtol=0, atol=0)

    def test_header_canonical(self, tmp_path):
        d = ds.generate("folded", SUB_THIN, 12, (0.8, 1.7), seed=5)
        path = tmp_path / "data.csv"
        ds.save(d, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "# coupler-dataset v1 kind=folded"
        assert lines[1] == "w1,l1,w2,l2,w3,f_ghz,s11_db,s21_db,s31_db,s41_db,ph21_deg,ph31_deg"

    def test_missing_column_named(self, tmp_path):
        d = ds.generate("folded", SUB_THIN, 12, (0.8, 1.7), seed=5)
        path = tmp_path / "data.csv"
        ds.save(d, path)
        lines = path.read_text().splitlines()
        lines[1] = lines[1].replace("s41_db,", "")
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError, match="s41_db"):
            ds.load(bad)

    def test_malformed_value_reports_line(self, tmp_path):
        d = ds.generate("folded", SUB_THIN, 12, (0.8, 1.7), seed=5)
        path = tmp_path / "data.csv"
        ds.save(d, path)
        lines = path.read_text().splitlines()
        lines[4] = lines[4].replace(lines[4].split(",")[0], "oops", 1)
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(lines) + "\n")
        with pytest.raises(SchemaError, match="line 5"):
            ds.load(bad)

    def test_missing_tag(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("w1,l1\n1,2\n")
        with pytest.raises(SchemaError, match="schema tag"):
            ds.load(bad)


class TestStats:
    def test_degenerate_column_rejected(self):
        records = make_records(10)
        frozen = [
            ds.SampleRecord(x=r.x.copy(), f=1.0, y=r.y)  # constant frequency column
            for r in records
        ]
        with pytest.raises(ValidationError, match="degenerate"):
            ds.compute_stats(frozen)
