import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tsarm.errors import ConfigError, ShapeError
from tsarm.numerics import cosine_similarity, mean_power
from tsarm.series import LabeledDataset
from tsarm.stl import (
    dataset_profile, default_periods, fold_one_period, stl_decompose, stl_spans,
)
from tsarm.synthgen import SynthConfig, gen_dataset


def test_spans():
    assert stl_spans(25) == (7, 49, 27)
    assert stl_spans(24) == (7, 47, 25)
    assert stl_spans(12, 8) == (9, 23, 13)


def test_constant_series():
    d = stl_decompose(np.full(100, 3.7), 25)
    assert np.max(np.abs(d.trend - 3.7)) < 1e-6
    assert np.max(np.abs(d.seasonal)) < 1e-6
    assert np.max(np.abs(d.residual)) < 1e-6


def test_sine_lands_in_seasonal():
    t = np.arange(200)
    x = np.sin(2 * np.pi * t / 20)
    d = stl_decompose(x, 20)
    assert mean_power(d.seasonal) / mean_power(x) >= 0.95


def test_seasonal_cycle_means_near_zero():
    r = np.random.default_rng(4)
    t = np.arange(240)
    x = 0.02 * t + np.sin(2 * np.pi * t / 24) + 0.2 * r.standard_normal(240)
    d = stl_decompose(x, 24)
    cycles = d.seasonal.reshape(-1, 24).mean(axis=1)
    assert np.all(np.abs(cycles) < 0.05 * x.std())


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32), st.integers(4, 300), st.data())
def test_reconstruction(seed, n, data):
    p = data.draw(st.integers(2, n // 2))
    x = np.random.default_rng(seed).standard_normal(n) * 10
    d = stl_decompose(x, p)
    assert np.max(np.abs(d.trend + d.seasonal + d.residual - x)) <= 1e-9
    assert d.period == p


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.floats(-50, 50).filter(lambda c: abs(c) > 1e-3))
def test_linearity(seed, c):
    x = np.random.default_rng(seed).standard_normal(80)
    a = stl_decompose(x, 10)
    b = stl_decompose(c * x, 10)
    scale = abs(c) * np.max(np.abs(x))
    for u, v in ((a.trend, b.trend), (a.seasonal, b.seasonal), (a.residual, b.residual)):
        assert np.max(np.abs(c * u - v)) <= 1e-6 * scale


def test_too_short_and_bad_period():
    with pytest.raises(ConfigError):
        stl_decompose(np.arange(10.0), 6)
    with pytest.raises(ConfigError):
        stl_decompose(np.arange(10.0), 1)


def test_default_periods():
    assert default_periods(256) == [128, 64, 32, 16]
    assert default_periods(100) == [50, 25, 12, 6]
    assert default_periods(20) == [10, 5, 2]
    assert default_periods(5) == [2]


def test_fold_complete_cycles_only():
    s = np.array([1.0, 2, 3, 5, 6, 7, 100])
    assert np.allclose(fold_one_period(s, 3), [3, 4, 5])
    with pytest.raises(ShapeError):
        fold_one_period(s[:2], 3)


def test_csv_export(tmp_path):
    x = np.random.default_rng(0).standard_normal(30)
    stl_decompose(x, 5).to_csv(tmp_path / "d.csv", x)
    rows = (tmp_path / "d.csv").read_text().splitlines()
    assert rows[0] == "t,input,trend,seasonal,residual" and len(rows) == 31
    vals = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
    assert np.max(np.abs(vals[:, 2] + vals[:, 3] + vals[:, 4] - vals[:, 1])) < 1e-9


class TestProfile:
    def test_identical_samples(self):
        x = np.random.default_rng(2).standard_normal(60)
        prof = dataset_profile(np.stack([x] * 4), [10])[0]
        d = stl_decompose(x, 10)
        assert np.allclose(prof.mean_trend, d.trend, atol=1e-12)
        assert np.allclose(prof.mean_seasonal_one_period, fold_one_period(d.seasonal, 10), atol=1e-12)
        assert len(prof.mean_seasonal_one_period) == 10 and prof.periods_used == [10]

    def test_negation_cancels(self):
        X = np.random.default_rng(3).standard_normal((5, 60))
        prof = dataset_profile(np.concatenate([X, -X]), [12])[0]
        assert np.max(np.abs(prof.mean_trend)) < 1e-9

    def test_a1_trend_matches_ramp(self):
        ds = gen_dataset("A1", SynthConfig(samples_per_class=10))
        prof = dataset_profile(ds, [25])[0]
        ramp = np.arange(1, 101, dtype=float)
        assert cosine_similarity(prof.aligned_trend, ramp) > 0.9

    def test_permutation_invariant(self):
        ds = gen_dataset("C2", SynthConfig(samples_per_class=5))
        perm = np.random.default_rng(0).permutation(len(ds))
        a = dataset_profile(ds, [25, 12])
        b = dataset_profile(ds.subset(perm), [25, 12])
        for pa, pb in zip(a, b):
            assert np.array_equal(pa.mean_trend, pb.mean_trend)
            assert np.array_equal(pa.aligned_trend, pb.aligned_trend)
            assert np.array_equal(pa.mean_seasonal_one_period, pb.mean_seasonal_one_period)
            assert pa.trend_power == pb.trend_power

    def test_default_periods_used(self):
        profs = dataset_profile(np.random.default_rng(0).standard_normal((3, 64)))
        assert [p.period for p in profs] == [32, 16, 8, 4]

    def test_ragged(self):
        with pytest.raises(ShapeError):
            dataset_profile([np.zeros(20), np.zeros(21)], [5])

    def test_invalid_period(self):
        with pytest.raises(ConfigError):
            dataset_profile(LabeledDataset(np.zeros((2, 20)), [0, 1]), [11])
