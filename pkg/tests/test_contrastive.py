import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.metrics import accuracy_score, f1_score, precision_score, recall_score

from tsarm.augment import METHODS, NO_PRETRAIN
from tsarm.contrastive import (
    MLP, EncoderConfig, TrainConfig, benchmark_run, classification_metrics, finetune_and_test,
    label_subset, nt_xent_loss, pretrain, rank_augmentations, stratified_split,
)
from tsarm.contrastive.model import softmax_cross_entropy
from tsarm.errors import ConfigError, DegenerateVector, ShapeError, StratificationError
from tsarm.series import LabeledDataset
from tsarm.synthgen import SynthConfig, gen_dataset


def nt_xent_oracle(za, zb, tau):
    """Direct per-anchor transcription of the normalized-temperature loss."""
    z = np.concatenate([za, zb])
    z = z / np.linalg.norm(z, axis=1, keepdims=True)
    n, b = z.shape[0], za.shape[0]
    total = 0.0
    for i in range(n):
        j = (i + b) % n
        denom = sum(math.exp(z[i] @ z[k] / tau) for k in range(n) if k != i)
        total += -math.log(math.exp(z[i] @ z[j] / tau) / denom)
    return total / n


class TestLoss:
    def test_orthonormal_log3(self):
        za = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]])
        zb = np.array([[0, 0, 1.0, 0], [0, 0, 0, 1.0]])
        assert nt_xent_loss(za, zb, 1.0)[0] == pytest.approx(math.log(3), abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 2**32), st.integers(2, 6), st.integers(2, 5), st.floats(0.1, 2.0))
    def test_matches_oracle(self, seed, b, d, tau):
        r = np.random.default_rng(seed)
        za, zb = r.standard_normal((b, d)), r.standard_normal((b, d))
        assert nt_xent_loss(za, zb, tau)[0] == pytest.approx(nt_xent_oracle(za, zb, tau), rel=1e-10)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**32), st.integers(2, 6), st.floats(0.01, 100))
    def test_invariances(self, seed, b, c):
        r = np.random.default_rng(seed)
        za, zb = r.standard_normal((b, 3)), r.standard_normal((b, 3))
        base = nt_xent_loss(za, zb, 0.5)[0]
        perm = r.permutation(b)
        assert nt_xent_loss(za[perm], zb[perm], 0.5)[0] == pytest.approx(base, rel=1e-10)
        assert nt_xent_loss(c * za, c * zb, 0.5)[0] == pytest.approx(base, rel=1e-10)

    @pytest.mark.parametrize("seed", range(20))
    def test_gradient_finite_difference(self, seed):
        r = np.random.default_rng(seed)
        b, d = int(r.integers(2, 6)), int(r.integers(2, 6))
        tau = float(r.uniform(0.2, 1.5))
        za, zb = r.standard_normal((b, d)), r.standard_normal((b, d))
        _, (ga, gb) = nt_xent_loss(za, zb, tau)
        eps = 1e-6
        for z, g, other, first in ((za, ga, zb, True), (zb, gb, za, False)):
            num = np.zeros_like(z)
            for idx in np.ndindex(z.shape):
                zp, zm = z.copy(), z.copy()
                zp[idx] += eps
                zm[idx] -= eps
                fp = nt_xent_loss(zp, other, tau)[0] if first else nt_xent_loss(other, zp, tau)[0]
                fm = nt_xent_loss(zm, other, tau)[0] if first else nt_xent_loss(other, zm, tau)[0]
                num[idx] = (fp - fm) / (2 * eps)
            assert np.linalg.norm(num - g) / max(np.linalg.norm(num), 1e-12) < 1e-4

    def test_errors(self):
        with pytest.raises(ConfigError):
            nt_xent_loss(np.ones((1, 3)), np.ones((1, 3)))
        with pytest.raises(ShapeError):
            nt_xent_loss(np.ones((2, 3)), np.ones((3, 3)))
        with pytest.raises(DegenerateVector):
            nt_xent_loss(np.array([[1.0, 0], [0, 0]]), np.ones((2, 2)))


class TestModel:
    @pytest.mark.parametrize("seed", range(10))
    @pytest.mark.parametrize("activation", ["relu", "tanh"])
    def test_backprop_finite_difference(self, seed, activation):
        r = np.random.default_rng(seed)
        net = MLP([6, 5, 4, 3], activation, r)
        for b in net.params[1::2]:
            b[...] = r.uniform(0.1, 0.5, b.shape)
        Xa, Xb = r.standard_normal((4, 6)), r.standard_normal((4, 6))

        def loss_at(theta):
            net.set_flat(theta)
            return nt_xent_loss(net(Xa), net(Xb), 0.5)[0]

        theta = net.flat()
        za, ca = net.forward(Xa)
        zb, cb = net.forward(Xb)
        _, (dza, dzb) = nt_xent_loss(za, zb, 0.5)
        ga, _ = net.backward(ca, dza)
        gb, _ = net.backward(cb, dzb)
        g = np.concatenate([(x + y).ravel() for x, y in zip(ga, gb)])
        eps = 1e-6
        num = np.array([(loss_at(theta + eps * e) - loss_at(theta - eps * e)) / (2 * eps)
                        for e in np.eye(theta.size)])
        net.set_flat(theta)
        assert np.linalg.norm(num - g) / np.linalg.norm(num) < 1e-4

    def test_softmax_cross_entropy_gradient(self):
        r = np.random.default_rng(0)
        logits, y = r.standard_normal((5, 4)), np.array([0, 3, 1, 1, 2])
        _, g = softmax_cross_entropy(logits, y)
        eps = 1e-6
        for idx in np.ndindex(logits.shape):
            lp, lm = logits.copy(), logits.copy()
            lp[idx] += eps
            lm[idx] -= eps
            num = (softmax_cross_entropy(lp, y)[0] - softmax_cross_entropy(lm, y)[0]) / (2 * eps)
            assert num == pytest.approx(g[idx], abs=1e-7)

    def test_encoder_seeded(self):
        cfg = EncoderConfig(seed=3)
        assert np.array_equal(MLP.encoder(10, cfg).flat(), MLP.encoder(10, cfg).flat())
        assert not np.array_equal(MLP.encoder(10, cfg).flat(), MLP.encoder(10, EncoderConfig(seed=4)).flat())

    def test_config_errors(self):
        with pytest.raises(ConfigError):
            EncoderConfig(activation="gelu")
        with pytest.raises(ConfigError):
            TrainConfig(temperature=0)
        with pytest.raises(ConfigError):
            TrainConfig(label_ratio=0)


def _small(seed=0, n=40):
    ds = gen_dataset("A1", SynthConfig(samples_per_class=n, seed=seed), neighbor_context=True)
    mu, sd = ds.X.mean(), ds.X.std()
    return ds, (ds.X - mu) / sd, (ds.X_long - mu) / sd


class TestPretrain:
    def test_zero_epochs_is_identity(self):
        _, X, _ = _small(n=5)
        enc = MLP.encoder(X.shape[1], EncoderConfig())
        before = enc.flat().copy()
        enc, hist = pretrain(enc, X, "jittering", TrainConfig(pretrain_epochs=0))
        assert np.array_equal(enc.flat(), before) and hist["train_loss"] == []

    def test_deterministic(self):
        _, X, XL = _small(n=5)
        cfg = TrainConfig(pretrain_epochs=2, seed=7)
        for aug in ("resizing", "time_neighboring", ("double", "jittering", "scaling")):
            a, ha = pretrain(EncoderConfig(), X, aug, cfg, XL)
            b, hb = pretrain(EncoderConfig(), X, aug, cfg, XL)
            assert np.array_equal(a.flat(), b.flat()) and ha == hb

    def test_heldout_loss_decreases(self):
        runs = 0
        down = 0
        for seed in range(5):
            ds, X, XL = _small(seed)
            idx = np.random.default_rng(seed).permutation(len(X))
            tr, ho = idx[:180], idx[180:]
            for aug in ("resizing", "jittering", "time_neighboring"):
                _, h = pretrain(EncoderConfig(seed=seed), X[tr], aug,
                                TrainConfig(pretrain_epochs=10, seed=seed), XL[tr], X[ho], XL[ho])
                assert len(h["heldout_loss"]) == 11
                runs += 1
                down += h["heldout_loss"][-1] < h["heldout_loss"][0]
        assert down >= 0.9 * runs

    def test_neighbor_without_long_context(self):
        _, X, _ = _small(n=3)
        enc, hist = pretrain(EncoderConfig(), X, "time_neighboring", TrainConfig(pretrain_epochs=1))
        assert np.isfinite(hist["train_loss"][0])


class TestMetrics:
    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32), st.integers(2, 5), st.integers(5, 60))
    def test_against_sklearn(self, seed, k, n):
        r = np.random.default_rng(seed)
        yt, yp = r.integers(0, k, n), r.integers(0, k, n)
        labels = np.arange(k)
        m = classification_metrics(yt, yp, labels)
        kw = dict(labels=labels, average="macro", zero_division=0)
        assert m.accuracy == pytest.approx(accuracy_score(yt, yp))
        assert m.macro_precision == pytest.approx(precision_score(yt, yp, **kw))
        assert m.macro_recall == pytest.approx(recall_score(yt, yp, **kw))
        assert m.macro_f1 == pytest.approx(f1_score(yt, yp, **kw))

    def test_stratified_split(self):
        y = np.repeat(np.arange(6), 100)
        parts = stratified_split(y, (0.7, 0.1, 0.2), np.random.default_rng(0))
        assert sorted(np.concatenate(parts).tolist()) == list(range(600))
        for p, frac in zip(parts, (0.7, 0.1, 0.2)):
            assert np.all(np.bincount(y[p], minlength=6) == round(frac * 100))

    def test_label_subset(self):
        y = np.repeat(np.arange(3), [10, 20, 5])
        idx = label_subset(y, 0.3, np.random.default_rng(0))
        assert np.bincount(y[idx]).tolist() == [3, 6, 2]
        with pytest.raises(StratificationError):
            label_subset(np.array([0, 0, 0, 0, 1]), 0.3, np.random.default_rng(0))

    def test_separable_toy_is_perfect(self):
        r = np.random.default_rng(0)
        y = np.repeat(np.arange(3), 40)
        X = r.normal(0, 0.1, (120, 8)) + 3.0 * np.eye(3, 8)[y]
        enc = MLP.encoder(8, EncoderConfig(hidden_sizes=[16], embedding_dim=8))
        cfg = TrainConfig(finetune_epochs=30, finetune_learning_rate=0.1, batch_size=16)
        m = finetune_and_test(enc, (X[::2], y[::2]), (X[1::4], y[1::4]), (X[1::2], y[1::2]), cfg)
        assert m.macro_f1 == 1.0 and m.accuracy == 1.0

    def test_missing_class(self):
        X = np.zeros((6, 4))
        y = np.array([0, 0, 0, 1, 1, 1])
        enc = MLP.encoder(4, EncoderConfig())
        with pytest.raises(StratificationError):
            finetune_and_test(enc, (X[:3], y[:3]), (X, y), (X, y), TrainConfig())

    def test_finetune_leaves_encoder(self):
        X = np.random.default_rng(0).standard_normal((20, 4))
        y = np.arange(20) % 2
        enc = MLP.encoder(4, EncoderConfig())
        before = enc.flat().copy()
        finetune_and_test(enc, (X, y), (X, y), (X, y), TrainConfig(finetune_epochs=2))
        assert np.array_equal(enc.flat(), before)


class TestRanking:
    def test_ties_within_one_percent(self):
        r = rank_augmentations({"resizing": 0.80, "jittering": 0.798, "flipping": 0.70}, 0.5)
        assert r.groups[:3] == [["resizing", "jittering"], ["flipping"], [NO_PRETRAIN]]
        assert all(not e.listed for e in r.entries[4:])

    def test_strict_gap(self):
        r = rank_augmentations({"resizing": 0.80, "jittering": 0.79}, 0.5)
        assert r.groups[:2] == [["resizing"], ["jittering"]]

    @given(st.permutations(list(METHODS)), st.lists(st.floats(0, 1), min_size=9, max_size=9))
    def test_order_invariant(self, perm, vals):
        scores = dict(zip(METHODS, vals))
        a = rank_augmentations(scores, scores[NO_PRETRAIN])
        b = rank_augmentations({m: scores[m] for m in perm}, scores[NO_PRETRAIN])
        assert a.groups == b.groups


class TestBenchmark:
    CFG = TrainConfig(pretrain_epochs=2, finetune_epochs=2, repeats=1, batch_size=32)
    ENC = EncoderConfig(hidden_sizes=[16], embedding_dim=8)

    def test_reproducible(self):
        ds, _, _ = _small(n=20)
        a = benchmark_run(ds, ["jittering", "resizing"], self.CFG, self.ENC)
        b = benchmark_run(ds, ["jittering", "resizing"], self.CFG, self.ENC)
        assert a == b
        assert set(a["mean"]) == {"jittering", "resizing", NO_PRETRAIN}
        listed = [e["method"] for e in a["ranking"]["entries"] if e["listed"]]
        assert sorted(listed) == ["jittering", NO_PRETRAIN, "resizing"]

    def test_parallel_matches_serial(self):
        ds, _, _ = _small(n=20)
        a = benchmark_run(ds, ["flipping", "time_neighboring"], self.CFG, self.ENC, jobs=1)
        b = benchmark_run(ds, ["flipping", "time_neighboring"], self.CFG, self.ENC, jobs=2)
        assert a == b

    def test_repeat_rows(self):
        ds, _, _ = _small(n=20)
        cfg = TrainConfig(pretrain_epochs=1, finetune_epochs=1, repeats=5, batch_size=32)
        out = benchmark_run(ds, ["scaling"], cfg, self.ENC, mode="double")
        assert all(len(rows) == 5 for rows in out["per_repeat"].values())
        assert out["config"]["mode"] == "double"

    def test_duplicate_aug(self):
        ds, _, _ = _small(n=5)
        with pytest.raises(ConfigError):
            benchmark_run(ds, ["jittering", "jitter"], self.CFG, self.ENC)

    def test_plain_dataset(self):
        r = np.random.default_rng(0)
        ds = LabeledDataset(r.standard_normal((60, 20)), np.arange(60) % 3)
        out = benchmark_run(ds, ["time_neighboring"], self.CFG, self.ENC)
        assert out["dataset"] == "query"
