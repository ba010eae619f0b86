"""Pretrain, fine-tune and evaluate at desk scale."""

from dataclasses import dataclass

import numpy as np

from ..augment import Augmentation, PairMode, make_pair
from ..errors import ConfigError, StratificationError
from ..numerics import resample_linear
from .loss import nt_xent_loss
from .model import MLP, EncoderConfig, softmax_cross_entropy


@dataclass
class TrainConfig:
    temperature: float = 0.5
    batch_size: int = 64
    pretrain_epochs: int = 20
    finetune_epochs: int = 20
    learning_rate: float = 0.3
    finetune_learning_rate: float | None = 0.05
    label_ratio: float = 0.3
    repeats: int = 5
    finetune_encoder: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.temperature <= 0:
            raise ConfigError("temperature must be positive")
        if self.batch_size < 2:
            raise ConfigError("batch_size must be at least 2")
        if self.pretrain_epochs < 0 or self.finetune_epochs < 0:
            raise ConfigError("epoch counts must be non-negative")
        if self.learning_rate <= 0:
            raise ConfigError("learning_rate must be positive")
        if not 0.0 < self.label_ratio <= 1.0:
            raise ConfigError("label_ratio must lie in (0, 1]")
        if self.repeats < 1:
            raise ConfigError("repeats must be positive")

    @property
    def ft_lr(self):
        return self.learning_rate if self.finetune_learning_rate is None else self.finetune_learning_rate


@dataclass
class ClassificationMetrics:
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_json(self):
        return dict(self.__dict__)


def classification_metrics(y_true, y_pred, classes=None):
    """Accuracy and macro-averaged precision/recall/F1 (0 where undefined)."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    classes = np.unique(np.concatenate([y_true, y_pred])) if classes is None else np.asarray(classes)
    prec, rec, f1 = [], [], []
    for c in classes:
        tp = np.sum((y_pred == c) & (y_true == c))
        fp = np.sum((y_pred == c) & (y_true != c))
        fn = np.sum((y_pred != c) & (y_true == c))
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        prec.append(p)
        rec.append(r)
        f1.append(2 * p * r / (p + r) if p + r else 0.0)
    return ClassificationMetrics(float(np.mean(y_true == y_pred)), float(np.mean(prec)),
                                 float(np.mean(rec)), float(np.mean(f1)))


def stratified_split(y, fractions, rng):
    """Split indices per class by ``fractions``; returns one index array per part."""
    y = np.asarray(y)
    parts = [[] for _ in fractions]
    bounds = np.cumsum(fractions)
    for c in np.unique(y):
        idx = rng.permutation(np.flatnonzero(y == c))
        cuts = np.round(bounds * idx.size).astype(int)
        cuts[-1] = idx.size
        start = 0
        for k, stop in enumerate(cuts):
            parts[k].extend(idx[start:stop])
            start = stop
    return [np.sort(np.asarray(p, dtype=np.int64)) for p in parts]


def label_subset(y, ratio, rng):
    """Stratified subset keeping ``round(ratio * n_c)`` samples per class."""
    y = np.asarray(y)
    keep = []
    for c in np.unique(y):
        idx = np.flatnonzero(y == c)
        m = int(round(ratio * idx.size))
        if m < 1:
            raise StratificationError(f"class {c} has no labeled samples at label ratio {ratio}")
        keep.extend(rng.choice(idx, m, replace=False))
    return np.sort(np.asarray(keep, dtype=np.int64))


def _views(X, X_long, idx, aug_spec, rng):
    mode, aug1, aug2 = aug_spec
    if aug1.kind == "time_neighboring":
        if X_long is not None:
            h = X.shape[1]
            return X_long[idx, :h], X_long[idx, h:]
        # Without a longer rendering, stretch the two halves of each sample.
        a = np.stack([resample_linear(X[i, :X.shape[1] // 2], X.shape[1]) for i in idx])
        b = np.stack([resample_linear(X[i, X.shape[1] // 2:], X.shape[1]) for i in idx])
        return a, b
    va, vb = [], []
    for i in idx:
        p = make_pair(X[i], mode, aug1, aug2, rng)
        va.append(p.view_a)
        vb.append(p.view_b)
    return np.stack(va), np.stack(vb)


def contrastive_loss(encoder, X, X_long, aug_spec, temperature, batch_size, rng):
    """Mean NT-Xent over ``X`` in fixed batches (no parameter update)."""
    losses = []
    for start in range(0, X.shape[0] - 1, batch_size):
        idx = np.arange(start, min(start + batch_size, X.shape[0]))
        if idx.size < 2:
            break
        a, b = _views(X, X_long, idx, aug_spec, rng)
        losses.append(nt_xent_loss(encoder(a), encoder(b), temperature)[0])
    return float(np.mean(losses))


def parse_aug_spec(aug_spec):
    """Normalise to ``(PairMode, Augmentation, Augmentation | None)``."""
    if isinstance(aug_spec, (str, Augmentation)):
        aug_spec = (PairMode.SINGLE, aug_spec, None)
    mode, a1, a2 = (list(aug_spec) + [None])[:3]
    a1 = a1 if isinstance(a1, Augmentation) else Augmentation(a1)
    if a2 is not None and not isinstance(a2, Augmentation):
        a2 = Augmentation(a2)
    return PairMode(mode), a1, a2


def pretrain(encoder, X, aug_spec, cfg, X_long=None, X_heldout=None, X_long_heldout=None):
    """Contrastive pretraining with plain SGD.

    ``encoder`` is an ``MLP`` (updated in place and returned) or an
    ``EncoderConfig`` (a fresh network is built). Returns
    ``(encoder, history)`` where ``history`` has per-epoch training loss and,
    if a held-out set is given, held-out loss before training and after
    each epoch.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] < 2:
        raise ConfigError("pretraining needs at least 2 samples")
    if isinstance(encoder, EncoderConfig):
        encoder = MLP.encoder(X.shape[1], encoder)
    spec = parse_aug_spec(aug_spec)
    ss = np.random.SeedSequence([int(cfg.seed), 0x5EED])
    rng = np.random.default_rng(ss)
    history = {"train_loss": [], "heldout_loss": []}

    def heldout():
        if X_heldout is not None:
            r = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), 0x0BAD]))
            history["heldout_loss"].append(contrastive_loss(
                encoder, X_heldout, X_long_heldout, spec, cfg.temperature, cfg.batch_size, r))

    heldout()
    n = X.shape[0]
    for _ in range(cfg.pretrain_epochs):
        order = rng.permutation(n)
        ep = []
        for start in range(0, n, cfg.batch_size):
            idx = order[start:start + cfg.batch_size]
            if idx.size < 2:
                continue
            a, b = _views(X, X_long, idx, spec, rng)
            za, ca = encoder.forward(a)
            zb, cb = encoder.forward(b)
            loss, (dza, dzb) = nt_xent_loss(za, zb, cfg.temperature)
            ga, _ = encoder.backward(ca, dza)
            gb, _ = encoder.backward(cb, dzb)
            encoder.sgd_step([x + y for x, y in zip(ga, gb)], cfg.learning_rate)
            ep.append(loss)
        history["train_loss"].append(float(np.mean(ep)))
        heldout()
    return encoder, history


class Classifier:
    """Encoder followed by a linear softmax head."""

    def __init__(self, encoder, n_classes, rng):
        self.encoder = encoder
        d = encoder.sizes[-1]
        self.head = MLP([d, n_classes], "relu", rng)

    def logits(self, X):
        return self.head(self.encoder(X))

    def predict(self, X):
        return np.argmax(self.logits(X), axis=1)

    def train(self, X, y, epochs, lr, batch_size, rng, train_encoder=True, X_val=None, y_val=None):
        best, best_score = None, -1.0
        n = X.shape[0]
        for _ in range(epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch_size):
                idx = order[start:start + batch_size]
                h, ce = self.encoder.forward(X[idx])
                logits, ch = self.head.forward(h)
                _, dlog = softmax_cross_entropy(logits, y[idx])
                gh, dh = self.head.backward(ch, dlog)
                self.head.sgd_step(gh, lr)
                if train_encoder:
                    ge, _ = self.encoder.backward(ce, dh)
                    self.encoder.sgd_step(ge, lr)
            if X_val is not None and len(X_val):
                score = classification_metrics(y_val, self.predict(X_val)).macro_f1
                if score > best_score:
                    best_score = score
                    best = (self.encoder.copy(), self.head.copy())
        if best is not None:
            self.encoder, self.head = best
        return self


def finetune_and_test(encoder, train, val, test, cfg, n_classes=None):
    """Train encoder + linear head on labeled data, report test metrics.

    ``train``, ``val`` and ``test`` are ``(X, y)`` pairs; ``train`` should
    already be the label-ratio subset. The epoch with the best validation
    macro-F1 is kept.
    """
    Xtr, ytr = (np.asarray(a) for a in train)
    Xva, yva = (np.asarray(a) for a in val)
    Xte, yte = (np.asarray(a) for a in test)
    classes = np.unique(np.concatenate([ytr, yte]))
    missing = np.setdiff1d(classes, np.unique(ytr))
    if missing.size:
        raise StratificationError(f"classes {missing.tolist()} absent from the labeled training set")
    n_classes = int(classes.max()) + 1 if n_classes is None else n_classes
    rng = np.random.default_rng(np.random.SeedSequence([int(cfg.seed), 0xF17E]))
    clf = Classifier(encoder.copy(), n_classes, rng)
    clf.train(Xtr, ytr, cfg.finetune_epochs, cfg.ft_lr, cfg.batch_size, rng,
              cfg.finetune_encoder, Xva, yva)
    return classification_metrics(yte, clf.predict(Xte), classes)
