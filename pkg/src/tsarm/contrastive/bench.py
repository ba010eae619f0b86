"""Benchmark every augmentation against the no-pretraining baseline."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict

import numpy as np

from ..augment import AUGMENTATIONS, NO_PRETRAIN, Augmentation, PairMode, canonical_name
from ..errors import ConfigError
from ..recommend import RankedAugmentations
from .model import MLP, EncoderConfig
from .train import TrainConfig, finetune_and_test, label_subset, pretrain, stratified_split

SCHEMA_VERSION = 1
SPLIT = (0.7, 0.1, 0.2)


def rank_augmentations(results, no_pretrain_f1, source="query"):
    """Rank methods by F1; neighbours closer than 1% of the baseline F1 tie.

    ``results`` maps method -> mean macro-F1 and may include the baseline.
    """
    scores = {canonical_name(k): float(v) for k, v in results.items()}
    scores.setdefault(NO_PRETRAIN, float(no_pretrain_f1))
    margin = 0.01 * float(no_pretrain_f1)
    order = sorted(scores, key=lambda m: (-scores[m], m))
    groups = [[order[0]]]
    for prev, m in zip(order, order[1:]):
        if scores[prev] - scores[m] <= margin:
            groups[-1].append(m)
        else:
            groups.append([m])
    return RankedAugmentations.from_groups(groups, source)


def _standardize(ds, idx):
    mu = ds.X[idx].mean()
    sd = ds.X[idx].std() or 1.0
    X = (ds.X - mu) / sd
    X_long = None if ds.X_long is None else (ds.X_long - mu) / sd
    return X, X_long


def _run_one(args):
    X, X_long, y, parts, method, aug_spec, enc_cfg, cfg, rep_seed = args
    tr, va, te, lab = parts
    run_cfg = TrainConfig(**{**asdict(cfg), "seed": rep_seed})
    enc = MLP.encoder(X.shape[1], EncoderConfig(**{**asdict(enc_cfg), "seed": rep_seed}))
    history = None
    if method != NO_PRETRAIN:
        enc, history = pretrain(enc, X[tr], aug_spec, run_cfg,
                                None if X_long is None else X_long[tr])
    n_classes = int(y.max()) + 1
    m = finetune_and_test(enc, (X[lab], y[lab]), (X[va], y[va]), (X[te], y[te]), run_cfg, n_classes)
    return m, history


def benchmark_run(ds, aug_list=None, cfg=None, enc_cfg=None, mode="single", jobs=1):
    """Pretrain/fine-tune/test each augmentation ``cfg.repeats`` times.

    Each repeat draws one stratified 70/10/20 split and one label subset,
    shared by all methods so comparisons within a repeat are paired. The
    baseline trains the same network from scratch on the labeled subset.
    Double-view mode pairs each augmentation with itself.
    """
    cfg = TrainConfig() if cfg is None else cfg
    enc_cfg = EncoderConfig() if enc_cfg is None else enc_cfg
    aug_list = list(AUGMENTATIONS) if aug_list is None else list(aug_list)
    augs = [a if isinstance(a, Augmentation) else Augmentation(a) for a in aug_list]
    if len({a.kind for a in augs}) != len(augs):
        raise ConfigError("duplicate augmentation in aug_list")
    mode = PairMode(mode)
    methods = [a.kind for a in augs] + [NO_PRETRAIN]
    specs = {a.kind: (mode, a, a if mode is PairMode.DOUBLE else None) for a in augs}
    specs[NO_PRETRAIN] = None

    tasks, keys = [], []
    for r in range(cfg.repeats):
        rep_seed = int(np.random.SeedSequence([int(cfg.seed), r]).generate_state(1)[0])
        rng = np.random.default_rng(rep_seed)
        tr, va, te = stratified_split(ds.y, SPLIT, rng)
        lab = tr[label_subset(ds.y[tr], cfg.label_ratio, rng)]
        X, X_long = _standardize(ds, tr)
        for m in methods:
            tasks.append((X, X_long, ds.y, (tr, va, te, lab), m, specs[m], enc_cfg, cfg, rep_seed))
            keys.append((m, r))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outs = list(pool.map(_run_one, tasks))
    else:
        outs = [_run_one(t) for t in tasks]

    per = {m: [None] * cfg.repeats for m in methods}
    curves = {m: [None] * cfg.repeats for m in methods}
    for (m, r), (metrics, hist) in zip(keys, outs):
        per[m][r] = metrics.to_json()
        curves[m][r] = hist
    means = {m: {k: float(np.mean([row[k] for row in per[m]])) for k in per[m][0]} for m in methods}
    ranking = rank_augmentations({m: means[m]["macro_f1"] for m in methods},
                                 means[NO_PRETRAIN]["macro_f1"],
                                 str(ds.metadata.get("dataset_id", "query")))
    return {
        "schema_version": SCHEMA_VERSION,
        "dataset": ds.metadata.get("dataset_id", "query"),
        "config": {"train": asdict(cfg), "encoder": asdict(enc_cfg), "mode": mode.value,
                   "augmentations": [a.to_json() for a in augs]},
        "per_repeat": per,
        "mean": means,
        "ranking": ranking.to_json(),
        "pretrain_loss": {m: [None if h is None else h["train_loss"] for h in curves[m]] for m in methods},
    }
