"""Command-line interface: ``tsarm <subcommand> ...``.

Exit codes: 0 success, 2 no synthetic twin for the query, 64 usage error,
65 malformed input data.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import schemas
from .augment import Augmentation, canonical_name
from .errors import DataFormatError, Inapplicable, NonFiniteError, ShapeError, TsarmError
from .recommend import (
    FIXTURES, Method, RankedAugmentations, RecommendationReport, component_similarities,
    fixture_profile, load_realworld, load_synthetic_rankings, popularity_recommend,
    random_recommend, recall_at_k, recommend, select_twin,
)
from .series import LabeledDataset, read_csv, write_csv
from .stl import dataset_profile, stl_decompose
from .synthgen import DEFAULT_SEED, DatasetId, SynthConfig, gen_dataset

EXIT_OK = 0
EXIT_NOMATCH = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class UsageError(Exception):
    pass


class Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_pair(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'lo,hi', got {text!r}") from None
    return lo, hi


def _emit(obj, out, schema):
    schemas.validate(obj, schema)
    text = json.dumps(obj, indent=2) + "\n"
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_synth(args):
    cfg = SynthConfig(sample_len=args.length, samples_per_class=args.samples_per_class,
                      seed=args.seed, cycles_per_sample=args.cycles,
                      phase_jitter=args.phase_jitter, normalize=not args.raw)
    ds = gen_dataset(DatasetId.parse(args.dataset), cfg)
    write_csv(ds, args.out)
    return EXIT_OK


def cmd_augment(args):
    ds = read_csv(args.inp)
    kind = canonical_name(args.aug)
    params = {}
    if args.sigma is not None:
        params["sigma"] = args.sigma
    if args.range is not None:
        params["low"], params["high"] = args.range
    if args.per_step:
        params["per_step"] = True
    if args.segments is not None:
        params["num_segments"] = args.segments
    if args.crop is not None:
        params["crop_fraction"] = args.crop
    if args.fraction is not None:
        params["mask_fraction"] = args.fraction
    aug = Augmentation(kind, params)
    rows = []
    for i, x in enumerate(ds.X):
        rng = np.random.default_rng(np.random.SeedSequence([args.seed, i]))
        rows.append(aug(x, rng))
    meta = dict(ds.metadata)
    meta["augmentation"] = aug.to_json(args.seed)
    out = LabeledDataset(np.stack(rows), ds.y, meta)
    write_csv(out, args.out)
    return EXIT_OK


def cmd_decompose(args):
    ds = read_csv(args.inp)
    periods = args.periods or [args.period]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    limit = len(ds) if args.max_samples is None else min(args.max_samples, len(ds))
    for p in periods:
        for i in range(limit):
            stl_decompose(ds.X[i], p).to_csv(out_dir / f"sample{i:05d}_p{p}.csv", ds.X[i])
    profiles = dataset_profile(ds, periods)
    doc = {"dataset": str(ds.metadata.get("dataset_id", args.inp)),
           "profiles": [pr.to_json() for pr in profiles]}
    _emit(doc, out_dir / "profile.json", "profile")
    return EXIT_OK


def _query_report(args):
    if args.fixture:
        return component_similarities(fixture_profile(args.fixture))
    ds = read_csv(args.inp)
    return component_similarities(dataset_profile(ds, args.periods))


def cmd_recommend(args):
    table = load_synthetic_rankings()
    if args.method == Method.POPULARITY.value:
        rep = RecommendationReport(popularity_recommend(table, args.k), Method.POPULARITY)
    elif args.method == Method.RANDOM.value:
        rng = np.random.default_rng(args.seed)
        rep = RecommendationReport(random_recommend(args.k, rng), Method.RANDOM)
    else:
        sim = _query_report(args)
        try:
            rep = recommend(sim, args.k, table, args.threshold)
        except Inapplicable as exc:
            doc = RecommendationReport([], Method.TREND_SEASON, sim, select_twin(sim, args.threshold)).to_json()
            doc.pop("top_k")
            doc.pop("k")
            doc["diagnostic"] = str(exc)
            print(json.dumps(doc, indent=2), file=sys.stderr)
            print(f"tsarm recommend: {exc}", file=sys.stderr)
            return EXIT_NOMATCH
    _emit(rep.to_json(), args.out, "recommendation")
    return EXIT_OK


def cmd_benchmark(args):
    from .contrastive import EncoderConfig, TrainConfig, benchmark_run

    ds = read_csv(args.inp)
    cfg = TrainConfig(repeats=args.repeats, seed=args.seed, pretrain_epochs=args.pretrain_epochs,
                      finetune_epochs=args.finetune_epochs, learning_rate=args.lr,
                      finetune_learning_rate=args.finetune_lr, label_ratio=args.label_ratio,
                      batch_size=args.batch_size, temperature=args.temperature)
    enc = EncoderConfig(hidden_sizes=args.hidden, embedding_dim=args.embedding_dim, seed=args.seed)
    augs = None if args.augs is None else [a.strip() for a in args.augs.split(",") if a.strip()]
    rep = benchmark_run(ds, augs, cfg, enc, args.mode, jobs=args.jobs)
    _emit(rep, args.out, "benchmark")
    return EXIT_OK


def _load_list(path, fixture=None):
    if fixture:
        return load_realworld()[fixture]["truth"].methods
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataFormatError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: {exc.msg}", row=exc.lineno, column=exc.colno) from None
    if isinstance(obj, dict) and "ranking" in obj:
        obj = obj["ranking"]
    if isinstance(obj, dict) and "entries" in obj:
        return RankedAugmentations.from_json(obj).methods
    if isinstance(obj, dict) and "top_k" in obj:
        return [canonical_name(m) for m in obj["top_k"]]
    if isinstance(obj, list) and obj and all(isinstance(g, list) for g in obj):
        return RankedAugmentations.from_groups(obj).methods
    if isinstance(obj, list):
        return [canonical_name(m) for m in obj]
    raise DataFormatError(f"{path}: expected a report, ranking or list of methods")


def cmd_evaluate(args):
    rec = _load_list(args.recommended)
    truth = _load_list(args.truth, args.truth_fixture)
    if args.k > min(len(rec), len(truth)):
        raise UsageError(f"k={args.k} exceeds the recommended list length {len(rec)}")
    doc = {"k": args.k, "recommended": rec[:args.k], "truth": truth,
           "recall": {str(k): recall_at_k(rec, truth, k) for k in range(1, args.k + 1)}}
    _emit(doc, args.out, "evaluation")
    return EXIT_OK


def build_parser():
    p = Parser(prog="tsarm", description="Trend/seasonality augmentation recommendation for "
                                         "contrastive time-series learning.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=Parser)

    s = sub.add_parser("synth", help="generate a synthetic dataset as CSV + JSON sidecar")
    s.add_argument("--dataset", required=True, help="A1 .. D3")
    s.add_argument("--out", required=True)
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--samples-per-class", type=int, default=1000)
    s.add_argument("--length", type=int, default=100)
    s.add_argument("--cycles", type=float, default=4.0, help="seasonal cycles per sample")
    s.add_argument("--phase-jitter", action="store_true", help="random phase per trig sample")
    s.add_argument("--raw", action="store_true", help="skip component normalisation")
    s.set_defaults(func=cmd_synth)

    a = sub.add_parser("augment", help="apply one augmentation to every sample")
    a.add_argument("--in", dest="inp", required=True)
    a.add_argument("--out", required=True)
    a.add_argument("--aug", required=True, help="jitter, scale, flip, permute, resize, time_mask, freq_mask")
    a.add_argument("--sigma", type=float)
    a.add_argument("--range", type=_float_pair, help="scale range lo,hi")
    a.add_argument("--per-step", action="store_true", help="one scale factor per time step")
    a.add_argument("--segments", type=int)
    a.add_argument("--crop", type=float, help="resize crop fraction")
    a.add_argument("--fraction", type=float, help="mask fraction")
    a.add_argument("--seed", type=int, default=DEFAULT_SEED)
    a.set_defaults(func=cmd_augment)

    d = sub.add_parser("decompose", help="STL-decompose samples and write a dataset profile")
    d.add_argument("--in", dest="inp", required=True)
    g = d.add_mutually_exclusive_group(required=True)
    g.add_argument("--period", type=int)
    g.add_argument("--periods", type=_int_list)
    d.add_argument("--out-dir", default="decomposition")
    d.add_argument("--max-samples", type=int, help="write per-sample CSVs for at most this many")
    d.set_defaults(func=cmd_decompose)

    r = sub.add_parser("recommend", help="recommend augmentations for a dataset")
    src = r.add_mutually_exclusive_group()
    src.add_argument("--in", dest="inp")
    src.add_argument("--fixture", choices=FIXTURES, help="use a shipped real-world profile")
    r.add_argument("--periods", type=_int_list, help="default: N/2, N/4, N/8, N/16")
    r.add_argument("--k", type=int, default=3)
    r.add_argument("--method", choices=[m.value for m in Method], default=Method.TREND_SEASON.value)
    r.add_argument("--threshold", type=float, default=0.05)
    r.add_argument("--seed", type=int, default=DEFAULT_SEED)
    r.add_argument("--out")
    r.set_defaults(func=cmd_recommend)

    b = sub.add_parser("benchmark", help="rank augmentations by contrastive pretraining")
    b.add_argument("--in", dest="inp", required=True)
    b.add_argument("--repeats", type=int, default=5)
    b.add_argument("--augs", help="comma-separated subset (default: all eight)")
    b.add_argument("--mode", choices=["single", "double"], default="single")
    b.add_argument("--pretrain-epochs", type=int, default=20)
    b.add_argument("--finetune-epochs", type=int, default=20)
    b.add_argument("--lr", type=float, default=0.3, help="pretraining learning rate")
    b.add_argument("--finetune-lr", type=float, default=0.05)
    b.add_argument("--batch-size", type=int, default=64)
    b.add_argument("--temperature", type=float, default=0.5)
    b.add_argument("--label-ratio", type=float, default=0.3)
    b.add_argument("--hidden", type=_int_list, default=[64, 64])
    b.add_argument("--embedding-dim", type=int, default=32)
    b.add_argument("--jobs", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--out")
    b.set_defaults(func=cmd_benchmark)

    e = sub.add_parser("evaluate", help="Recall@1..K of a recommendation against a ranking")
    e.add_argument("--recommended", required=True)
    tg = e.add_mutually_exclusive_group(required=True)
    tg.add_argument("--truth")
    tg.add_argument("--truth-fixture", choices=FIXTURES)
    e.add_argument("--k", type=int, default=3)
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)
    return p


def run(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "recommend" and args.method == Method.TREND_SEASON.value \
            and not (args.inp or args.fixture):
        parser.error("recommend needs --in or --fixture")
    try:
        return args.func(args)
    except DataFormatError as exc:
        print(f"tsarm {args.command}: malformed input: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ShapeError, NonFiniteError) as exc:
        print(f"tsarm {args.command}: unusable data: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, TsarmError) as exc:
        print(f"tsarm {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main(argv=None):
    sys.exit(run(argv))
