"""Trend/seasonality based augmentation recommendation.

Pipeline: profile the query with STL, compare its mean trend and one-period
seasonal shape against two templates each, drop a component whose two
similarities are too close to tell apart, weigh trend against seasonality
by power, pick the matching synthetic dataset ("twin") and return that
dataset's best augmentations. Popularity and random baselines and Recall@K
are provided for evaluation.
"""

import hashlib
import json
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources

import numpy as np

from .augment import METHODS, canonical_name
from .errors import ConfigError, DataFormatError, DegenerateVector, Inapplicable
from .numerics import cosine_similarity
from .stl import DatasetProfile
from .synthgen import (
    DatasetId, SeasonKind, TrendKind, gen_seasonality, gen_trend,
)

SYNTHETIC_RANKINGS_SHA256 = "6f76e9942ac87dc63cf6a6bc526bd0b24be90863c90000d9e745363dd7e4da1a"
DS_THRESHOLD = 0.05
# Template shape parameters: class-range midpoints.
T2_ALPHA = 0.2
S1_BETA = 0.5
S2_BETA = 5.0


# --------------------------------------------------------------- rankings

@dataclass(frozen=True)
class RankEntry:
    method: str
    rank: int
    tie_group: int
    listed: bool = True


@dataclass
class RankedAugmentations:
    """All nine methods in rank order with tie groups.

    Methods that a published ranking omits are appended (by name) as one
    final tie group with ``listed=False``.
    """

    entries: list
    source: str = "query"

    @classmethod
    def from_groups(cls, groups, source="query"):
        seen, entries, pos = set(), [], 0
        for g, group in enumerate(groups, start=1):
            for m in group:
                m = canonical_name(m)
                if m in seen:
                    raise DataFormatError(f"{source}: method {m} listed twice")
                seen.add(m)
                pos += 1
                entries.append(RankEntry(m, pos, g))
        tail = sorted(set(METHODS) - seen)
        for m in tail:
            pos += 1
            entries.append(RankEntry(m, pos, len(groups) + 1, listed=False))
        return cls(entries, source)

    @property
    def methods(self):
        return [e.method for e in self.entries]

    @property
    def groups(self):
        out = {}
        for e in self.entries:
            out.setdefault(e.tie_group, []).append(e.method)
        return [out[k] for k in sorted(out)]

    def fusion_rank(self, method):
        """Listed position; unlisted methods share the mean of the tail positions."""
        tail = [e.rank for e in self.entries if not e.listed]
        for e in self.entries:
            if e.method == method:
                return float(e.rank) if e.listed else float(np.mean(tail))
        raise ConfigError(f"{method} not in ranking {self.source}")

    def to_json(self):
        return {
            "source": self.source,
            "entries": [
                {"method": e.method, "rank": e.rank, "tie_group": e.tie_group, "listed": e.listed}
                for e in self.entries
            ],
        }

    @classmethod
    def from_json(cls, obj):
        try:
            rows = sorted(obj["entries"], key=lambda r: r["rank"])
            entries = [RankEntry(canonical_name(r["method"]), int(r["rank"]), int(r["tie_group"]),
                                 bool(r.get("listed", True))) for r in rows]
        except (KeyError, TypeError, ValueError) as exc:
            raise DataFormatError(f"bad ranking object: {exc}") from None
        return cls(entries, obj.get("source", "query"))


def _read_data(name):
    return resources.files("tsarm").joinpath("data", name).read_bytes()


def load_synthetic_rankings(verify=True):
    """Canonical per-dataset rankings keyed by dataset id ("A1".."D3")."""
    raw = _read_data("synthetic_rankings.json")
    if verify and hashlib.sha256(raw).hexdigest() != SYNTHETIC_RANKINGS_SHA256:
        raise DataFormatError("synthetic_rankings.json does not match its pinned checksum")
    doc = json.loads(raw)
    return {k: RankedAugmentations.from_groups(v, k) for k, v in doc["rankings"].items()}


def load_realworld():
    """Published real-world profiles and ground-truth rankings by name."""
    doc = json.loads(_read_data("realworld.json"))
    out = {}
    for name, rec in doc["datasets"].items():
        out[name] = {
            "similarities": tuple(rec["similarities"]),
            "divergence": tuple(rec["divergence"]),
            "powers": tuple(rec["powers"]),
            "truth": RankedAugmentations.from_groups(rec["truth"], name),
        }
    return out


# ------------------------------------------------------------- similarity

def trend_templates(n):
    """Linear ramp and ``t**0.2`` on t = 1..n."""
    return gen_trend(TrendKind.LINEAR, n, 1.0), gen_trend(TrendKind.NONLINEAR, n, T2_ALPHA)


def season_templates(period):
    """One cycle of the trig template and one Morlet pulse, both ``period`` long."""
    s1 = gen_seasonality(SeasonKind.TRIG, period, S1_BETA, 2.0 * np.pi / period, 0.0)
    s2 = gen_seasonality(SeasonKind.MORLET, period, S2_BETA)
    return s1, s2


def divergence_score(sim_a, sim_b):
    """``2 * (max - min) / (sim_a + sim_b)``."""
    denom = sim_a + sim_b
    if not denom > 0.0:
        raise DegenerateVector(f"divergence score needs a positive similarity sum, got {denom}")
    return 2.0 * (max(sim_a, sim_b) - min(sim_a, sim_b)) / denom


def component_divergence(sim_a, sim_b):
    """Divergence after clipping negative similarities to zero.

    A template the query anti-correlates with is treated as "no match";
    if neither matches the component carries no signal and scores 0.
    """
    a, b = max(sim_a, 0.0), max(sim_b, 0.0)
    if a + b <= 0.0:
        return 0.0
    return divergence_score(a, b)


def weight_assignment(p_trend, p_season):
    """Map the trend/season power ratio to ``(w1, w2)``."""
    if p_trend < 0 or p_season < 0:
        raise ConfigError("powers must be non-negative")
    if p_season == 0:
        return 0.9, 0.1
    ratio = p_trend / p_season
    if ratio <= 5.0 / 9.0:
        return 0.1, 0.9
    if ratio < 5.0:
        return 0.5, 0.5
    return 0.9, 0.1


@dataclass
class SimilarityReport:
    sim_t1: float
    sim_t2: float
    sim_s1: float
    sim_s2: float
    p_trend: float = float("nan")
    p_season: float = float("nan")
    periods_used: list = field(default_factory=list)

    @property
    def ds_trend(self):
        return component_divergence(self.sim_t1, self.sim_t2)

    @property
    def ds_season(self):
        return component_divergence(self.sim_s1, self.sim_s2)

    @property
    def weights(self):
        return weight_assignment(self.p_trend, self.p_season)

    def to_json(self):
        w1, w2 = self.weights
        return {
            "similarities": {"t1": self.sim_t1, "t2": self.sim_t2, "s1": self.sim_s1, "s2": self.sim_s2},
            "divergence_scores": {"trend": self.ds_trend, "season": self.ds_season},
            "powers": {"trend": self.p_trend, "season": self.p_season},
            "weights": {"w1": w1, "w2": w2},
            "periods_used": list(self.periods_used),
        }


def component_similarities(profiles):
    """Template similarities (and powers) averaged over one or more profiles."""
    if isinstance(profiles, DatasetProfile):
        profiles = [profiles]
    profiles = list(profiles)
    if not profiles:
        raise ConfigError("no profiles given")
    rows = []
    for p in profiles:
        trend = p.aligned_trend
        t1, t2 = trend_templates(trend.shape[0])
        s1, s2 = season_templates(p.period)
        seas = p.mean_seasonal_one_period
        try:
            rows.append((cosine_similarity(trend, t1), cosine_similarity(trend, t2),
                         cosine_similarity(seas, s1), cosine_similarity(seas, s2),
                         p.trend_power, p.seasonal_power))
        except DegenerateVector as exc:
            raise DegenerateVector(f"profile at period {p.period}: {exc}") from None
    m = np.mean(np.asarray(rows), axis=0)
    return SimilarityReport(*map(float, m), periods_used=[q for p in profiles for q in p.periods_used])


# -------------------------------------------------------------- twin pick

class TwinKind(str, Enum):
    SINGLE = "single"
    PAIR = "pair"
    NONE = "none"


@dataclass
class TwinDecision:
    kind: TwinKind
    datasets: tuple
    trend_used: bool
    season_used: bool
    assigned_w1: float
    trend: TrendKind
    season: SeasonKind
    ds_trend: float = 0.0
    ds_season: float = 0.0

    def to_json(self):
        return {
            "kind": self.kind.value,
            "datasets": [str(d) for d in self.datasets],
            "trend_used": self.trend_used,
            "season_used": self.season_used,
            "assigned_w1": self.assigned_w1,
            "trend": self.trend.value,
            "season": self.season.value,
        }


def select_twin(report, threshold=DS_THRESHOLD):
    """Choose the synthetic twin from a complete SimilarityReport."""
    ds_t, ds_s = report.ds_trend, report.ds_season
    trend_used = ds_t >= threshold
    season_used = ds_s >= threshold
    trend = TrendKind.LINEAR if report.sim_t1 >= report.sim_t2 else TrendKind.NONLINEAR
    season = SeasonKind.TRIG if report.sim_s1 >= report.sim_s2 else SeasonKind.MORLET
    w1 = report.weights[0]
    if trend_used and season_used:
        kind, ids = TwinKind.SINGLE, (DatasetId.from_parts(trend, season, w1),)
    elif season_used:
        kind = TwinKind.PAIR
        ids = tuple(DatasetId.from_parts(t, season, w1) for t in TrendKind)
    elif trend_used:
        kind = TwinKind.PAIR
        ids = tuple(DatasetId.from_parts(trend, s, w1) for s in SeasonKind)
    else:
        kind, ids = TwinKind.NONE, ()
    return TwinDecision(kind, ids, trend_used, season_used, w1, trend, season, ds_t, ds_s)


# ---------------------------------------------------------------- top-k

def _check_k(k):
    if not 1 <= k <= len(METHODS):
        raise ConfigError(f"k must be in 1..{len(METHODS)}, got {k}")


def fuse_rankings(rankings):
    """Order methods by mean rank, then best single rank, then name."""
    def key(m):
        ranks = [r.fusion_rank(m) for r in rankings]
        return (float(np.mean(ranks)), min(ranks), m)
    return sorted(METHODS, key=key)


def recommend_topk(twin, table, k):
    """Top-``k`` methods from the twin's ranking (or the fused pair ranking)."""
    _check_k(k)
    if twin.kind is TwinKind.NONE:
        raise Inapplicable(
            f"no synthetic twin: trend divergence {twin.ds_trend:.4f} and seasonal "
            f"divergence {twin.ds_season:.4f} are both below threshold",
            twin.ds_trend, twin.ds_season,
        )
    if twin.kind is TwinKind.SINGLE:
        return table[str(twin.datasets[0])].methods[:k]
    return fuse_rankings([table[str(d)] for d in twin.datasets])[:k]


def popularity_recommend(table, k):
    """Methods by total rank over all synthetic datasets (query independent)."""
    _check_k(k)
    rankings = [table[key] for key in sorted(table)]
    return sorted(METHODS, key=lambda m: (sum(r.fusion_rank(m) for r in rankings), m))[:k]


def random_recommend(k, rng):
    _check_k(k)
    return [METHODS[i] for i in rng.permutation(len(METHODS))[:k]]


def recall_at_k(recommended, truth, k):
    """``|top-k(recommended) & top-k(truth)| / k``."""
    if k <= 0:
        raise ConfigError("k must be positive")
    truth = truth.methods if isinstance(truth, RankedAugmentations) else list(truth)
    recommended = list(recommended)
    if k > min(len(recommended), len(truth)):
        raise ConfigError(f"k={k} exceeds list lengths {len(recommended)}/{len(truth)}")
    return len(set(recommended[:k]) & set(truth[:k])) / k


# --------------------------------------------------------------- reports

class Method(str, Enum):
    TREND_SEASON = "trend_season"
    POPULARITY = "popularity"
    RANDOM = "random"


@dataclass
class RecommendationReport:
    top_k: list
    method: Method
    similarity: SimilarityReport | None = None
    twin: TwinDecision | None = None

    def to_json(self):
        out = {"method": self.method.value, "k": len(self.top_k), "top_k": list(self.top_k)}
        if self.similarity is not None:
            out.update(self.similarity.to_json())
        if self.twin is not None:
            out["twin"] = self.twin.to_json()
        return out


def recommend(profiles_or_report, k=3, table=None, threshold=DS_THRESHOLD):
    """Full trend/season recommendation; raises Inapplicable on no match."""
    rep = profiles_or_report
    if not isinstance(rep, SimilarityReport):
        rep = component_similarities(rep)
    table = load_synthetic_rankings() if table is None else table
    twin = select_twin(rep, threshold)
    return RecommendationReport(recommend_topk(twin, table, k), Method.TREND_SEASON, rep, twin)


# --------------------------------------------------------------- fixtures

def _unit_with_cosines(u1, u2, c1, c2, seed):
    """Unit vector whose cosines with unit vectors ``u1``, ``u2`` are ``c1``, ``c2``."""
    e1 = u1
    r = u2 - np.dot(u2, e1) * e1
    e2 = r / np.linalg.norm(r)
    g, h = np.dot(u2, e1), np.dot(u2, e2)
    a = c1
    b = (c2 - a * g) / h
    rest = 1.0 - a * a - b * b
    if rest < 0:
        raise ConfigError("requested cosines are not jointly attainable")
    e3 = np.random.default_rng(seed).standard_normal(u1.shape[0])
    for e in (e1, e2):
        e3 -= np.dot(e3, e) * e
    e3 /= np.linalg.norm(e3)
    return a * e1 + b * e2 + np.sqrt(rest) * e3


def fixture_profile(name, length=96, period=24):
    """Constructed stand-in profile for a published real-world dataset.

    The vectors are synthesized so their template cosines and powers equal
    the published values; they are not the real data.
    """
    rec = load_realworld()[name]
    st1, st2, ss1, ss2 = rec["similarities"]
    pt, ps = rec["powers"]
    t1, t2 = trend_templates(length)
    s1, s2 = season_templates(period)
    unit = lambda v: v / np.linalg.norm(v)  # noqa: E731
    trend = _unit_with_cosines(unit(t1), unit(t2), st1, st2, 1) * np.sqrt(pt * length)
    seas = _unit_with_cosines(unit(s1), unit(s2), ss1, ss2, 2) * np.sqrt(ps * period)
    return DatasetProfile(period, trend, seas, trend.copy(), float(pt), float(ps), 0)


FIXTURES = ("HAR", "PTB", "FD", "MP", "ElecD", "SPX500")
__all__ = [
    "RankEntry", "RankedAugmentations", "SimilarityReport", "TwinDecision",
    "TwinKind", "RecommendationReport", "Method", "component_similarities",
    "divergence_score", "weight_assignment", "select_twin", "recommend_topk",
    "popularity_recommend", "random_recommend", "recall_at_k", "recommend",
    "load_synthetic_rankings", "load_realworld", "fixture_profile", "FIXTURES",
]
