"""Visitor/compensation rarity analysis.

Each item is visited ``n`` times and collects a total compensation ``t``
(tags, comments, purchase value, ...).  With a known per-visit compensation
distribution ``g``, the exact distribution of the total is ``g^{*n}`` and
the rarity of an item is the upper tail ``p_t = P(T >= t)``.  The same
tail under the normal approximation ``N(n*mu, n*sigma^2)`` is ``p_z``.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .convolution import ConvolutionConfig, PowerLadder
from .distribution import Distribution, Real, moments, to_fraction
from .errors import (
    EmptyDataset,
    NegativeCompensation,
    RecordOutOfSupport,
    UnsupportedLevel,
)
from .stats import normal_upper_tail, survival, upper_tail

__all__ = [
    "RarityRecord",
    "RarityResult",
    "TagCountVector",
    "PRPoint",
    "ScoreReport",
    "build_compensation_dist",
    "score",
    "score_records",
    "l_index",
    "l_prime_index",
    "pr_curve",
    "divergence_report",
    "tail_log_ratios",
    "tail_divergence",
    "quantile_divergence",
]


@dataclass(frozen=True)
class TagCountVector:
    """Number of visitors ``k_j`` who paid compensation level ``j``."""

    counts: Mapping[Real, int]

    def __post_init__(self):
        if any(k < 0 for k in self.counts.values()):
            raise ValueError("level counts must be non-negative")

    @property
    def visitors(self) -> int:
        return sum(self.counts.values())

    @property
    def total(self) -> Fraction:
        return sum((to_fraction(j) * k for j, k in self.counts.items()), Fraction(0))


@dataclass(frozen=True)
class RarityRecord:
    item_id: str
    visitors: int
    total_compensation: Real
    level_counts: Optional[TagCountVector] = None

    def __post_init__(self):
        if isinstance(self.visitors, bool) or int(self.visitors) != self.visitors or self.visitors < 1:
            raise ValueError(f"record {self.item_id!r}: visitors must be a positive integer")
        if to_fraction(self.total_compensation) < 0:
            raise NegativeCompensation(f"record {self.item_id!r}: negative total")

    @property
    def avg_spend(self) -> float:
        return float(self.total_compensation) / self.visitors


@dataclass(frozen=True)
class RarityResult:
    item_id: str
    visitors: int
    total_compensation: Real
    p_t: float
    p_z: Optional[float]
    avg_spend: float
    l_index: Optional[float] = None
    l_prime_index: Optional[float] = None

    @property
    def log_ratio(self) -> Optional[float]:
        """``log10(p_t / p_z)``, or ``None`` unless both are positive."""
        if self.p_z is None or self.p_t <= 0.0 or self.p_z <= 0.0:
            return None
        return math.log10(self.p_t / self.p_z)


@dataclass(frozen=True)
class PRPoint:
    threshold: float
    precision: Optional[float]
    recall: Optional[float]


@dataclass
class ScoreReport:
    results: List[RarityResult]
    quarantine: List[Tuple[RarityRecord, str]] = field(default_factory=list)


def build_compensation_dist(events: Iterable) -> Distribution:
    """Empirical per-visit compensation distribution; every event is one draw.

    ``events`` yields ``(item_id, visitor_id, compensation)`` triples or
    objects with a ``compensation`` attribute.
    """
    counts: Counter = Counter()
    for ev in events:
        c = ev.compensation if hasattr(ev, "compensation") else ev[2]
        if isinstance(c, bool) or int(c) != c:
            raise ValueError(f"compensation must be an integer, got {c!r}")
        if c < 0:
            raise NegativeCompensation(f"negative compensation {c}")
        counts[int(c)] += 1
    if not counts:
        raise EmptyDataset("no events")
    n = sum(counts.values())
    levels = sorted(counts)
    return Distribution(
        Fraction(1),
        np.array(levels, dtype=np.int64),
        np.array([counts[j] / n for j in levels]),
    )


def _out_of_support_reason(g: Distribution, rec: RarityRecord) -> Optional[str]:
    t = to_fraction(rec.total_compensation)
    n = rec.visitors
    if (t / g.quantum).denominator != 1:
        return f"total {t} is off the lattice step {g.quantum}"
    if t < n * g.min_value or t > n * g.max_value:
        return f"total {t} outside [{n * g.min_value}, {n * g.max_value}] for {n} visitors"
    return None


def score_records(g: Distribution, records: Sequence[RarityRecord], continuity: bool = False,
                  config: Optional[ConvolutionConfig] = None,
                  ladder: Optional[PowerLadder] = None) -> ScoreReport:
    """Score every record, setting aside those unreachable under ``g^{*n}``.

    All powers ``g^{*n}`` needed are built before any record is scored.
    """
    if ladder is None:
        ladder = PowerLadder(g, config)
    elif ladder.base is not g:
        raise ValueError("ladder was built for a different base distribution")
    report = ScoreReport([])
    valid = []
    for rec in records:
        reason = _out_of_support_reason(g, rec)
        if reason is None:
            valid.append(rec)
        else:
            report.quarantine.append((rec, reason))
    ladder.cover(rec.visitors for rec in valid)

    summary = moments(g)
    for rec in valid:
        n = rec.visitors
        p_t = upper_tail(ladder.power(n), rec.total_compensation)
        if summary.variance > 0:
            p_z = normal_upper_tail(n * summary.mean, n * summary.variance,
                                    float(rec.total_compensation), continuity,
                                    quantum=float(g.quantum))
        else:
            p_z = None
        l = lp = None
        if rec.level_counts is not None:
            l = l_index(g, rec.level_counts)
            lp = l_prime_index(g, rec.level_counts)
        report.results.append(RarityResult(
            rec.item_id, n, rec.total_compensation, p_t, p_z, rec.avg_spend, l, lp))
    return report


def score(g: Distribution, records: Sequence[RarityRecord], continuity: bool = False,
          config: Optional[ConvolutionConfig] = None) -> List[RarityResult]:
    """Like :func:`score_records` but raises on the first unreachable record."""
    for rec in records:
        reason = _out_of_support_reason(g, rec)
        if reason is not None:
            raise RecordOutOfSupport(rec.item_id, reason)
    return score_records(g, records, continuity, config).results


def _counts(v) -> Mapping:
    return v.counts if isinstance(v, TagCountVector) else v


def l_index(g: Distribution, v: Union[TagCountVector, Mapping]) -> float:
    """Product of ``p_j ** k_j`` over compensation levels."""
    log_l = 0.0
    for j, k in _counts(v).items():
        if k == 0:
            continue
        p = g.mass_at(j)
        if p <= 0.0:
            raise UnsupportedLevel(j)
        log_l += k * math.log(p)
    return math.exp(log_l)


def l_prime_index(g: Distribution, v: Union[TagCountVector, Mapping]) -> float:
    """Product of ``P(X >= j) ** k_j`` over compensation levels."""
    log_l = 0.0
    for j, k in _counts(v).items():
        if k == 0:
            continue
        tail = upper_tail(g, j)
        if tail <= 0.0:
            raise UnsupportedLevel(j)
        log_l += k * math.log(tail)
    return math.exp(log_l)


def pr_curve(results: Sequence[RarityResult], thresholds: Sequence[float],
             rare_cutoff: float = 0.1) -> List[PRPoint]:
    """Precision and recall of the query ``avg_spend > a`` for rare items.

    An item is rare when ``p_t < rare_cutoff``.  Precision is ``None`` for
    an empty query, recall is ``None`` when nothing is rare.
    """
    if not results:
        raise EmptyDataset("no results to evaluate")
    thresholds = [float(a) for a in thresholds]
    if any(b < a for a, b in zip(thresholds, thresholds[1:])):
        raise ValueError("thresholds must be sorted ascending")
    spend = np.array([r.avg_spend for r in results])
    rare = np.array([r.p_t < rare_cutoff for r in results])
    n_rare = int(rare.sum())
    points = []
    for a in thresholds:
        query = spend > a
        n_query = int(query.sum())
        hits = int((query & rare).sum())
        precision = hits / n_query if n_query else None
        recall = hits / n_rare if n_rare else None
        points.append(PRPoint(a, precision, recall))
    return points


def divergence_report(results: Sequence[RarityResult], floor: float = 1e-4) -> List[Tuple[int, float]]:
    """``(visitors, log10(p_t / p_z))`` for results with both tails >= floor."""
    rows = []
    for r in results:
        if r.p_z is None or r.p_t < floor or r.p_z < floor:
            continue
        rows.append((r.visitors, r.log_ratio))
    return rows


def tail_log_ratios(g: Distribution, n: int, continuity: bool = False,
                    ladder: Optional[PowerLadder] = None):
    """Exact and normal upper tails at every support point of ``g^{*n}``.

    Returns ``(values, p_t, p_z)`` arrays.
    """
    ladder = ladder or PowerLadder(g)
    power = ladder.power(n)
    m = moments(g)
    values = power.values
    p_t = survival(power)
    shift = float(g.quantum) / 2.0 if continuity else 0.0
    z = (values - shift - n * m.mean) / math.sqrt(n * m.variance)
    p_z = 0.5 * np.array([math.erfc(x / math.sqrt(2.0)) for x in z])
    return values, p_t, p_z


def tail_divergence(g: Distribution, n: int, tail_level: float = 0.1, floor: float = 1e-4,
                    continuity: bool = False, ladder: Optional[PowerLadder] = None) -> float:
    """Median ``|log10(p_t / p_z)|`` over support points with ``floor <= p_t <= tail_level``."""
    _, p_t, p_z = tail_log_ratios(g, n, continuity, ladder)
    sel = (p_t <= tail_level) & (p_t >= floor) & (p_z >= floor)
    if not sel.any():
        raise ValueError(f"no support points of the {n}-fold sum fall in the tail window")
    return float(np.median(np.abs(np.log10(p_t[sel] / p_z[sel]))))


def quantile_divergence(g: Distribution, n: int, level: float = 0.9,
                        continuity: bool = False, ladder: Optional[PowerLadder] = None) -> float:
    """``|log10(p_t / p_z)|`` at the first support point whose upper tail drops to ``1 - level``."""
    _, p_t, p_z = tail_log_ratios(g, n, continuity, ladder)
    pos = int(np.argmax(p_t <= 1.0 - level))
    return abs(math.log10(p_t[pos] / p_z[pos]))
