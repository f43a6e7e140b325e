"""Tail probabilities, normal approximations, CLT diagnostics and binning."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Tuple

import numpy as np

from .distribution import Distribution, Real, moments, to_fraction
from .errors import DegenerateVariance, NonPositiveVariance, NonPositiveWidth

__all__ = [
    "CltVerdict",
    "FrequencyTable",
    "tail_split",
    "upper_tail",
    "lower_tail",
    "strict_upper_tail",
    "strict_lower_tail",
    "survival",
    "normal_upper_tail",
    "clt_check",
    "frequency_table",
    "DEFAULT_SKEW_MAX",
    "DEFAULT_KURT_MAX",
]

DEFAULT_SKEW_MAX = 0.3
DEFAULT_KURT_MAX = 0.3


def _split_at(d: Distribution, pos: int) -> Tuple[float, float]:
    if pos <= 0:
        return 0.0, 1.0
    if pos >= d.indices.size:
        return 1.0, 0.0
    upper = math.fsum(d.masses[pos:])
    lower = math.fsum(d.masses[:pos])
    total = upper + lower
    # the smaller side is summed directly; the other is its exact complement
    if upper <= lower:
        up = upper / total
        return 1.0 - up, up
    low = lower / total
    return low, 1.0 - low


def tail_split(d: Distribution, t: Real) -> Tuple[float, float]:
    """``(P(X < t), P(X >= t))``; the two always add to exactly 1.0."""
    k = math.ceil(to_fraction(t) / d.quantum)
    return _split_at(d, int(np.searchsorted(d.indices, k, side="left")))


def upper_tail(d: Distribution, t: Real) -> float:
    """``P(X >= t)``."""
    return tail_split(d, t)[1]


def lower_tail(d: Distribution, t: Real) -> float:
    """``P(X <= t)``."""
    k = math.floor(to_fraction(t) / d.quantum)
    return _split_at(d, int(np.searchsorted(d.indices, k, side="right")))[0]


def strict_upper_tail(d: Distribution, t: Real) -> float:
    """``P(X > t)``, the exact complement of :func:`lower_tail`."""
    k = math.floor(to_fraction(t) / d.quantum)
    return _split_at(d, int(np.searchsorted(d.indices, k, side="right")))[1]


def strict_lower_tail(d: Distribution, t: Real) -> float:
    """``P(X < t)``, the exact complement of :func:`upper_tail`."""
    return tail_split(d, t)[0]


def survival(d: Distribution) -> np.ndarray:
    """``P(X >= x)`` at every support point ``x``, accumulated from the top."""
    tail = np.cumsum(d.masses[::-1])[::-1]
    return np.minimum(tail / tail[0], 1.0)


def normal_upper_tail(mean: float, variance: float, t: float,
                      continuity_correction: bool = False, quantum: float = 1.0) -> float:
    """``P(Z >= t)`` for ``Z ~ N(mean, variance)``.

    With ``continuity_correction`` the threshold moves down by half a
    lattice step, ``t - quantum / 2``.
    """
    if not variance > 0:
        raise NonPositiveVariance(f"variance must be positive, got {variance}")
    t = float(t)
    if continuity_correction:
        t -= float(quantum) / 2.0
    z = (t - float(mean)) / math.sqrt(float(variance))
    return 0.5 * math.erfc(z / math.sqrt(2.0))


@dataclass(frozen=True)
class CltVerdict:
    skewness: float
    excess_kurtosis: float
    passes: bool
    thresholds: Tuple[float, float]


def clt_check(d: Distribution, skew_max: float = DEFAULT_SKEW_MAX,
              kurt_max: float = DEFAULT_KURT_MAX) -> CltVerdict:
    """Judge whether ``d`` is close enough to normal by its shape moments."""
    m = moments(d)
    if m.skewness is None:
        raise DegenerateVariance("a point mass has no skewness or kurtosis")
    passes = abs(m.skewness) <= skew_max and abs(m.excess_kurtosis) <= kurt_max
    return CltVerdict(m.skewness, m.excess_kurtosis, passes, (skew_max, kurt_max))


@dataclass(frozen=True)
class FrequencyTable:
    """Contiguous bins ``[lower, lower + class_width)`` with their probabilities."""

    class_width: float
    bins: List[Tuple[float, float]]

    def total(self) -> float:
        return math.fsum(p for _, p in self.bins)


def frequency_table(d: Distribution, width: Real, origin: Real = 0) -> FrequencyTable:
    width = to_fraction(width)
    if width <= 0:
        raise NonPositiveWidth(f"class width must be positive, got {width}")
    origin = to_fraction(origin)
    q = d.quantum
    # bin number floor((idx*q - origin) / width) in exact integer arithmetic
    scale = q.numerator * origin.denominator * width.denominator
    offset = origin.numerator * q.denominator * width.denominator
    den = q.denominator * origin.denominator * width.numerator
    reach = max(abs(int(d.indices[0])), abs(int(d.indices[-1])))
    if reach * scale + abs(offset) < 2**62:
        bins = (d.indices * scale - offset) // den
    else:
        bins = np.array([(int(i) * scale - offset) // den for i in d.indices], dtype=object)
    first = int(bins[0])
    rel = np.asarray(bins - first, dtype=np.int64)
    probs = np.bincount(rel, weights=d.masses)
    rows = [(float(origin + (first + m) * width), float(p)) for m, p in enumerate(probs)]
    return FrequencyTable(float(width), rows)
