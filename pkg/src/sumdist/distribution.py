"""Finite discrete distributions on an integer lattice.

A :class:`Distribution` stores its support as sorted signed integer indices
together with an exact rational ``quantum``; the real value of a support
point is ``index * quantum``.  Keeping the lattice exact means that sums of
support values collide exactly under convolution, which floating-point keys
cannot guarantee.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    DuplicateCategory,
    EmptyInput,
    InvalidValue,
    NegativeProbability,
    NotNormalized,
    ZeroScale,
)

__all__ = [
    "Distribution",
    "MomentSummary",
    "from_pairs",
    "from_mapping",
    "point_mass",
    "bernoulli",
    "moments",
    "linear_transform",
    "to_fraction",
    "MAX_FRACTION_DIGITS",
    "PARSE_TOLERANCE",
    "INTERNAL_TOLERANCE",
]

Real = Union[int, float, str, Decimal, Fraction]

MAX_FRACTION_DIGITS = 12
DECIMAL_SCALE = 10**MAX_FRACTION_DIGITS
PARSE_TOLERANCE = 1e-6
INTERNAL_TOLERANCE = 1e-9
# indices must stay exactly representable as float64 for moment arithmetic
MAX_INDEX = 2**53


def to_fraction(value: Real) -> Fraction:
    """Convert a decimal literal to an exact :class:`Fraction`.

    Floats are read through their shortest repr, so ``0.1`` means the
    decimal one tenth rather than its binary approximation.  Values needing
    more than :data:`MAX_FRACTION_DIGITS` fractional digits are rejected.
    """
    if isinstance(value, bool):
        raise InvalidValue(value, "booleans are not numeric values")
    if isinstance(value, Fraction):
        frac = value
    elif isinstance(value, int):
        return Fraction(value)
    elif isinstance(value, float):
        if not math.isfinite(value):
            raise InvalidValue(value, "not finite")
        frac = Fraction(Decimal(float.__repr__(float(value))))
    else:
        try:
            dec = value if isinstance(value, Decimal) else Decimal(str(value).strip())
        except InvalidOperation:
            raise InvalidValue(value, "not a decimal literal") from None
        if not dec.is_finite():
            raise InvalidValue(value, "not finite")
        frac = Fraction(dec)
    if DECIMAL_SCALE % frac.denominator:
        raise InvalidValue(value, f"needs more than {MAX_FRACTION_DIGITS} fractional digits")
    return frac


def fraction_gcd(x: Fraction, y: Fraction) -> Fraction:
    """Greatest common divisor of two rationals (non-negative result)."""
    return Fraction(
        math.gcd(x.numerator * y.denominator, y.numerator * x.denominator),
        x.denominator * y.denominator,
    )


def format_decimal(value: Fraction) -> str:
    """Render an exact decimal fraction without exponent or trailing zeros."""
    if value.denominator == 1:
        return str(value.numerator)
    digits = 1
    while 10**digits % value.denominator:
        digits += 1
        if digits > 64:
            raise InvalidValue(value, "not a terminating decimal")
    scaled = value * 10**digits
    sign = "-" if scaled < 0 else ""
    text = str(abs(scaled.numerator)).rjust(digits + 1, "0")
    whole, frac = text[:-digits], text[-digits:].rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def _check_quantum(quantum: Fraction) -> Fraction:
    if quantum <= 0:
        raise InvalidValue(quantum, "quantum must be positive")
    if DECIMAL_SCALE % quantum.denominator:
        raise InvalidValue(quantum, f"lattice step needs more than {MAX_FRACTION_DIGITS} fractional digits")
    return quantum


@dataclass(frozen=True)
class MomentSummary:
    """Mean, spread and shape of a distribution.

    ``skewness`` and ``excess_kurtosis`` are ``None`` for a point mass.
    """

    mean: float
    variance: float
    std_dev: float
    skewness: Optional[float]
    excess_kurtosis: Optional[float]


@dataclass(frozen=True, eq=False)
class Distribution:
    """Immutable probability mass function on ``{index * quantum}``.

    Build instances with :func:`from_pairs` (or the io parsers); the raw
    constructor expects already-sorted, validated arrays.
    """

    quantum: Fraction
    indices: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        idx = np.ascontiguousarray(self.indices, dtype=np.int64)
        mass = np.ascontiguousarray(self.masses, dtype=np.float64)
        if idx.ndim != 1 or idx.shape != mass.shape:
            raise ValueError("indices and masses must be 1-D arrays of equal length")
        if idx.size == 0:
            raise EmptyInput("distribution support is empty")
        if idx.size > 1 and not np.all(np.diff(idx) > 0):
            raise ValueError("indices must be strictly increasing")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise NegativeProbability(float(mass[np.argmin(mass)]))
        total = float(np.sum(mass))
        if abs(total - 1.0) > INTERNAL_TOLERANCE:
            raise NotNormalized(total)
        if isinstance(self.quantum, Fraction):
            q = self.quantum
        else:
            q = to_fraction(self.quantum)
        idx.setflags(write=False)
        mass.setflags(write=False)
        object.__setattr__(self, "quantum", _check_quantum(q))
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "masses", mass)

    def __len__(self) -> int:
        return int(self.indices.size)

    def __eq__(self, other):
        if not isinstance(other, Distribution):
            return NotImplemented
        return (
            self.quantum == other.quantum
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.masses, other.masses)
        )

    __hash__ = None

    def __repr__(self):
        head = ", ".join(f"{format_decimal(v)}: {p:.6g}" for v, p in list(self.items())[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"Distribution({{{head}{more}}}, quantum={format_decimal(self.quantum)})"

    @property
    def values(self) -> np.ndarray:
        """Support values as floats."""
        return self.indices.astype(np.float64) * float(self.quantum)

    @property
    def min_value(self) -> Fraction:
        return int(self.indices[0]) * self.quantum

    @property
    def max_value(self) -> Fraction:
        return int(self.indices[-1]) * self.quantum

    @property
    def total_mass(self) -> float:
        return math.fsum(self.masses)

    def items(self) -> Iterator[Tuple[Fraction, float]]:
        q = self.quantum
        for i, p in zip(self.indices.tolist(), self.masses.tolist()):
            yield i * q, p

    def to_dict(self) -> dict:
        """``{value: mass}`` with float keys, for quick inspection."""
        return {float(v): p for v, p in self.items()}

    def index_of(self, value: Real) -> Optional[int]:
        """Lattice index of ``value``, or ``None`` if it is off the lattice."""
        ratio = to_fraction(value) / self.quantum
        return ratio.numerator if ratio.denominator == 1 else None

    def mass_at(self, value: Real) -> float:
        k = self.index_of(value)
        if k is None:
            return 0.0
        pos = int(np.searchsorted(self.indices, k))
        if pos < self.indices.size and self.indices[pos] == k:
            return float(self.masses[pos])
        return 0.0


def _lattice(values: Sequence[Fraction]) -> Tuple[Fraction, list]:
    scaled = [int(v * DECIMAL_SCALE) for v in values]
    step = math.gcd(*scaled)
    if step == 0:
        return Fraction(1), [0] * len(scaled)
    return Fraction(step, DECIMAL_SCALE), [s // step for s in scaled]


def from_pairs(pairs: Iterable[Tuple[Real, float]], policy: str = "strict") -> Distribution:
    """Build a distribution from ``(value, probability)`` pairs.

    The lattice step is the greatest common divisor of the values.  With
    ``policy="strict"`` the probabilities must already sum to one within
    1e-6 (small residue is divided out); ``policy="renormalize"`` divides
    any positive total through.

    Errors carry an ``index`` attribute with the offending pair position.
    """
    if policy not in ("strict", "renormalize"):
        raise ValueError(f"unknown normalization policy {policy!r}")
    pairs = list(pairs)
    if not pairs:
        raise EmptyInput("no (value, probability) pairs given")
    values = []
    probs = []
    for pos, (v, p) in enumerate(pairs):
        try:
            values.append(to_fraction(v))
        except InvalidValue as exc:
            exc.index = pos
            raise
        p = float(p)
        if not math.isfinite(p) or p < 0:
            raise NegativeProbability(v, index=pos)
        probs.append(p)
    seen = {}
    for pos, v in enumerate(values):
        if v in seen:
            raise DuplicateCategory(format_decimal(v), index=pos)
        seen[v] = pos

    total = math.fsum(probs)
    if total <= 0:
        raise NotNormalized(total)
    if policy == "strict" and abs(total - 1.0) > PARSE_TOLERANCE:
        raise NotNormalized(total)
    mass = np.asarray(probs, dtype=np.float64)
    if policy == "renormalize" or abs(total - 1.0) > INTERNAL_TOLERANCE:
        mass = mass / total

    quantum, idx = _lattice(values)
    if max(abs(i) for i in idx) > MAX_INDEX:
        raise InvalidValue(values[0], "support span too wide for the lattice step")
    idx = np.asarray(idx, dtype=np.int64)
    order = np.argsort(idx, kind="stable")
    return Distribution(quantum, idx[order], mass[order])


def from_mapping(mapping, policy: str = "strict") -> Distribution:
    return from_pairs(mapping.items(), policy=policy)


def point_mass(value: Real = 0) -> Distribution:
    return from_pairs([(value, 1.0)])


def bernoulli(p: float) -> Distribution:
    """Two-point distribution on {0, 1}; support keeps both points even if p is 0 or 1."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    return Distribution(Fraction(1), np.array([0, 1]), np.array([1.0 - p, p]))


def moments(d: Distribution) -> MomentSummary:
    # Work in index units shifted to the first support point, which keeps
    # the arithmetic exact-integer as long as possible; np.sum is pairwise.
    rel = (d.indices - d.indices[0]).astype(np.float64)
    p = d.masses
    mean_rel = float(np.sum(rel * p))
    dev = rel - mean_rel
    dev2 = dev * dev
    m2 = float(np.sum(dev2 * p))
    q = float(d.quantum)
    mean = (float(d.indices[0]) + mean_rel) * q
    variance = m2 * q * q
    if m2 <= 0.0:
        return MomentSummary(mean, 0.0, 0.0, None, None)
    m3 = float(np.sum(dev2 * dev * p))
    m4 = float(np.sum(dev2 * dev2 * p))
    return MomentSummary(
        mean=mean,
        variance=variance,
        std_dev=math.sqrt(variance),
        skewness=m3 / m2**1.5,
        excess_kurtosis=m4 / (m2 * m2) - 3.0,
    )


def linear_transform(d: Distribution, a: Real, b: Real) -> Distribution:
    """Distribution of ``a * X + b``."""
    a = to_fraction(a)
    b = to_fraction(b)
    if a == 0:
        raise ZeroScale("scale factor a must be non-zero")
    step = abs(a) * d.quantum
    quantum = fraction_gcd(step, b) if b else step
    _check_quantum(quantum)
    mult = a * d.quantum / quantum
    shift = b / quantum
    assert mult.denominator == 1 and shift.denominator == 1
    mult, shift = mult.numerator, shift.numerator
    span = max(abs(int(d.indices[0])), abs(int(d.indices[-1])))
    if span * abs(mult) + abs(shift) > MAX_INDEX:
        raise InvalidValue(b, "transformed support too wide for the lattice step")
    idx = d.indices * mult + shift
    mass = d.masses
    if mult < 0:
        idx = idx[::-1]
        mass = mass[::-1]
    return Distribution(quantum, idx, mass)
