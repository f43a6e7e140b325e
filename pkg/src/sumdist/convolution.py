"""Exact convolution of lattice distributions.

Three evaluation strategies produce the same distribution:

* naive dense -- direct sum of all pair products into a dense window,
* naive sparse -- the same pair products grouped by exact index sum, used
  when the window is much wider than the number of pairs,
* FFT -- dense-window transform, for large inputs on compact lattices.

The two naive routes accumulate in the same order and agree to the last
bit; the FFT route agrees to round-off (clamped and renormalized).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from . import _kernels
from .distribution import MAX_INDEX, Distribution, fraction_gcd
from .errors import FoldCountZero, IncompatibleQuanta, WindowTooLarge

__all__ = [
    "ConvolutionConfig",
    "ConvolutionDiagnostics",
    "ConvolutionPower",
    "PowerLadder",
    "convolve",
    "subtract_convolve",
    "fft_convolve",
    "convolve_power",
    "reflect",
]

# naive accumulation goes dense when the window is at most this many cells,
# or at most _DENSE_FILL cells per pair product
_DENSE_MIN_WINDOW = 1 << 16
_DENSE_FILL = 4
_RENORM_DRIFT = 1e-12


@dataclass(frozen=True)
class ConvolutionConfig:
    """Strategy knobs shared by all convolution entry points.

    fft
        ``"auto"`` picks FFT when the pair count exceeds ``naive_threshold``
        and the dense window fits ``max_window``; ``"on"`` always uses FFT;
        ``"off"`` never does.
    prune_eps
        Masses below this are dropped (then renormalized) after every
        convolution.  Zero keeps the computation exact.
    """

    fft: str = "auto"
    naive_threshold: float = 1e7
    max_window: int = 1 << 24
    prune_eps: float = 0.0

    def __post_init__(self):
        if self.fft not in ("auto", "on", "off"):
            raise ValueError(f"fft must be 'auto', 'on' or 'off', not {self.fft!r}")
        if self.max_window < 1:
            raise ValueError("max_window must be positive")
        if not self.prune_eps >= 0:
            raise ValueError("prune_eps must be non-negative")


DEFAULT_CONFIG = ConvolutionConfig()


@dataclass(frozen=True)
class ConvolutionDiagnostics:
    method: str
    pairs: int
    window: int
    max_negativity: float = 0.0
    clamped: int = 0
    pruned: int = 0


def _at_zero(d: Distribution) -> bool:
    return d.indices.size == 1 and d.indices[0] == 0


def _common_lattice(f: Distribution, g: Distribution):
    # a point mass at zero sits on every lattice
    if _at_zero(g):
        q = f.quantum
    elif _at_zero(f):
        q = g.quantum
    else:
        q = fraction_gcd(f.quantum, g.quantum)
    out = []
    for d in (f, g):
        ratio = d.quantum / q
        scale = ratio.numerator if ratio.denominator == 1 else 0
        span = max(abs(int(d.indices[0])), abs(int(d.indices[-1])))
        if span * scale > MAX_INDEX // 2:
            raise IncompatibleQuanta(
                f"quanta {d.quantum} and {q} cannot share an indexable lattice"
            )
        out.append(d.indices * scale if scale != 1 else d.indices)
    return q, out[0], out[1]


def reflect(d: Distribution) -> Distribution:
    """Distribution of ``-X``."""
    return Distribution(d.quantum, -d.indices[::-1], d.masses[::-1])


def _fft_dense(fi, fp, gi, gp, window):
    nf = int(fi[-1] - fi[0]) + 1
    ng = int(gi[-1] - gi[0]) + 1
    a = np.zeros(nf)
    b = np.zeros(ng)
    a[fi - fi[0]] = fp
    b[gi - gi[0]] = gp
    size = 1 << max(1, (window - 1).bit_length())
    mass = np.fft.irfft(np.fft.rfft(a, size) * np.fft.rfft(b, size), size)[:window]
    # structural support from the indicator convolution; counts are
    # integers so 0.5 separates them cleanly from round-off
    a[:] = 0.0
    b[:] = 0.0
    a[fi - fi[0]] = 1.0
    b[gi - gi[0]] = 1.0
    count = np.fft.irfft(np.fft.rfft(a, size) * np.fft.rfft(b, size), size)[:window]
    return mass, count > 0.5


def _combine(f, g, sign, config, force_fft=False):
    config = config or DEFAULT_CONFIG
    q, fi, gi = _common_lattice(f, g)
    fp, gp = f.masses, g.masses
    if sign < 0:
        gi = np.ascontiguousarray(-gi[::-1])
        gp = np.ascontiguousarray(gp[::-1])
    lo = int(fi[0] + gi[0])
    window = int(fi[-1] + gi[-1]) - lo + 1
    pairs = fi.size * gi.size

    use_fft = force_fft or config.fft == "on"
    if use_fft and window > config.max_window:
        raise WindowTooLarge(window, config.max_window)
    if config.fft == "auto" and not force_fft:
        use_fft = pairs > config.naive_threshold and window <= config.max_window

    max_neg = 0.0
    clamped = 0
    if use_fft:
        method = "fft"
        dense, hit = _fft_dense(fi, fp, gi, gp, window)
        idx = np.flatnonzero(hit)
        mass = dense[idx]
        neg = mass < 0.0
        if neg.any():
            max_neg = float(-mass[neg].min())
            clamped = int(neg.sum())
            mass[neg] = 0.0
        mass = mass / math.fsum(mass)
        idx = idx.astype(np.int64) + lo
    elif window <= min(config.max_window, max(_DENSE_MIN_WINDOW, _DENSE_FILL * pairs)):
        method = "naive-dense"
        dense, hit = _kernels.direct_dense(fi, fp, gi, gp, lo, window)
        idx = np.flatnonzero(hit)
        mass = dense[idx]
        idx = idx.astype(np.int64) + lo
    else:
        method = "naive-sparse"
        idx, mass = _kernels.direct_sparse(fi, fp, gi, gp)

    pruned = 0
    if config.prune_eps > 0:
        keep = mass >= config.prune_eps
        if not keep.any():
            keep = mass == mass.max()
        pruned = int(keep.size - keep.sum())
        idx, mass = idx[keep], mass[keep]
        mass = mass / math.fsum(mass)
    elif abs(math.fsum(mass) - 1.0) > _RENORM_DRIFT:
        mass = mass / math.fsum(mass)

    diag = ConvolutionDiagnostics(method, pairs, window, max_neg, clamped, pruned)
    return Distribution(q, idx, mass), diag


def convolve(f: Distribution, g: Distribution, config: Optional[ConvolutionConfig] = None,
             full_output: bool = False):
    """Distribution of ``X + W`` for independent ``X ~ f``, ``W ~ g``.

    With ``full_output=True`` returns ``(distribution, diagnostics)``.
    """
    d, diag = _combine(f, g, +1, config)
    return (d, diag) if full_output else d


def subtract_convolve(f: Distribution, g: Distribution,
                      config: Optional[ConvolutionConfig] = None, full_output: bool = False):
    """Distribution of ``X - W`` for independent ``X ~ f``, ``W ~ g``."""
    d, diag = _combine(f, g, -1, config)
    return (d, diag) if full_output else d


def fft_convolve(f: Distribution, g: Distribution, max_window: int = 1 << 24,
                 full_output: bool = False):
    """:func:`convolve` forced through the FFT route.

    Raises :class:`WindowTooLarge` if the dense window exceeds ``max_window``.
    """
    d, diag = _combine(f, g, +1, ConvolutionConfig(fft="on", max_window=max_window),
                       force_fft=True)
    return (d, diag) if full_output else d


class PowerLadder:
    """Convolution powers of one base distribution via repeated squaring.

    The squares ``f^(2^k)`` and every requested power are memoized, so a
    family of powers shares work.  ``power(n)`` always multiplies the
    squares in the same order, so results are reproducible bit for bit no
    matter which other powers were requested first.
    """

    def __init__(self, base: Distribution, config: Optional[ConvolutionConfig] = None):
        self.base = base
        self.config = config
        self._squares: List[Distribution] = [base]
        self._powers: Dict[int, Distribution] = {1: base}

    def _square(self, k):
        while len(self._squares) <= k:
            last = self._squares[-1]
            self._squares.append(convolve(last, last, self.config))
        return self._squares[k]

    def power(self, n: int) -> Distribution:
        n = _check_folds(n)
        cached = self._powers.get(n)
        if cached is not None:
            return cached
        acc = None
        k = 0
        rest = n
        while rest:
            if rest & 1:
                sq = self._square(k)
                acc = sq if acc is None else convolve(acc, sq, self.config)
            rest >>= 1
            k += 1
        self._powers[n] = acc
        return acc

    def cover(self, folds: Iterable[int]) -> "PowerLadder":
        """Materialize every power in ``folds``."""
        for n in sorted(set(folds)):
            self.power(n)
        return self

    def __contains__(self, n):
        return n in self._powers


def _check_folds(n):
    if isinstance(n, bool) or int(n) != n:
        raise TypeError("fold count must be an integer")
    n = int(n)
    if n < 1:
        raise FoldCountZero(f"fold count must be >= 1, got {n}")
    return n


def convolve_power(f: Distribution, n: int, config: Optional[ConvolutionConfig] = None) -> Distribution:
    """``n``-fold convolution of ``f`` with itself (the sum of ``n`` draws)."""
    return PowerLadder(f, config).power(n)


@dataclass(frozen=True)
class ConvolutionPower:
    base: Distribution
    folds: int
    result: Distribution = field(repr=False)

    @classmethod
    def compute(cls, base: Distribution, folds: int,
                config: Optional[ConvolutionConfig] = None) -> "ConvolutionPower":
        return cls(base, _check_folds(folds), convolve_power(base, folds, config))
