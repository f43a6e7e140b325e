import math
import sys
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from sumdist import _kernels
from sumdist.distribution import from_pairs

DATA = Path(__file__).parent / "data"

# Table of winnings (yen) and number of winning tickets, one row per prize.
LOTTERY_TABLE = [
    (40_000_000, 7),
    (10_000_000, 14),
    (10_000_000, 5),
    (1_000_000, 130),
    (140_000, 130),
    (200_000, 903),
    (100_000, 645),
    (10_000, 1_300),
    (1_000, 26_000),
    (200, 1_300_000),
    (0, 11_670_866),
]


def lottery_pairs():
    total = sum(c for _, c in LOTTERY_TABLE)
    merged = defaultdict(int)
    for v, c in LOTTERY_TABLE:
        merged[v] += c
    return [(v, c / total) for v, c in merged.items()], total


@pytest.fixture(scope="session")
def lottery():
    pairs, _ = lottery_pairs()
    return from_pairs(pairs)


def brute_force(f, g, sign=1):
    """Enumerate every outcome pair; keys are exact values."""
    out = defaultdict(float)
    for x, px in f.items():
        for w, pw in g.items():
            out[x + sign * w] += px * pw
    return dict(sorted(out.items()))


def as_exact_dict(d):
    return dict(d.items())


def binomial_pmf(n, p):
    """Closed-form binomial pmf through log-gamma."""
    out = np.zeros(n + 1)
    for k in range(n + 1):
        if p == 0.0:
            out[k] = 1.0 if k == 0 else 0.0
            continue
        logc = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
        out[k] = math.exp(logc + k * math.log(p) + (n - k) * math.log1p(-p))
    return out


def random_distribution(rng, max_support=8, lo=-20, hi=20, quantum=1):
    size = int(rng.integers(1, max_support + 1))
    idx = rng.choice(np.arange(lo, hi + 1), size=size, replace=False)
    w = rng.random(size) + 1e-3
    return from_pairs([(int(i) * quantum, float(x)) for i, x in zip(idx, w)], policy="renormalize")


@st.composite
def distributions(draw, max_support=8, lo=-30, hi=30, decimals=(0, 1, 2)):
    scale = Fraction(1, 10 ** draw(st.sampled_from(decimals)))
    values = draw(st.lists(st.integers(lo, hi), min_size=1, max_size=max_support, unique=True))
    weights = draw(st.lists(st.floats(1e-6, 1.0), min_size=len(values), max_size=len(values)))
    return from_pairs([(v * scale, w) for v, w in zip(values, weights)], policy="renormalize")


@pytest.fixture(params=_kernels.available_backends())
def kernel_backend(request, monkeypatch):
    """Run a test once per available convolution kernel."""
    module = _kernels.backend_module(request.param)
    monkeypatch.setattr(_kernels, "direct_dense", module.direct_dense)
    return request.param


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.format_results():
        terminalreporter.write_line(line)
