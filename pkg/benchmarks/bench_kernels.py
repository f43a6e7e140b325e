"""Compare the compiled and pure-Python dense kernels, plus the FFT route.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each case reports the best wall time per backend and checks that the two
kernels agree bit for bit.
"""
import argparse
import time

import numpy as np

from sumdist import _kernels
from sumdist.convolution import ConvolutionConfig, convolve, convolve_power
from sumdist.distribution import bernoulli
from sumdist.io import tag_count_profile


def _best(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def _cases():
    rng = np.random.default_rng(0)
    g = tag_count_profile()
    yield "tag profile ^100 * ^100", convolve_power(g, 100), convolve_power(g, 100)
    yield "Bernoulli(0.001) ^2500 * ^2501", convolve_power(bernoulli(0.001), 2500), \
        convolve_power(bernoulli(0.001), 2501)
    for nf, ng in ((2000, 2000), (20000, 12), (12, 20000)):
        f = _dense(rng, nf)
        h = _dense(rng, ng)
        yield f"random dense {nf} x {ng}", f, h


def _dense(rng, n):
    from fractions import Fraction
    from sumdist.distribution import Distribution

    w = rng.random(n)
    return Distribution(Fraction(1), np.arange(n, dtype=np.int64), w / w.sum())


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = _kernels.available_backends()
    print(f"default backend: {_kernels.BACKEND}; available: {', '.join(backends)}")
    header = f"{'case':34s} {'pairs':>12s}" + "".join(f" {b:>10s}" for b in backends) + f" {'fft':>10s}  same"
    print(header)
    for name, f, g in _cases():
        lo = int(f.indices[0] + g.indices[0])
        span = int(f.indices[-1] + g.indices[-1]) - lo + 1
        times = []
        outs = []
        for b in backends:
            kern = _kernels.backend_module(b).direct_dense
            t, out = _best(lambda: kern(f.indices, f.masses, g.indices, g.masses, lo, span), args.repeat)
            times.append(t)
            outs.append(out[0])
        t_fft, _ = _best(lambda: convolve(f, g, ConvolutionConfig(fft="on")), args.repeat)
        same = all(np.array_equal(outs[0], o) for o in outs[1:])
        row = f"{name:34s} {len(f) * len(g):12d}" + "".join(f" {t * 1e3:8.2f}ms" for t in times)
        print(row + f" {t_fft * 1e3:8.2f}ms  {'yes' if same else 'NO'}")


if __name__ == "__main__":
    main()
