"""Pure numpy kernels, used when the compiled extension is unavailable.

Both kernels add the pair products ``fp[a] * gp[b]`` into their output
cells in row-major order over ``a``; this ordering is part of the contract,
since it makes the result reproducible against plain enumeration.
"""
import numpy as np

# pair products materialized per block in the add.at path
_BLOCK = 1 << 20
_ROW_LOOP_MAX = 32


def direct_dense(fi, fp, gi, gp, lo, span):
    out = np.zeros(span, dtype=np.float64)
    hit = np.zeros(span, dtype=np.bool_)
    rel = gi - lo
    if fi.size <= _ROW_LOOP_MAX:
        for a in range(fi.size):
            pos = rel + fi[a]
            out[pos] += fp[a] * gp
            hit[pos] = True
        return out, hit
    rows = max(1, _BLOCK // max(gi.size, 1))
    for start in range(0, fi.size, rows):
        stop = start + rows
        pos = (fi[start:stop, None] + rel[None, :]).ravel()
        val = (fp[start:stop, None] * gp[None, :]).ravel()
        # unbuffered and in index order, unlike fancy-index +=
        np.add.at(out, pos, val)
        hit[pos] = True
    return out, hit


def direct_sparse(fi, fp, gi, gp):
    sums = (fi[:, None] + gi[None, :]).ravel()
    vals = (fp[:, None] * gp[None, :]).ravel()
    support, inverse = np.unique(sums, return_inverse=True)
    # bincount accumulates weights sequentially in input order
    mass = np.bincount(inverse.ravel(), weights=vals, minlength=support.size)
    return support, mass
