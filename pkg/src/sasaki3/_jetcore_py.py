"""Pure numpy fallback for the compiled jet kernels in ``_jetcore.pyx``.

Same signatures and semantics; selected automatically when the extension
is missing or when ``SASAKI3_PURE_PYTHON`` is set.
"""
import numpy as np


def _segments(ic):
    return np.flatnonzero(np.r_[True, ic[1:] != ic[:-1]])


def mul(a, b, ia, ib, ic, ncoef):
    prod = a[:, ia] * b[:, ib]
    out = np.zeros((a.shape[0], ncoef), dtype=prod.dtype)
    starts = _segments(ic)
    out[:, ic[starts]] = np.add.reduceat(prod, starts, axis=1)
    return out


def compose(h, g, ia, ib, ic):
    nc = h.shape[1]
    out = np.zeros_like(h, dtype=np.result_type(h, g))
    out[:, 0] = g[:, -1]
    for j in range(g.shape[1] - 2, -1, -1):
        out = mul(out, h, ia, ib, ic, nc)
        out[:, 0] += g[:, j]
    return out
