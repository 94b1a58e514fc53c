"""Pure-Python line kernels, used when the compiled extension is unavailable."""
import math

import numpy as np


def lower_envelope(heights, pos, query, t):
    """min_q heights[l, q] + (query[j] - pos[q])**2 / (2 t), per line ``l``.

    Lower envelope of parabolas, linear time per line.  ``pos`` and ``query``
    must be strictly increasing; ``+inf`` heights are skipped.
    """
    heights = np.ascontiguousarray(heights, dtype=float)
    pos = [float(p) for p in pos]
    query = [float(y) for y in query]
    nlines, n = heights.shape
    out = np.empty((nlines, len(query)))
    two_t = 2.0 * t
    for line in range(nlines):
        hs = heights[line].tolist()
        v: list[int] = []
        z: list[float] = []
        for q in range(n):
            hq = hs[q]
            if hq == math.inf:
                continue
            if not v:
                v.append(q)
                z[:] = [-math.inf, math.inf]
                continue
            while True:
                p = v[-1]
                s = 0.5 * (pos[q] + pos[p]) + t * (hq - hs[p]) / (pos[q] - pos[p])
                if s <= z[len(v) - 1]:
                    v.pop()
                    z.pop()
                else:
                    break
            v.append(q)
            z[-1] = s
            z.append(math.inf)
        row = out[line]
        if not v:
            row[:] = math.inf
            continue
        k = 0
        for j, y in enumerate(query):
            while z[k + 1] < y:
                k += 1
            p = v[k]
            d = y - pos[p]
            row[j] = hs[p] + d * d / two_t
    return out


def symmetrize_lines(values, h):
    """Line-wise min_k (f[i+k] + f[n-1-i+k]) / 2 + (k h)**2 / 2 over in-range shifts."""
    values = np.ascontiguousarray(values, dtype=float)
    nlines, n = values.shape
    m = (n - 1) // 2
    idx = np.arange(n)
    ridx = n - 1 - idx
    kmax = np.minimum(idx, ridx)
    out = np.full((nlines, n), np.inf)
    for k in range(-m, m + 1):
        ok = kmax >= abs(k)
        i = idx[ok]
        u = k * h
        cand = 0.5 * (values[:, i + k] + values[:, ridx[ok] + k]) + 0.5 * u * u
        np.minimum(out[:, i], cand, out=cand)
        out[:, i] = cand
    return out
