"""Pure-Python fallback for the enumeration kernels.

Same contracts as the compiled module ``_core``; used when the extension is
not built (or when forced via ``LDLAB_PURE_PYTHON=1``).  These are plain
backtracking loops over ordered injective placements, so they are orders of
magnitude slower; the dispatch layer keeps budgets small enough for them to
remain usable as an oracle.
"""

from itertools import permutations

import numpy as np


def injection_sum(edge_vals, lev_ptr, lev_edge, lev_other, nverts):
    n = edge_vals.shape[1]
    v = int(nverts)
    if v > n:
        return 0.0
    total = 0.0
    for phi in permutations(range(n), v):
        p = 1.0
        for level in range(v):
            for k in range(lev_ptr[level], lev_ptr[level + 1]):
                p *= edge_vals[lev_edge[k], phi[level], phi[lev_other[k]]]
            if p == 0.0:
                break
        total += p
    return total


def injection_grad(edge_vals, eu, ev, lev_ptr, lev_edge, lev_other, nverts):
    n = edge_vals.shape[1]
    v = int(nverts)
    ne = len(eu)
    out = np.zeros((n, n))
    if v > n:
        return out
    for phi in permutations(range(n), v):
        w = [edge_vals[e, phi[eu[e]], phi[ev[e]]] for e in range(ne)]
        for e in range(ne):
            contrib = 1.0
            for f in range(ne):
                if f != e:
                    contrib *= w[f]
            a, b = phi[eu[e]], phi[ev[e]]
            out[a, b] += contrib
            out[b, a] += contrib
    return out


def injection_hess_apply(edge_vals, x, eu, ev, nverts):
    n = edge_vals.shape[1]
    v = int(nverts)
    ne = len(eu)
    out = np.zeros((n, n))
    if v > n:
        return out
    for phi in permutations(range(n), v):
        w = [edge_vals[e, phi[eu[e]], phi[ev[e]]] for e in range(ne)]
        xv = [x[phi[eu[e]], phi[ev[e]]] for e in range(ne)]
        for e in range(ne):
            contrib = 0.0
            for f in range(ne):
                if f == e:
                    continue
                prod2 = xv[f]
                for k in range(ne):
                    if k != e and k != f:
                        prod2 *= w[k]
                contrib += prod2
            a, b = phi[eu[e]], phi[ev[e]]
            out[a, b] += contrib
            out[b, a] += contrib
    return out


def dtensor_sq_sums(edge_vals, eu, ev, nverts, max_t):
    n = edge_vals.shape[1]
    v = int(nverts)
    ne = len(eu)
    if n > 64 or max_t > 5:
        raise ValueError("dtensor_sq_sums requires n <= 64 and max_t <= 5")
    if v > n:
        return np.zeros(max_t)
    masks = [m for m in range(1, 1 << ne) if bin(m).count("1") <= max_t]
    acc = {}
    for phi in permutations(range(n), v):
        w = [edge_vals[e, phi[eu[e]], phi[ev[e]]] for e in range(ne)]
        pidx = []
        for e in range(ne):
            a, b = phi[eu[e]], phi[ev[e]]
            if a > b:
                a, b = b, a
            pidx.append(a * n + b)
        for m in masks:
            val = 1.0
            sel = []
            for e in range(ne):
                if m & (1 << e):
                    sel.append(pidx[e])
                else:
                    val *= w[e]
            sel.sort()
            key = len(sel)
            for s in sel:
                key = (key << 12) | s
            acc[key] = acc.get(key, 0.0) + val
    out = np.zeros(max_t)
    for key, q in acc.items():
        t = key
        while t >= (1 << 12):
            t >>= 12
        out[t - 1] += q * q
    return out
