# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled enumeration kernels for injective subgraph placements.

These loops are the one genuinely scalar-hot path in the package: sums,
gradients, Hessian actions and derivative-tensor accumulations over all
ordered injective maps of a small pattern into [n].  Everything here is
mirrored by the pure-Python implementations in ``_core_py``; callers go
through :mod:`ldlab.kernels`, which picks whichever is available.

Conventions shared with the wrappers:
  * pattern vertices are BFS-ordered, so every vertex after the first has
    at least one edge into the already-placed prefix,
  * ``edge_vals[e]`` is the n x n symmetric value matrix of edge ``e``
    (plain entries for simple counts, Hermite-transformed entries for
    multigraph statistics),
  * results are raw sums over ordered injective maps; automorphism and
    normalization factors are applied by the caller.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def injection_sum(double[:, :, ::1] edge_vals,
                  long[::1] lev_ptr, long[::1] lev_edge, long[::1] lev_other,
                  long nverts):
    """Sum of prod_e edge_vals[e, phi(u_e), phi(v_e)] over ordered injective phi."""
    cdef long n = edge_vals.shape[1]
    cdef long v = nverts
    cdef long[64] phi
    cdef long[64] pos
    cdef double[65] prod
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] used_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] used = used_arr
    cdef double total = 0.0
    cdef long level = 0, i, e, k
    cdef double p

    if v > n:
        return 0.0
    pos[0] = 0
    prod[0] = 1.0
    while level >= 0:
        i = pos[level]
        if i >= n:
            level -= 1
            if level >= 0:
                used[phi[level]] = 0
                pos[level] += 1
            continue
        if used[i]:
            pos[level] += 1
            continue
        p = prod[level]
        for k in range(lev_ptr[level], lev_ptr[level + 1]):
            e = lev_edge[k]
            p *= edge_vals[e, i, phi[lev_other[k]]]
            if p == 0.0:
                break
        if p == 0.0:
            pos[level] += 1
            continue
        phi[level] = i
        if level == v - 1:
            total += p
            pos[level] += 1
        else:
            used[i] = 1
            prod[level + 1] = p
            level += 1
            pos[level] = 0
    return total


def injection_grad(double[:, :, ::1] edge_vals,
                   long[::1] eu, long[::1] ev,
                   long[::1] lev_ptr, long[::1] lev_edge, long[::1] lev_other,
                   long nverts):
    """Accumulate grad[i, j] = sum over (phi, e) with phi(e) = {i, j} of
    prod_{f != e} edge_vals[f].  Returned matrix is symmetric, zero diagonal."""
    cdef long n = edge_vals.shape[1]
    cdef long v = nverts
    cdef long ne = eu.shape[0]
    cdef long[64] phi
    cdef long[64] pos
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] used_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] used = used_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, n))
    cdef double[:, ::1] g = out
    cdef double[64] w
    cdef double[65] pre
    cdef double[65] suf
    cdef long level = 0, i, e, k, a, b
    cdef double contrib

    if v > n:
        return out
    pos[0] = 0
    while level >= 0:
        i = pos[level]
        if i >= n:
            level -= 1
            if level >= 0:
                used[phi[level]] = 0
                pos[level] += 1
            continue
        if used[i]:
            pos[level] += 1
            continue
        phi[level] = i
        if level == v - 1:
            # full assignment: per-edge values, prefix/suffix exclusion products
            for e in range(ne):
                w[e] = edge_vals[e, phi[eu[e]], phi[ev[e]]]
            pre[0] = 1.0
            for e in range(ne):
                pre[e + 1] = pre[e] * w[e]
            suf[ne] = 1.0
            for e in range(ne - 1, -1, -1):
                suf[e] = suf[e + 1] * w[e]
            for e in range(ne):
                contrib = pre[e] * suf[e + 1]
                a = phi[eu[e]]
                b = phi[ev[e]]
                g[a, b] += contrib
                g[b, a] += contrib
            pos[level] += 1
        else:
            used[i] = 1
            level += 1
            pos[level] = 0
    return out


def injection_hess_apply(double[:, :, ::1] edge_vals, double[:, ::1] x,
                         long[::1] eu, long[::1] ev, long nverts):
    """(H x)[i, j] = sum over (phi, e != e') with phi(e) = {i, j} of
    x[phi(e')] * prod_{f not in {e, e'}} edge_vals[f]."""
    cdef long n = edge_vals.shape[1]
    cdef long v = nverts
    cdef long ne = eu.shape[0]
    cdef long[64] phi
    cdef long[64] pos
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] used_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] used = used_arr
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.zeros((n, n))
    cdef double[:, ::1] h = out
    cdef double[64] w
    cdef double[64] xv
    cdef long level = 0, i, e, f, k, a, b
    cdef double contrib, prod2

    if v > n:
        return out
    pos[0] = 0
    while level >= 0:
        i = pos[level]
        if i >= n:
            level -= 1
            if level >= 0:
                used[phi[level]] = 0
                pos[level] += 1
            continue
        if used[i]:
            pos[level] += 1
            continue
        phi[level] = i
        if level == v - 1:
            for e in range(ne):
                w[e] = edge_vals[e, phi[eu[e]], phi[ev[e]]]
                xv[e] = x[phi[eu[e]], phi[ev[e]]]
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
                a = phi[eu[e]]
                b = phi[ev[e]]
                h[a, b] += contrib
                h[b, a] += contrib
            pos[level] += 1
        else:
            used[i] = 1
            level += 1
            pos[level] = 0
    return out


def dtensor_sq_sums(double[:, :, ::1] edge_vals,
                    long[::1] eu, long[::1] ev, long nverts, long max_t):
    """Squared-coefficient sums of the derivative tensors.

    Returns, for t = 1..max_t, sum over pair-sets S of size t of
    (sum over (phi, F subset of edges, |F| = t, phi(F) = S) of
    prod_{f not in F} edge_vals[f])^2.  Keys pack the sorted pair indices
    of phi(F) into one int64, so this requires n <= 64 and max_t <= 5.
    """
    cdef long n = edge_vals.shape[1]
    cdef long v = nverts
    cdef long ne = eu.shape[0]
    if n > 64 or max_t > 5:
        raise ValueError("dtensor_sq_sums requires n <= 64 and max_t <= 5")

    # subsets of edges grouped by size, as bitmasks
    subsets = [[] for _ in range(max_t + 1)]
    cdef long mask, t
    for mask in range(1, 1 << ne):
        t = bin(mask).count("1")
        if t <= max_t:
            subsets[t].append(mask)
    cdef dict acc = {}
    cdef long[64] phi
    cdef long[64] pos
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] used_arr = np.zeros(n, dtype=np.uint8)
    cdef unsigned char[::1] used = used_arr
    cdef double[64] w
    cdef long[64] pidx
    cdef long level = 0, i, e, k, a, b
    cdef long key, kk, jj, tmp
    cdef long[8] sel
    cdef double val
    cdef list flat_masks = [m for t in range(1, max_t + 1) for m in subsets[t]]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] masks_arr = np.array(flat_masks, dtype=np.int64)
    cdef long[::1] masks = masks_arr
    cdef long nmask = masks_arr.shape[0]
    cdef long mi, m, cnt

    if v > n:
        return np.zeros(max_t)
    pos[0] = 0
    while level >= 0:
        i = pos[level]
        if i >= n:
            level -= 1
            if level >= 0:
                used[phi[level]] = 0
                pos[level] += 1
            continue
        if used[i]:
            pos[level] += 1
            continue
        phi[level] = i
        if level == v - 1:
            for e in range(ne):
                w[e] = edge_vals[e, phi[eu[e]], phi[ev[e]]]
                a = phi[eu[e]]
                b = phi[ev[e]]
                if a > b:
                    a, b = b, a
                pidx[e] = a * n + b
            for mi in range(nmask):
                m = masks[mi]
                val = 1.0
                cnt = 0
                for e in range(ne):
                    if m & (1 << e):
                        sel[cnt] = pidx[e]
                        cnt += 1
                    else:
                        val *= w[e]
                # insertion sort of the <=5 selected pair indices
                for kk in range(1, cnt):
                    tmp = sel[kk]
                    jj = kk - 1
                    while jj >= 0 and sel[jj] > tmp:
                        sel[jj + 1] = sel[jj]
                        jj -= 1
                    sel[jj + 1] = tmp
                key = cnt
                for kk in range(cnt):
                    key = (key << 12) | sel[kk]
                if key in acc:
                    acc[key] = acc[key] + val
                else:
                    acc[key] = val
            pos[level] += 1
        else:
            used[i] = 1
            level += 1
            pos[level] = 0

    out = np.zeros(max_t)
    cdef double q
    for key, q in acc.items():
        t = key
        while t >= (1 << 12):
            t >>= 12
        out[t - 1] += q * q
    return out
