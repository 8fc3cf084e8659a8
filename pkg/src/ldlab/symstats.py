"""Symmetric-statistic diagnostics in Gaussian vector space.

The sufficient statistic for degree-k symmetric polynomials is the vector

    F_k(x)_i = n^{-1/2} * sum_j h_i(x_j),   i = 1..k,

whose null law has independent-sum structure coordinate-wise.  This module
provides F_k evaluation, the spectral regularity test (empirical Hermite Gram
matrix with all eigenvalues in [1/2, 3/2]), sub-Gaussian moment probes,
empirical characteristic functions with frequency-matching and decay
diagnostics, and histogram TV estimation in dimension <= 3.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError
from .orthopoly import hermite_vandermonde

__all__ = [
    "SymStatVector",
    "RegularityReport",
    "eval_Fk",
    "eval_Fk_batch",
    "regularity_check",
    "sample_regular_conditioned",
    "moment_probe",
    "empirical_cf",
    "frequency_match_diag",
    "fourier_decay_diag",
    "tv_histogram",
    "radial_grid",
]


@dataclass(frozen=True)
class SymStatVector:
    k: int
    values: np.ndarray


@dataclass(frozen=True)
class RegularityReport:
    ell: int
    gram: np.ndarray
    min_eig: float
    max_eig: float

    @property
    def is_regular(self):
        return 0.5 <= self.min_eig and self.max_eig <= 1.5


def eval_Fk_batch(x, k):
    """F_k rows for a (B, n) batch; O(n k) per sample via the recurrence."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    if single:
        x = x[None]
    n = x.shape[1]
    hv = hermite_vandermonde(x, k)  # (k+1, B, n)
    out = hv[1:].sum(axis=2).T / math.sqrt(n)  # (B, k)
    return out[0] if single else out


def eval_Fk(x, k):
    if k < 1:
        raise ValueError("k must be >= 1")
    return SymStatVector(k, eval_Fk_batch(x, k))


def regularity_check(y, ell):
    """Empirical Hermite Gram matrix G_ab = (1/n) sum_j h_a(y_j) h_b(y_j).

    The point is regular iff all eigenvalues lie in [1/2, 3/2]: a degree
    <= 2*ell sum of squares is a sum of squares of degree <= ell polynomials,
    and two-sided control of every square is exactly this eigenvalue window
    in the orthonormal Hermite coordinates.
    """
    if ell > 16:
        raise ValueError("ell capped at 16")
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    hv = hermite_vandermonde(y, ell)  # (ell+1, n)
    gram = (hv @ hv.T) / n
    eigs = np.linalg.eigvalsh(gram)
    return RegularityReport(ell, gram, float(eigs[0]), float(eigs[-1]))


def sample_regular_conditioned(sampler, ell, seed, max_attempts=1000):
    """One planted draw conditioned on regularity, by rejection.

    `sampler(count, seed)` yields (B, n) chunks; attempts are counted per
    draw and the cap triggers a RuntimeError (the conditional law is only
    realizable when regularity has decent probability).
    """
    attempts = 0
    offset = 0
    while attempts < max_attempts:
        for chunk in sampler(min(64, max_attempts - attempts), seed + offset):
            for row in chunk:
                attempts += 1
                if regularity_check(row, ell).is_regular:
                    return row, attempts
                if attempts >= max_attempts:
                    break
            break
        offset += 1
    raise RuntimeError(f"no regular draw within {max_attempts} attempts")


def moment_probe(samples, xi, T):
    """max over even t <= T of E[<z, xi>^t]^(1/t) / sqrt(t), with the
    sample-size guard m >= 100 * 3^T."""
    if T % 2:
        raise ValueError("T must be even")
    z = np.asarray(samples, dtype=float)
    m = z.shape[0]
    if m < 100 * 3**T:
        raise BudgetError(f"need at least {100 * 3**T} samples for moment {T}, have {m}")
    xi = np.asarray(xi, dtype=float)
    xi = xi / np.linalg.norm(xi)
    s = z @ xi
    rows = []
    worst = 0.0
    for t in range(2, T + 1, 2):
        st = s**t
        mean = float(st.mean())
        se = float(st.std(ddof=1)) / math.sqrt(m)
        ratio = mean ** (1.0 / t) / math.sqrt(t)
        ratio_se = se / (t * mean ** (1.0 - 1.0 / t) * math.sqrt(t)) if mean > 0 else 0.0
        worst = max(worst, ratio)
        rows.append({"t": t, "moment": mean, "moment_se": se, "ratio": ratio, "ratio_se": ratio_se})
    return {"max_ratio": worst, "rows": rows}


def empirical_cf(samples, xis):
    """phi_hat(xi) = mean exp(i <xi, z>) per row of xis, with stderr.

    stderr per frequency is sqrt((1 - |phi_hat|^2) / m), never above 1/sqrt(m).
    """
    z = np.atleast_2d(np.asarray(samples, dtype=float))
    xis = np.atleast_2d(np.asarray(xis, dtype=float))
    m = z.shape[0]
    vals = np.empty(xis.shape[0], dtype=complex)
    for i, xi in enumerate(xis):
        vals[i] = np.exp(1j * (z @ xi)).mean()
    stderr = np.sqrt(np.clip(1.0 - np.abs(vals) ** 2, 0.0, 1.0) / m)
    return vals, stderr


def radial_grid(k, radius, n_dirs=32, n_radii=64, seed=0):
    """Random directions times a radius ladder: the sup over a ball is radial
    in every bound this package checks, so a lattice would be wasteful."""
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n_dirs, k))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.linspace(radius / n_radii, radius, n_radii)
    return (dirs[:, None, :] * radii[None, :, None]).reshape(-1, k), dirs, radii


def frequency_match_diag(cf_null, cf_planted, xis, stderr_null=None, stderr_planted=None):
    """Grid supremum of |cf difference| over ||xi|| <= R with error bars."""
    cf_null = np.asarray(cf_null)
    cf_planted = np.asarray(cf_planted)
    if cf_null.shape != cf_planted.shape:
        raise ValueError("frequency grids do not match")
    diff = np.abs(cf_null - cf_planted)
    i = int(np.argmax(diff))
    se = 0.0
    if stderr_null is not None:
        se += float(stderr_null[i]) ** 2
    if stderr_planted is not None:
        se += float(stderr_planted[i]) ** 2
    return {
        "sup_diff": float(diff[i]),
        "stderr_at_sup": math.sqrt(se),
        "arg_xi": np.asarray(xis)[i],
        "mean_diff": float(diff.mean()),
    }


def fourier_decay_diag(samples, k, radius, eps, n_dirs=16, n_radii=48, seed=0):
    """|cf| along rays with a fitted envelope a * exp(-b * eps * r^2).

    The fit uses points with |cf| above three noise stderrs; returns the
    per-ray curves and the fitted (a, b).  b > 0 is the qualitative decay
    check; constants are reported, never asserted.
    """
    z = np.atleast_2d(np.asarray(samples, dtype=float))
    m = z.shape[0]
    rng = np.random.default_rng(seed)
    dirs = rng.normal(size=(n_dirs, k))
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    radii = np.linspace(radius / n_radii, radius, n_radii)
    curves = np.empty((n_dirs, n_radii))
    for d in range(n_dirs):
        proj = z @ dirs[d]
        for r in range(n_radii):
            curves[d, r] = abs(np.exp(1j * radii[r] * proj).mean())
    noise = 3.0 / math.sqrt(m)
    mean_curve = curves.mean(axis=0)
    mask = mean_curve > noise
    if mask.sum() >= 2:
        x = eps * radii[mask] ** 2
        yv = np.log(mean_curve[mask])
        b, log_a = np.polyfit(-x, yv, 1)
        a = math.exp(log_a)
    else:
        a, b = float("nan"), float("nan")
    return {
        "radii": radii,
        "curves": curves,
        "mean_curve": mean_curve,
        "fitted_a": float(a),
        "fitted_b": float(b),
        "noise_floor": noise,
    }


def tv_histogram(samples_a, samples_b, bins):
    """Plug-in TV between two equal-size sample sets in dimension <= 3.

    Equal-width bins over the pooled 0.1%-99.9% quantile box; everything
    outside the box goes into one extra cell per side of the comparison.
    Reports the estimate, the plug-in bias floor (the expected value of the
    estimator when the laws are equal, approximately sum_c sqrt(p_c(1-p_c))
    / sqrt(pi m)), and a delta-method stderr.
    """
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape != b.shape:
        raise ValueError("sample sets must have equal shapes")
    k = a.shape[1]
    if k > 3:
        raise ValueError("histogram TV is limited to dimension <= 3")
    m = a.shape[0]
    pooled = np.concatenate([a, b], axis=0)
    lo = np.quantile(pooled, 0.001, axis=0)
    hi = np.quantile(pooled, 0.999, axis=0)
    hi = np.where(hi > lo, hi, lo + 1.0)
    edges = [np.linspace(lo[d], hi[d], bins + 1) for d in range(k)]
    ca, _ = np.histogramdd(a, bins=edges)
    cb, _ = np.histogramdd(b, bins=edges)
    out_a = m - ca.sum()
    out_b = m - cb.sum()
    pa = np.append(ca.ravel(), out_a) / m
    pb = np.append(cb.ravel(), out_b) / m
    tv = 0.5 * float(np.abs(pa - pb).sum())
    pbar = (pa + pb) / 2.0
    bias_floor = float(np.sum(np.sqrt(pbar * (1.0 - pbar)))) / math.sqrt(math.pi * m)
    var = (1.0 - 2.0 / math.pi) * float(np.sum(pbar * (1.0 - pbar))) * 2.0 / m
    stderr = 0.5 * math.sqrt(var)
    return {"tv": tv, "bias_floor": bias_floor, "stderr": stderr, "cells": pa.size}
