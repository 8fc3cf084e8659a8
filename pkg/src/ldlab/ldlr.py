"""Degree-D likelihood-ratio advantage: exact in binomial space, Monte Carlo
over symmetric-polynomial and subgraph-shape families in Gaussian space.

The squared advantage decomposes over any orthonormal basis restricted to the
degree budget: chi2_D = sum over nonconstant basis indices of (E_planted of
the basis function)^2.  The three domains use:

  * boolean strings: the Krawtchouk expansion of the weight law, exact;
  * Gaussian vectors: symmetrized Hermite products indexed by integer
    partitions with parts >= 2 (parts of size one vanish for every
    sign-symmetric planted law built here, and keeping parts >= 2 caps the
    inclusion-exclusion over set partitions at Bell(6) = 203 terms for
    D <= 12); the result is exact over the family and a lower bound on the
    unrestricted advantage otherwise;
  * Wigner matrices: connected multigraph shape statistics of total degree
    <= D, a family-restricted lower bound.

Squared means are estimated by the product of two independent half-sample
means, which is unbiased (naive squaring inflates every term by Var/m, and
the advantage sums many near-zero terms).
"""

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .binomtv import basis_coefficients
from .errors import BudgetError
from .orthopoly import hermite_vandermonde
from .shapes import FamilyEvaluator, enumerate_connected_shapes

__all__ = [
    "BasisCoeffs",
    "AdvantageEstimate",
    "chi2_sym_boolean",
    "chi2_sym_gaussian",
    "chi2_wigner_mc",
    "partitions_min2",
    "sym_hermite_values",
    "write_coeffs_csv",
]


@dataclass(frozen=True)
class BasisCoeffs:
    """Nonconstant basis indices with coefficient estimates and stderr."""

    degree_bound: int
    entries: tuple  # ((descriptor, estimate, stderr), ...)

    def chi2(self):
        return sum(est**2 for _, est, _ in self.entries)


@dataclass(frozen=True)
class AdvantageEstimate:
    chi2: float
    stderr: float
    D: int
    method: str  # 'exact' | 'mc'
    coeffs: BasisCoeffs = None
    lower_bound_only: bool = False

    def partial(self, d):
        """chi2 restricted to indices of degree <= d (same coefficient set)."""
        if self.coeffs is None:
            raise ValueError("no coefficient table attached")
        return sum(
            est**2 if self.method == "exact" else est
            for (desc, est, _) in self.coeffs.entries
            if _descriptor_degree(desc) <= d
        )


def _descriptor_degree(desc):
    return desc[0] if isinstance(desc, tuple) else int(desc)


def chi2_sym_boolean(pi, basis, D):
    """Exact degree-D squared advantage of a boolean weight law against its null.

    Symmetry reduces every symmetric statistic to the weight, so the full
    multivariate advantage equals the one-dimensional Krawtchouk expansion of
    the weight law.
    """
    if D > pi.n:
        raise ValueError(f"D={D} exceeds n={pi.n}")
    a = basis_coefficients(pi, basis, D, high_precision=(D > 40))
    entries = tuple((int(l), float(a[l]), 0.0) for l in range(1, D + 1))
    chi2 = float(np.sum(a[1:] ** 2))
    return AdvantageEstimate(
        chi2=chi2,
        stderr=0.0,
        D=D,
        method="exact",
        coeffs=BasisCoeffs(D, entries),
    )


def partitions_min2(dmax):
    """Integer partitions with every part >= 2 and total in 2..dmax."""
    out = []

    def rec(remaining, maxpart, acc):
        if acc:
            out.append(tuple(acc))
        for p in range(min(remaining, maxpart), 1, -1):
            rec(remaining - p, p, acc + [p])

    rec(dmax, dmax, [])
    return sorted(out, key=lambda lam: (sum(lam), lam))


@lru_cache(maxsize=None)
def _set_partitions(r):
    """Set partitions of range(r) with Mobius weights prod (-1)^(|b|-1)(|b|-1)!."""
    items = list(range(r))

    def rec(rest):
        if not rest:
            yield ()
            return
        first, tail = rest[0], rest[1:]
        for part in rec(tail):
            yield ((first,),) + part
            for i, block in enumerate(part):
                yield part[:i] + ((first,) + block,) + part[i + 1 :]

    out = []
    for part in rec(items):
        w = 1
        for block in part:
            w *= (-1) ** (len(block) - 1) * math.factorial(len(block) - 1)
        out.append((part, w))
    return tuple(out)


def sym_hermite_values(x_batch, lam):
    """psi_lambda over a (B, n) sample batch: the orthonormal symmetrized
    product of Hermite polynomials h_{lam_i} over distinct coordinates.

    Evaluated from generalized power sums Q_S = sum_j prod_{i in S} h_{lam_i}(x_j)
    by inclusion-exclusion over set partitions of the parts, so each sample
    costs O(n * |lam| + Bell(len(lam))) instead of O(n^len(lam)).
    """
    x_batch = np.asarray(x_batch, dtype=float)
    single = x_batch.ndim == 1
    if single:
        x_batch = x_batch[None]
    b, n = x_batch.shape
    r = len(lam)
    if r > n:
        raise ValueError("more parts than coordinates")
    hv = hermite_vandermonde(x_batch, max(lam))
    qcache = {}

    def qsum(block):
        key = tuple(sorted(lam[i] for i in block))
        if key not in qcache:
            prod = hv[key[0]]
            for d in key[1:]:
                prod = prod * hv[d]
            qcache[key] = prod.sum(axis=1)
        return qcache[key]

    total = np.zeros(b)
    for part, w in _set_partitions(r):
        term = np.full(b, float(w))
        for block in part:
            term = term * qsum(block)
        total += term
    mult = {}
    for p in lam:
        mult[p] = mult.get(p, 0) + 1
    mfac = 1
    for c in mult.values():
        mfac *= math.factorial(c)
    norm = math.sqrt(math.perm(n, r) * mfac)
    out = total / norm
    return out[0] if single else out


def _split_half_products(values_by_index, total_count):
    """Unbiased squared-mean estimates: product of the two half-sample means.

    Returns (estimate, stderr) per index; stderr by the delta method with the
    cross-variance term included.
    """
    out = []
    for vals in values_by_index:
        m = len(vals)
        h = m // 2
        a, b = vals[:h], vals[h : 2 * h]
        ma, mb = float(a.mean()), float(b.mean())
        va, vb = float(a.var(ddof=1)) / h, float(b.var(ddof=1)) / h
        est = ma * mb
        se = math.sqrt(mb * mb * va + ma * ma * vb + va * vb)
        out.append((est, se))
    return out


def chi2_sym_gaussian(sampler, D, count, seed, n=None, symmetric=True):
    """Monte Carlo degree-D advantage over the symmetric Hermite family.

    `sampler(count, seed)` must yield (B, n) chunks of planted draws.  The
    family is all partitions with parts >= 2 and size <= D (see the module
    docstring); when the planted law is flagged non-symmetric the estimate is
    only a lower bound and the result records that.
    """
    if D > 12:
        raise ValueError("D > 12 blows up the partition family; cap is 12")
    lams = partitions_min2(D)
    sums = {lam: [] for lam in lams}
    total = 0
    for chunk in sampler(count, seed):
        chunk = np.asarray(chunk, dtype=float)
        for lam in lams:
            sums[lam].append(sym_hermite_values(chunk, lam))
        total += chunk.shape[0]
    values = [np.concatenate(sums[lam]) for lam in lams]
    ests = _split_half_products(values, total)
    entries = tuple(
        ((sum(lam), lam), est, se) for lam, (est, se) in zip(lams, ests)
    )
    chi2 = float(sum(est for _, est, _ in entries))
    stderr = math.sqrt(sum(se**2 for _, _, se in entries))
    return AdvantageEstimate(
        chi2=chi2,
        stderr=stderr,
        D=D,
        method="mc",
        coeffs=BasisCoeffs(D, entries),
        lower_bound_only=not symmetric,
    )


def wigner_shape_family(D, max_family=1000):
    shapes = enumerate_connected_shapes(D)
    if len(shapes) > max_family:
        raise BudgetError(
            f"shape family has {len(shapes)} members, over the budget {max_family}"
        )
    return shapes


def chi2_wigner_mc(sampler, D, count, seed, max_family=1000, einsum_vert_cap=7):
    """Monte Carlo degree-D advantage over connected multigraph shape statistics.

    `sampler(count, seed)` yields (B, n, n) symmetric planted chunks.  Exact
    over the family; a lower bound on the unrestricted advantage (the family
    omits disconnected indices).  D defaults should stay <= 6.
    """
    shapes = wigner_shape_family(D, max_family)
    shapes = [s for s in shapes if s.nverts <= einsum_vert_cap]
    family = FamilyEvaluator(shapes)
    blocks = []
    total = 0
    for chunk in sampler(count, seed):
        chunk = np.asarray(chunk, dtype=float)
        blocks.append(family(chunk))
        total += chunk.shape[0]
    stacked = np.concatenate(blocks, axis=0)
    values = [stacked[:, i] for i in range(len(shapes))]
    ests = _split_half_products(values, total)
    entries = tuple(
        ((s.total_degree, s.describe()), est, se)
        for s, (est, se) in zip(shapes, ests)
    )
    chi2 = float(sum(est for _, est, _ in entries))
    stderr = math.sqrt(sum(se**2 for _, _, se in entries))
    return AdvantageEstimate(
        chi2=chi2,
        stderr=stderr,
        D=D,
        method="mc",
        coeffs=BasisCoeffs(D, entries),
        lower_bound_only=True,
    )


def variational_ratio(f_planted_mean, f_null_mean, f_null_var):
    """((E_P f - E_N f) / sd_N f)^2: any explicit degree-D statistic's
    advantage, never above chi2_D."""
    if f_null_var <= 0:
        raise ValueError("null variance must be positive")
    return (f_planted_mean - f_null_mean) ** 2 / f_null_var


def write_coeffs_csv(path, estimate):
    """Coefficient table CSV: (index descriptor, estimate, stderr)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "estimate", "stderr"])
        for desc, est, se in estimate.coeffs.entries:
            writer.writerow([str(desc), repr(float(est)), repr(float(se))])
    return path
