"""Orthonormal polynomial families: Hermite and shifted Krawtchouk.

The Hermite family is the normalized probabilists' one, ``h_k = He_k/sqrt(k!)``,
orthonormal under N(0,1).  The Krawtchouk family is orthonormal under the
law of the centered, normalized coordinate sum of n independent Ber(gamma)
signs: if w ~ Bin(n, gamma) counts +1 coordinates, the statistic is
``y = (w - gamma*n) / sqrt(n*gamma*(1-gamma))`` and ``Kr_0..Kr_n`` are the
orthonormal polynomials of y.

Construction: successive orthogonalization of {1, y*p_0, y*p_1, ...} against
the exact weight law (the Stieltjes form of Gram-Schmidt over the monomial
ladder), carried out in extended precision with mpmath.  The result is the
three-term recurrence

    b_{k+1} p_{k+1}(y) = (y - a_k) p_k(y) - b_k p_{k-1}(y),

which is also how the polynomials are evaluated; monomial coefficients are
derivable from it for export.  Orthogonalizing against the exact law forces
p_0 = 1 and p_1(y) = y automatically.
"""

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np
from scipy.stats import binom

from .quadrature import gauss_hermite_rule

__all__ = [
    "HermiteBasis",
    "WeightLaw",
    "KrawtchoukBasis",
    "hermite_eval",
    "hermite_vandermonde",
    "make_weight_law",
    "make_krawtchouk_basis",
    "krawtchouk_eval",
    "verify_krawtchouk_bound",
    "verify_hermite_orthonormality",
    "verify_hermite_derivative",
]

DEFAULT_KMAX = 64
_CONSTRUCTION_DPS = 60


def hermite_eval(k, x):
    """h_k(x), normalized probabilists' Hermite, by the three-term recurrence.

    Total function: accepts scalars or arrays, any k >= 0.
    """
    if k < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    p_prev = np.zeros_like(x)
    p = np.ones_like(x)
    for j in range(k):
        p_prev, p = p, (x * p - math.sqrt(j) * p_prev) / math.sqrt(j + 1)
    return p if p.ndim else float(p)


def hermite_vandermonde(x, kmax):
    """Stacked values h_0(x)..h_kmax(x); shape (kmax+1,) + x.shape."""
    x = np.asarray(x, dtype=float)
    out = np.empty((kmax + 1,) + x.shape)
    out[0] = 1.0
    if kmax >= 1:
        out[1] = x
    for k in range(1, kmax):
        out[k + 1] = (x * out[k] - math.sqrt(k) * out[k - 1]) / math.sqrt(k + 1)
    return out


@dataclass(frozen=True)
class HermiteBasis:
    """Normalized Hermite family up to a fixed degree."""

    max_degree: int

    def eval(self, k, x):
        if k > self.max_degree:
            raise ValueError(f"degree {k} exceeds max_degree {self.max_degree}")
        return hermite_eval(k, x)

    def values(self, x):
        return hermite_vandermonde(x, self.max_degree)


@dataclass(frozen=True)
class WeightLaw:
    """A probability law on integer weights w in {0..n} with its y-map.

    Under the null this is exactly Bin(n, gamma); planted laws reuse the same
    support and y-map with a different pmf.
    """

    n: int
    gamma: Fraction
    pmf: np.ndarray  # shape (n+1,), sums to 1

    def __post_init__(self):
        if not (0 < self.gamma < 1):
            raise ValueError("gamma must lie in (0, 1)")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.pmf.shape != (self.n + 1,):
            raise ValueError("pmf must have length n+1")
        total = float(self.pmf.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"pmf sums to {total}, not 1")

    @property
    def scale(self):
        g = float(self.gamma)
        return math.sqrt(self.n * g * (1.0 - g))

    def y_of_w(self, w):
        g = float(self.gamma)
        return (np.asarray(w, dtype=float) - g * self.n) / self.scale

    @property
    def support_y(self):
        return self.y_of_w(np.arange(self.n + 1))

    def moment_y(self, k):
        """E[y^k] exactly from the pmf."""
        return float(np.sum(self.pmf * self.support_y**k))

    def with_pmf(self, pmf):
        return WeightLaw(self.n, self.gamma, np.asarray(pmf, dtype=float))

    def mp_pmf(self, dps=_CONSTRUCTION_DPS):
        """Extended-precision pmf; exact binomial only when this law is the null."""
        with mp.workdps(dps):
            return [mp.mpf(float(p)) for p in self.pmf]


def make_weight_law(n, gamma):
    """Exact Binomial(n, gamma) weight law of the null distribution."""
    gamma = Fraction(gamma).limit_denominator(10**12) if not isinstance(gamma, Fraction) else gamma
    if not (0 < gamma < 1):
        raise ValueError("gamma must lie in (0, 1)")
    w = np.arange(n + 1)
    pmf = binom.pmf(w, n, float(gamma))
    pmf = pmf / pmf.sum()
    return WeightLaw(n, gamma, pmf)


def _null_pmf_mp(n, gamma, dps):
    with mp.workdps(dps):
        g = mp.mpf(gamma.numerator) / gamma.denominator
        return [mp.binomial(n, w) * g**w * (1 - g) ** (n - w) for w in range(n + 1)]


@dataclass(frozen=True)
class KrawtchoukBasis:
    """Orthonormal Krawtchouk family Kr_0..Kr_kmax for (n, gamma).

    ``alphas``/``betas`` are the recurrence coefficients (float64 views of the
    extended-precision construction); ``mp_alphas``/``mp_betas`` retain full
    precision for high-degree evaluation and for exact-enumeration checks.
    """

    n: int
    gamma: Fraction
    kmax: int
    alphas: np.ndarray
    betas: np.ndarray  # betas[k] = b_{k+1}, k = 0..kmax-1
    mp_alphas: list = field(repr=False)
    mp_betas: list = field(repr=False)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def scale(self):
        g = float(self.gamma)
        return math.sqrt(self.n * g * (1.0 - g))

    def eval(self, k, y):
        """Kr_k at arbitrary real y (scalar or array), float64 recurrence."""
        if k > self.kmax:
            raise ValueError(f"degree {k} exceeds kmax {self.kmax}")
        return self.values(np.asarray(y, dtype=float), k)[k]

    def values(self, y, kmax=None):
        """Stacked Kr_0..Kr_kmax values at y; shape (kmax+1,) + y.shape."""
        kmax = self.kmax if kmax is None else kmax
        if kmax > self.kmax:
            raise ValueError(f"degree {kmax} exceeds kmax {self.kmax}")
        y = np.asarray(y, dtype=float)
        out = np.empty((kmax + 1,) + y.shape)
        out[0] = 1.0
        for k in range(kmax):
            prev = out[k - 1] if k > 0 else 0.0
            bprev = self.betas[k - 1] if k > 0 else 0.0
            out[k + 1] = ((y - self.alphas[k]) * out[k] - bprev * prev) / self.betas[k]
        return out

    def values_mp(self, y_mp, kmax=None, dps=_CONSTRUCTION_DPS):
        """Extended-precision values at a list of mp floats; list of lists."""
        kmax = self.kmax if kmax is None else kmax
        with mp.workdps(dps):
            npts = len(y_mp)
            rows = [[mp.mpf(1)] * npts]
            for k in range(kmax):
                prev = rows[k - 1] if k > 0 else [mp.mpf(0)] * npts
                bprev = self.mp_betas[k - 1] if k > 0 else mp.mpf(0)
                a, b = self.mp_alphas[k], self.mp_betas[k]
                rows.append(
                    [((y_mp[i] - a) * rows[k][i] - bprev * prev[i]) / b for i in range(npts)]
                )
        return rows

    def support_rows_mp(self, kmax=None, dps=_CONSTRUCTION_DPS):
        """Values Kr_0..Kr_kmax on the *exact* support points of the weight law.

        Near the top degree the polynomials oscillate violently between support
        points, so coefficient sums must be evaluated at the exact rational
        support, never at float64-rounded points; rows are cached per (kmax,
        dps).
        """
        kmax = self.kmax if kmax is None else kmax
        key = (kmax, dps)
        for (ck, cd), rows in self._cache.items():
            if ck >= kmax and cd >= dps:
                return rows[: kmax + 1]
        with mp.workdps(dps):
            g = mp.mpf(self.gamma.numerator) / self.gamma.denominator
            s = mp.sqrt(self.n * g * (1 - g))
            y = [(w - g * self.n) / s for w in range(self.n + 1)]
            rows = self.values_mp(y, kmax=kmax, dps=dps)
        self._cache[key] = rows
        return rows

    def monomial_coefficients(self, kmax=None, dps=_CONSTRUCTION_DPS):
        """Coefficient table c[k][j] of y^j in Kr_k, from the recurrence (float64 view)."""
        kmax = self.kmax if kmax is None else kmax
        with mp.workdps(dps):
            coeffs = [[mp.mpf(1)]]
            if kmax >= 1:
                coeffs.append([-self.mp_alphas[0] / self.mp_betas[0], 1 / self.mp_betas[0]])
            for k in range(1, kmax):
                a, b = self.mp_alphas[k], self.mp_betas[k]
                bprev = self.mp_betas[k - 1]
                ck, ckm1 = coeffs[k], coeffs[k - 1]
                new = [mp.mpf(0)] * (k + 2)
                for j, c in enumerate(ck):
                    new[j + 1] += c / b
                    new[j] -= a * c / b
                for j, c in enumerate(ckm1):
                    new[j] -= bprev * c / b
                coeffs.append(new)
            return [[float(c) for c in row] for row in coeffs]

    def export_coefficients_csv(self, path, kmax=None):
        """CSV rows (degree, c_0, c_1, ...): coefficient of y^j in Kr_degree."""
        table = self.monomial_coefficients(kmax)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            width = len(table[-1])
            writer.writerow(["degree"] + [f"y^{j}" for j in range(width)])
            for k, row in enumerate(table):
                writer.writerow([k] + [repr(c) for c in row] + [""] * (width - len(row)))
        return path


_BASIS_CACHE = {}


def make_krawtchouk_basis(n, gamma, kmax=None, dps=_CONSTRUCTION_DPS):
    """Build the Krawtchouk basis for (n, gamma) up to degree kmax.

    kmax defaults to min(n, 64); degrees above 64 are allowed only when an
    explicit kmax is passed (extended precision keeps the construction sound,
    checked by the b_k > 0 guard below).  Bases are cached per (n, gamma,
    kmax, dps): they are immutable and construction is the expensive step.
    """
    gamma = Fraction(gamma).limit_denominator(10**12) if not isinstance(gamma, Fraction) else gamma
    if kmax is None:
        kmax = min(n, DEFAULT_KMAX)
    if kmax > n:
        raise ValueError(f"degree {kmax} exceeds n={n}: only n+1 support points")
    cache_key = (n, gamma, kmax, dps)
    if cache_key in _BASIS_CACHE:
        return _BASIS_CACHE[cache_key]
    with mp.workdps(dps):
        pmf = _null_pmf_mp(n, gamma, dps)
        g = mp.mpf(gamma.numerator) / gamma.denominator
        s = mp.sqrt(n * g * (1 - g))
        y = [(w - g * n) / s for w in range(n + 1)]
        p_prev = [mp.mpf(0)] * (n + 1)
        p = [mp.mpf(1)] * (n + 1)
        alphas, betas = [], []
        for k in range(kmax):
            a = mp.fsum(pmf[w] * y[w] * p[w] ** 2 for w in range(n + 1))
            bprev = betas[-1] if betas else mp.mpf(0)
            r = [(y[w] - a) * p[w] - bprev * p_prev[w] for w in range(n + 1)]
            b2 = mp.fsum(pmf[w] * r[w] ** 2 for w in range(n + 1))
            if b2 <= 0:
                raise ArithmeticError(f"lost orthogonality at degree {k + 1} (n={n})")
            b = mp.sqrt(b2)
            alphas.append(a)
            betas.append(b)
            p_prev, p = p, [rw / b for rw in r]
        basis = KrawtchoukBasis(
            n=n,
            gamma=gamma,
            kmax=kmax,
            alphas=np.array([float(a) for a in alphas]),
            betas=np.array([float(b) for b in betas]),
            mp_alphas=alphas,
            mp_betas=betas,
        )
    _BASIS_CACHE[cache_key] = basis
    return basis


def krawtchouk_eval(basis, k, y):
    """Kr_k(y; n, gamma) at arbitrary real y (not only on the support)."""
    if k > basis.n:
        raise ValueError(f"degree {k} exceeds n={basis.n}")
    return basis.eval(k, y)


def verify_krawtchouk_orthonormality(basis, law, amax=None, dps=_CONSTRUCTION_DPS):
    """Max |sum_w nu(w) Kr_a Kr_b - delta_ab| over a, b <= amax, by enumeration."""
    amax = min(basis.kmax, 12) if amax is None else amax
    with mp.workdps(dps):
        pmf = _null_pmf_mp(law.n, law.gamma, dps)
        rows = basis.support_rows_mp(kmax=amax, dps=dps)
        worst = mp.mpf(0)
        for a in range(amax + 1):
            for b in range(a, amax + 1):
                ip = mp.fsum(pmf[w] * rows[a][w] * rows[b][w] for w in range(law.n + 1))
                dev = abs(ip - (1 if a == b else 0))
                if dev > worst:
                    worst = dev
        return float(worst)


def verify_krawtchouk_bound(basis, k, y_grid, constant=3.0):
    """Grid maximum of |Kr_k(y)| * k^(-1/4) * exp(-y^2/4) against a constant cap.

    Valid range per the underlying estimate: k <= n/2 and |y| <= n^(1/6)/2;
    grid points outside that window are flagged in the report, not rejected.
    """
    if k < 1 or k > basis.n // 2:
        raise ValueError("k must satisfy 1 <= k <= n/2")
    y_grid = np.asarray(y_grid, dtype=float)
    ylim = basis.n ** (1.0 / 6.0) / 2.0
    outside = np.abs(y_grid) > ylim
    # high degrees overflow float64 off the bulk; evaluate in extended precision
    if k <= 40:
        vals = basis.values(y_grid, kmax=k)[k]
        ratio = np.abs(vals) * k ** (-0.25) * np.exp(-(y_grid**2) / 4.0)
        max_ratio = float(np.max(ratio))
        argmax = int(np.argmax(ratio))
    else:
        with mp.workdps(_CONSTRUCTION_DPS):
            ymp = [mp.mpf(float(t)) for t in y_grid]
            rows = basis.values_mp(ymp, kmax=k)
            ratios = [
                abs(rows[k][i]) * mp.mpf(k) ** mp.mpf("-0.25") * mp.e ** (-ymp[i] ** 2 / 4)
                for i in range(len(ymp))
            ]
            argmax = max(range(len(ratios)), key=lambda i: ratios[i])
            max_ratio = float(ratios[argmax])
    return {
        "k": k,
        "max_ratio": max_ratio,
        "argmax_y": float(y_grid[argmax]),
        "within_constant": max_ratio <= constant,
        "constant": constant,
        "grid_points_outside_validity": int(outside.sum()),
    }


def verify_hermite_orthonormality(amax=12, nodes=200):
    """Max |E[h_a h_b] - delta_ab| under N(0,1) by Gauss-Hermite quadrature."""
    x, w = gauss_hermite_rule(nodes)
    H = hermite_vandermonde(x, amax)
    G = (H * w) @ H.T
    return float(np.abs(G - np.eye(amax + 1)).max())


def verify_hermite_derivative(kmax=12, step=1e-5, xs=None):
    """Max relative error of h_k' = sqrt(k) h_{k-1} against central differences."""
    xs = np.linspace(-3.0, 3.0, 25) if xs is None else np.asarray(xs)
    worst = 0.0
    for k in range(1, kmax + 1):
        fd = (hermite_eval(k, xs + step) - hermite_eval(k, xs - step)) / (2 * step)
        ref = math.sqrt(k) * hermite_eval(k - 1, xs)
        scale = np.maximum(np.abs(ref), 1.0)
        worst = max(worst, float(np.max(np.abs(fd - ref) / scale)))
    return worst
