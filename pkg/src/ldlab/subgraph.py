"""Normalized signed subgraph counts of symmetric matrices and their
Chatterjee-style Gaussian-surrogate pipeline.

For a small connected simple pattern theta, the statistic is

    chi_theta(M) = |L|^{-1/2} * sum over distinct injective labelings of
                   prod_{ab in E(theta)} M[pi(a), pi(b)],

with |L| = n!/((n-v)! |Aut|).  The diagonal never participates (patterns are
simple graphs); all closed forms zero it out first.  Under the Gaussian
matrix null, E[chi] = 0 and E[chi^2] = 1.

Two computation paths exist everywhere: trace-identity closed forms for the
four cataloged patterns (edge, 2-path, triangle, 4-cycle), vectorized over
sample batches, and the generic ordered-injection enumeration through
:mod:`ldlab.kernels`; the tests assert they agree.

The noisy pipeline follows the second-order Poincare route: for fixed M,
the conditional law of chi(sqrt(1-eps) M + sqrt(eps) G) over G is compared
with N(sqrt(1-eps)^e chi(M), sigma^2(M)) via

    tv <= 2 sqrt(5) kappa1 kappa2 / sigma^2,

where kappa1/kappa2 are fourth-moment norms of the gradient/Hessian of the
noisy statistic and sigma^2 decomposes exactly over derivative tensors:

    sigma^2(M) = sum_{t=1}^{e} eps^t (1-eps)^{e-t} Q_t(M),
    Q_t(M) = sum over pair-sets S, |S| = t, of (d^t chi / dS)^2.
"""

import hashlib
import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from . import kernels
from .errors import BudgetError
from .models import _sym_gauss
from .rng import chunk_generator, philox_key

__all__ = [
    "GraphPattern",
    "ChatterjeeStats",
    "make_pattern",
    "pattern_from_file",
    "EDGE",
    "PATH2",
    "TRIANGLE",
    "CYCLE4",
    "chi_theta",
    "chi_theta_batch",
    "grad_chi",
    "hess_apply",
    "hess_opnorm",
    "sigma2",
    "sigma2_floor",
    "grad_hess_stats",
    "chatterjee_bound",
    "noisy_count_laws",
    "moment_check",
]

GENERIC_BUDGET = 2 * 10**8  # cap on n^v work in the enumeration path


@dataclass(frozen=True)
class GraphPattern:
    """Connected simple motif on at most 8 vertices."""

    nverts: int
    edges: tuple  # ((u, v), ...) with u < v
    aut: int
    name: str = ""

    @property
    def nedges(self):
        return len(self.edges)

    def labeling_count(self, n):
        if n < self.nverts:
            return 0
        return math.perm(n, self.nverts) // self.aut

    def digest(self):
        enc = f"v={self.nverts};" + ";".join(f"{u}-{v}" for u, v in self.edges)
        return hashlib.sha256(enc.encode()).hexdigest()[:12]

    def _bfs_order(self):
        """Vertex order where each later vertex touches an earlier one, plus the
        per-level lists of edges completed at that vertex (kernel layout)."""
        adj = {i: [] for i in range(self.nverts)}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        order = [0]
        seen = {0}
        queue = [0]
        while queue:
            u = queue.pop(0)
            for w in sorted(adj[u]):
                if w not in seen:
                    seen.add(w)
                    order.append(w)
                    queue.append(w)
        rank = {v: i for i, v in enumerate(order)}
        lev_edge, lev_other, lev_ptr = [], [], [0]
        eid = {e: i for i, e in enumerate(self.edges)}
        for level, v in enumerate(order):
            for u, w in self.edges:
                if max(rank[u], rank[w]) == level and {rank[u], rank[w]} != {level}:
                    other = u if rank[w] == level else w
                    lev_edge.append(eid[(u, w)])
                    lev_other.append(rank[other])
            lev_ptr.append(len(lev_edge))
        eu = np.array([rank[u] for u, v in self.edges], dtype=np.int64)
        ev = np.array([rank[v] for u, v in self.edges], dtype=np.int64)
        return (
            eu,
            ev,
            np.array(lev_ptr, dtype=np.int64),
            np.array(lev_edge, dtype=np.int64),
            np.array(lev_other, dtype=np.int64),
        )


def make_pattern(edges, name=""):
    """Build a pattern from an edge list; rejects loops, multi-edges,
    disconnected graphs, and more than 8 vertices."""
    eset = set()
    verts = set()
    for u, v in edges:
        if u == v:
            raise ValueError("loops are not allowed")
        key = (min(u, v), max(u, v))
        if key in eset:
            raise ValueError("multi-edges are not allowed")
        eset.add(key)
        verts.update(key)
    if not eset:
        raise ValueError("pattern needs at least one edge")
    if sorted(verts) != list(range(len(verts))):
        raise ValueError("vertices must be 0..v-1 with no gaps")
    v = len(verts)
    if v > 8:
        raise ValueError("patterns are limited to 8 vertices")
    etuple = tuple(sorted(eset))
    adj = {i: set() for i in range(v)}
    for a, b in etuple:
        adj[a].add(b)
        adj[b].add(a)
    seen, stack = {0}, [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    if len(seen) != v:
        raise ValueError("pattern must be connected")
    aut = 0
    for perm in permutations(range(v)):
        if {(min(perm[a], perm[b]), max(perm[a], perm[b])) for a, b in etuple} == eset:
            aut += 1
    return GraphPattern(v, etuple, aut, name)


def pattern_from_file(path, name=""):
    """Edge-list text format: one '<u> <v>' pair per line, 0-indexed;
    blank lines and lines starting with '#' are skipped."""
    edges = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            u, v = line.split()
            edges.append((int(u), int(v)))
    return make_pattern(edges, name or str(path))


EDGE = make_pattern([(0, 1)], "edge")
PATH2 = make_pattern([(0, 1), (1, 2)], "2-path")
TRIANGLE = make_pattern([(0, 1), (1, 2), (0, 2)], "triangle")
CYCLE4 = make_pattern([(0, 1), (1, 2), (2, 3), (0, 3)], "4-cycle")

_CLOSED_FORMS = {}


def _closed_form_key(pattern):
    v, e = pattern.nverts, pattern.nedges
    if (v, e) == (2, 1):
        return "edge"
    if (v, e) == (3, 2):
        return "path2"
    if (v, e) == (3, 3):
        return "triangle"
    if (v, e) == (4, 4) and all(
        sum(1 for a, b in pattern.edges if w in (a, b)) == 2 for w in range(4)
    ):
        return "cycle4"
    return None


def _zero_diag_batch(m):
    a = np.array(m, dtype=float, copy=True)
    n = a.shape[-1]
    a[..., np.arange(n), np.arange(n)] = 0.0
    return a


def chi_theta_batch(m, pattern):
    """chi_theta over a (B, n, n) batch (or a single matrix) via closed forms
    when the pattern is cataloged, otherwise the enumeration path."""
    m = np.asarray(m, dtype=float)
    single = m.ndim == 2
    batch = m[None] if single else m
    key = _closed_form_key(pattern)
    if key is None:
        out = np.array([_chi_generic(x, pattern) for x in batch])
        return out[0] if single else out
    a = _zero_diag_batch(batch)
    n = a.shape[-1]
    L = pattern.labeling_count(n)
    if L == 0:
        raise ValueError(f"n={n} smaller than the pattern")
    if key == "edge":
        raw = a.sum((1, 2)) / 2.0
    elif key == "path2":
        r = a.sum(2)
        raw = ((r * r).sum(1) - (a * a).sum((1, 2))) / 2.0
    elif key == "triangle":
        a2 = np.matmul(a, a)
        raw = (a2 * a).sum((1, 2)) / 6.0
    else:  # cycle4
        a2 = np.matmul(a, a)
        n_idx = np.arange(n)
        tr4 = (a2 * a2).sum((1, 2))
        diag2 = a2[:, n_idx, n_idx]
        raw = (tr4 - 2.0 * (diag2 * diag2).sum(1) + (a**4).sum((1, 2))) / 8.0
    out = raw / math.sqrt(L)
    return out[0] if single else out


def _check_generic_budget(n, pattern):
    if float(n) ** pattern.nverts > GENERIC_BUDGET:
        raise BudgetError(
            f"enumeration budget exceeded: n^v = {n}^{pattern.nverts} > {GENERIC_BUDGET}"
        )


def _edge_value_stack(m, pattern):
    a = _zero_diag_batch(m)
    out = np.empty((pattern.nedges,) + a.shape)
    out[:] = a
    return out


def _chi_generic(m, pattern):
    n = m.shape[-1]
    if n < pattern.nverts:
        raise ValueError(f"n={n} smaller than the pattern")
    _check_generic_budget(n, pattern)
    eu, ev, lev_ptr, lev_edge, lev_other = pattern._bfs_order()
    vals = _edge_value_stack(m, pattern)
    raw = kernels.injection_sum(vals, lev_ptr, lev_edge, lev_other, pattern.nverts)
    return raw / pattern.aut / math.sqrt(pattern.labeling_count(n))


def chi_theta(m, pattern, method="auto"):
    """Normalized signed count of one matrix.

    method: 'auto' (closed form when cataloged), 'closed', or 'generic'.
    """
    if method == "generic":
        return float(_chi_generic(np.asarray(m, dtype=float), pattern))
    if method == "closed" and _closed_form_key(pattern) is None:
        raise ValueError(f"no closed form for pattern {pattern.name or pattern.edges}")
    return float(chi_theta_batch(m, pattern))


def grad_chi(m, pattern):
    """Pair-derivative matrix d chi / d M_{ij} (symmetric, zero diagonal)."""
    m = np.asarray(m, dtype=float)
    n = m.shape[-1]
    L = pattern.labeling_count(n)
    key = _closed_form_key(pattern)
    a = _zero_diag_batch(m)
    if key == "edge":
        g = np.full((n, n), 1.0)
    elif key == "path2":
        r = a.sum(1)
        g = r[:, None] + r[None, :] - 2.0 * a
    elif key == "triangle":
        g = a @ a
    elif key == "cycle4":
        a2 = a @ a
        a3 = a2 @ a
        d2 = np.diag(a2)
        g = a3 - a * (d2[:, None] + d2[None, :]) + a**3
    else:
        _check_generic_budget(n, pattern)
        eu, ev, lev_ptr, lev_edge, lev_other = pattern._bfs_order()
        vals = _edge_value_stack(m, pattern)
        g = kernels.injection_grad(
            vals, eu, ev, lev_ptr, lev_edge, lev_other, pattern.nverts
        ) / pattern.aut
    g = g / math.sqrt(L)
    np.fill_diagonal(g, 0.0)
    return (g + g.T) / 2.0 if key is None else g


def hess_apply(m, pattern, x):
    """Action of the Hessian of chi at M on a symmetric zero-diagonal direction."""
    m = np.asarray(m, dtype=float)
    n = m.shape[-1]
    key = _closed_form_key(pattern)
    a = _zero_diag_batch(m)
    xs = _zero_diag_batch(x)
    L = pattern.labeling_count(n)
    if key == "edge":
        h = np.zeros((n, n))
    elif key == "path2":
        rho = xs.sum(1)
        h = rho[:, None] + rho[None, :] - 2.0 * xs
    elif key == "triangle":
        h = a @ xs + xs @ a
    elif key == "cycle4":
        a2 = a @ a
        ax = a @ xs
        xa = xs @ a
        mix = ax + xa
        dmix = np.diag(mix)
        d2 = np.diag(a2)
        h = (
            xs @ a2
            + a @ xa
            + a2 @ xs
            - xs * (d2[:, None] + d2[None, :])
            - a * (dmix[:, None] + dmix[None, :])
            + 3.0 * a**2 * xs
        )
    else:
        _check_generic_budget(n, pattern)
        eu, ev, _, _, _ = pattern._bfs_order()
        # hess kernel wants values and the direction in BFS-relabeled indexing,
        # but edge value matrices are index-symmetric here, so no relabeling needed
        vals = _edge_value_stack(m, pattern)
        h = kernels.injection_hess_apply(vals, xs, eu, ev, pattern.nverts) / pattern.aut
    h = h / math.sqrt(L)
    np.fill_diagonal(h, 0.0)
    return (h + h.T) / 2.0 if key is None else h


def hess_opnorm(m, pattern, steps=50, tol=1e-6, seed=0):
    """Operator norm of the Hessian of chi at M by power iteration on the
    pair-vector space (inner product over unordered pairs)."""
    n = np.asarray(m).shape[-1]
    rng = chunk_generator(philox_key(seed, "hess-power"), 0)
    x = _sym_gauss(rng, 1, n)[0]
    np.fill_diagonal(x, 0.0)

    def norm_pairs(z):
        return math.sqrt(float((np.triu(z, 1) ** 2).sum()))

    lam_prev = 0.0
    converged = False
    for _ in range(steps):
        y = hess_apply(m, pattern, x)
        ny = norm_pairs(y)
        if ny == 0.0:
            return 0.0, True
        y = y / ny
        lam = abs(float(np.triu(y * hess_apply(m, pattern, y), 1).sum()))
        x = y
        if abs(lam - lam_prev) <= tol * max(1.0, lam):
            lam_prev = lam
            converged = True
            break
        lam_prev = lam
    return lam_prev, converged


def sigma2_floor(pattern, eps):
    """(eps/2) (1-eps)^(e-1): the guaranteed conditional-variance floor."""
    return 0.5 * eps * (1.0 - eps) ** (pattern.nedges - 1)


def _qt_closed(m, pattern):
    """Q_t(M) for cataloged patterns (t = 1..e), from the derived identities."""
    key = _closed_form_key(pattern)
    a = _zero_diag_batch(m)
    n = a.shape[-1]
    L = pattern.labeling_count(n)
    if key == "edge":
        return np.array([1.0])
    if key == "path2":
        r = a.sum(1)
        g = r[:, None] + r[None, :] - 2.0 * a
        np.fill_diagonal(g, 0.0)
        q1 = (g * g).sum() / 2.0 / L
        return np.array([q1, 1.0])
    if key == "triangle":
        a2 = a @ a
        off = a2.copy()
        np.fill_diagonal(off, 0.0)
        q1 = (off * off).sum() / 2.0 / L
        q2 = (n - 2) * (a * a).sum() / 2.0 / L
        return np.array([q1, q2, 1.0])
    if key == "cycle4":
        return _qt_cycle4(a, L)
    return None


def _qt_cycle4(a, L):
    n = a.shape[-1]
    a2 = a @ a
    a3 = a2 @ a
    d2 = np.diag(a2)
    # t = 1: the gradient
    g = a3 - a * (d2[:, None] + d2[None, :]) + a**3
    np.fill_diagonal(g, 0.0)
    q1 = (g * g).sum() / 2.0 / L
    # t = 2, adjacent image pairs {a,b},{b,c}: value (A^2)_ac - A_ab A_bc
    q2 = 0.0
    for b in range(n):
        outer = np.outer(a[b], a[b])
        val = a2 - outer
        val[b, :] = 0.0
        val[:, b] = 0.0
        np.fill_diagonal(val, 0.0)
        q2 += (np.triu(val, 1) ** 2).sum()
    # t = 2, disjoint image pairs {a,b},{c,d}: value A_bc A_da + A_bd A_ca,
    # each unordered configuration counted 8 times by the ordered sum
    q2d = _cycle4_disjoint_sq(a)
    # t = 3: image = 3-edge path p-q-r-s, remaining edge value A_ps
    q3 = _cycle4_q3(a)
    return np.array([q1, (q2 + q2d) / L, q3 / L, 1.0])


def _cycle4_disjoint_sq(a):
    """sum over unordered {{a,b},{c,d}} (all four distinct) of
    (A_bc A_da + A_bd A_ca)^2, via the 8-fold ordered sum."""
    n = a.shape[-1]
    total = 0.0
    for i in range(n):
        total += _disjoint_inner(a, i)
    return total / 8.0


def _disjoint_inner(a, i):
    n = a.shape[-1]
    mask = np.ones(n, dtype=bool)
    mask[i] = False
    idx = np.where(mask)[0]
    sub = a[np.ix_(idx, idx)]  # (n-1, n-1) among j,k,l
    li = a[idx, i]  # A_{l i}
    ik = a[i, idx]  # A_{i k}
    # ordered (j, k, l) distinct within idx of (sub_jk * li_l + sub_jl * ik_k)^2
    # expand: sub_jk^2 li_l^2 + 2 sub_jk li_l sub_jl ik_k + sub_jl^2 ik_k^2
    s2 = sub * sub
    li2 = li * li
    ik2 = ik * ik
    # term1: sum_{j != k} s2_jk * sum_{l != j,k} li2_l  (zero diag of s2 kills j == k)
    tot_li2 = li2.sum()
    term1 = (s2 * (tot_li2 - li2[None, :] - li2[:, None])).sum()
    # term3: sum_{j != l} s2_jl * sum_{k != j,l} ik2_k
    tot_ik2 = ik2.sum()
    term3 = (s2 * (tot_ik2 - ik2[None, :] - ik2[:, None])).sum()
    # cross: 2 * sum_{j,k,l distinct} sub_jk li_l sub_jl ik_k
    # = 2 * sum_j [ (sum_k sub_jk ik_k)(sum_l sub_jl li_l) - sum_k sub_jk^2 ik_k li_k ]
    sk = sub @ ik
    sl = sub @ li
    cross = 2.0 * float((sk * sl).sum() - ((sub * sub) @ (ik * li)).sum())
    return float(term1 + term3 + cross)


def _cycle4_q3(a):
    """sum over unordered 3-edge paths p-q-r-s (distinct vertices) of A_ps^2."""
    n = a.shape[-1]
    # each endpoint set {p, s} supports (n-2)(n-3) distinct paths (ordered
    # choice of the two interior vertices); full-matrix sum double counts {p, s}
    return 0.5 * (n - 2) * (n - 3) * float((a * a).sum())


def sigma2(m, pattern, eps, mode="exact", mc_budget=2000, seed=0):
    """Var over G of chi(sqrt(1-eps) M + sqrt(eps) G).

    'exact' sums the derivative-tensor series (closed forms for cataloged
    patterns; generic enumeration within budget otherwise); 'mc' uses the
    sample variance over fresh noise draws.
    """
    if not (0 <= eps <= 1):
        raise ValueError("eps must lie in [0, 1]")
    m = np.asarray(m, dtype=float)
    e = pattern.nedges
    if mode == "exact":
        qt = _qt_closed(m, pattern)
        if qt is None:
            qt = _qt_generic(m, pattern)
        t = np.arange(1, e + 1)
        return float(np.sum(eps**t * (1.0 - eps) ** (e - t) * qt))
    if mode != "mc":
        raise ValueError("mode must be 'exact' or 'mc'")
    rng = chunk_generator(philox_key(seed, "sigma2-mc"), 0)
    n = m.shape[-1]
    vals = []
    chunk = max(1, min(mc_budget, 10**7 // max(n * n, 1)))
    remaining = mc_budget
    while remaining > 0:
        b = min(chunk, remaining)
        g = _sym_gauss(rng, b, n)
        vals.append(chi_theta_batch(np.sqrt(1 - eps) * m + np.sqrt(eps) * g, pattern))
        remaining -= b
    vals = np.concatenate(vals)
    return float(vals.var(ddof=1))


def _qt_generic(m, pattern):
    """Q_t by enumeration (sparse accumulation of derivative coefficients)."""
    n = m.shape[-1]
    e = pattern.nedges
    if e > 6:
        raise BudgetError("exact mode handles at most 6 edges; use mode='mc'")
    if n > 64:
        raise BudgetError("generic exact sigma2 requires n <= 64")
    if float(n) ** pattern.nverts * (2**e) > 4 * 10**7:
        raise BudgetError("derivative-tensor budget exceeded; use mode='mc'")
    eu, ev, _, _, _ = pattern._bfs_order()
    vals = _edge_value_stack(m, pattern)
    qt = kernels.dtensor_sq_sums(vals, eu, ev, pattern.nverts, e - 1) if e > 1 else []
    L = pattern.labeling_count(n)
    out = np.empty(e)
    out[: e - 1] = np.asarray(qt) / (pattern.aut**2) / L
    # t = e: distinct labelings have distinct full edge images, so Q_e = 1 exactly
    out[e - 1] = 1.0
    return out


def grad_hess_stats(m, pattern, eps, mc_budget=200, seed=0, power_steps=50, power_tol=1e-6):
    """Monte Carlo fourth-moment norms (kappa1, kappa2) of the gradient and
    Hessian of G -> chi(sqrt(1-eps) M + sqrt(eps) G).

    Chain rule: the gradient is sqrt(eps) * grad chi at the noisy point and
    the Hessian is eps * Hess chi there, so the noisy-point statistics are
    scaled accordingly.  Returns ((kappa1, se1), (kappa2, se2), all_converged).
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[-1]
    rng = chunk_generator(philox_key(seed, "grad-hess"), 0)
    g4 = np.empty(mc_budget)
    h4 = np.empty(mc_budget)
    all_conv = True
    for i in range(mc_budget):
        g = _sym_gauss(rng, 1, n)[0]
        point = np.sqrt(1.0 - eps) * m + np.sqrt(eps) * g
        gr = grad_chi(point, pattern)
        g4[i] = (np.triu(gr, 1) ** 2).sum() ** 2  # ||grad||_2^4 over pairs
        op, conv = hess_opnorm(point, pattern, steps=power_steps, tol=power_tol, seed=seed + i)
        all_conv = all_conv and conv
        h4[i] = op**4
    kap1 = math.sqrt(eps) * float(np.mean(g4)) ** 0.25
    kap2 = eps * float(np.mean(h4)) ** 0.25
    se1 = math.sqrt(eps) * _quarter_power_se(g4)
    se2 = eps * _quarter_power_se(h4)
    return (kap1, se1), (kap2, se2), all_conv


def _quarter_power_se(fourth_moments):
    mean = float(np.mean(fourth_moments))
    if mean == 0.0:
        return 0.0
    se = float(np.std(fourth_moments, ddof=1)) / math.sqrt(len(fourth_moments))
    return 0.25 * mean ** (0.25 - 1.0) * se


@dataclass(frozen=True)
class ChatterjeeStats:
    kappa1: float
    kappa2: float
    sigma2: float
    sigma2_floor: float
    kappa1_se: float = 0.0
    kappa2_se: float = 0.0

    @property
    def sigma2_effective(self):
        return max(self.sigma2, self.sigma2_floor)

    @property
    def tv_bound(self):
        if self.sigma2 <= 0:
            raise ZeroDivisionError("sigma2 must be positive")
        return 2.0 * math.sqrt(5.0) * self.kappa1 * self.kappa2 / self.sigma2


def chatterjee_bound(stats, clamp=True):
    """2 sqrt(5) kappa1 kappa2 / sigma^2, clamped to [0, 1] on report."""
    raw = stats.tv_bound
    return min(raw, 1.0) if clamp else raw


def noisy_count_laws(planted_sampler, pattern, eps, budget, seed, sigma_mode="auto"):
    """Paired samples of the true noisy statistic and its Gaussian surrogate.

    For each planted draw M: the true sample is chi(sqrt(1-eps) M + sqrt(eps) G);
    the surrogate is sqrt(1-eps)^e chi(M) + sigma_tilde(M) * g with
    sigma_tilde^2 = max(Var_G chi(...), floor).  sigma_mode 'auto' uses the
    exact series for cataloged patterns and Monte Carlo otherwise.
    """
    e = pattern.nedges
    rng = chunk_generator(philox_key(seed, "noisy-count"), 1)
    floor = sigma2_floor(pattern, eps)
    use_exact = sigma_mode == "exact" or (
        sigma_mode == "auto" and _closed_form_key(pattern) is not None
    )
    true_vals = np.empty(budget)
    surr_vals = np.empty(budget)
    sigmas = np.empty(budget)
    start = 0
    for m_chunk in planted_sampler(budget, seed):
        b = m_chunk.shape[0]
        n = m_chunk.shape[-1]
        g = _sym_gauss(rng, b, n)
        true_vals[start : start + b] = chi_theta_batch(
            np.sqrt(1.0 - eps) * m_chunk + np.sqrt(eps) * g, pattern
        )
        base = chi_theta_batch(m_chunk, pattern)
        if use_exact:
            s2 = np.array([sigma2(x, pattern, eps, mode="exact") for x in m_chunk])
        else:
            s2 = np.array(
                [sigma2(x, pattern, eps, mode="mc", mc_budget=400, seed=seed + start + i)
                 for i, x in enumerate(m_chunk)]
            )
        st = np.sqrt(np.maximum(s2, floor))
        sigmas[start : start + b] = st
        surr_vals[start : start + b] = (1.0 - eps) ** (e / 2.0) * base + st * rng.normal(size=b)
        start += b
    return true_vals[:start], surr_vals[:start], sigmas[:start]


def moment_check(pattern, q_list, n, mc_budget, seed, tolerance=0.1, chunk=512):
    """Sub-Gaussian moment ratios E[chi^q]^(1/q) / sqrt(q) under the matrix null.

    Even q only.  Returns per-q dicts with the ratio, a delta-method stderr,
    and a flag when ratio > 1 + tolerance; large qth-power variance widens the
    error bars rather than failing silently.
    """
    for q in q_list:
        if q % 2 or q < 2:
            raise ValueError("moments must be even and >= 2")
        if q > 12 and mc_budget <= 10**7:
            raise BudgetError("q > 12 needs a larger budget than 1e7")
    key = philox_key(seed, "moment-check")
    qmax = max(q_list)
    sums = {q: 0.0 for q in q_list}
    sumsq = {q: 0.0 for q in q_list}
    total = 0
    for chunk_index, startpos in enumerate(range(0, mc_budget, chunk)):
        b = min(chunk, mc_budget - startpos)
        g = _sym_gauss(chunk_generator(key, chunk_index), b, n)
        vals = chi_theta_batch(g, pattern)
        for q in q_list:
            vq = vals**q
            sums[q] += float(vq.sum())
            sumsq[q] += float((vq * vq).sum())
        total += b
    out = []
    for q in q_list:
        mean = sums[q] / total
        var = max(sumsq[q] / total - mean * mean, 0.0)
        se = math.sqrt(var / total)
        ratio = mean ** (1.0 / q) / math.sqrt(q) if mean > 0 else 0.0
        ratio_se = se / (q * mean ** (1.0 - 1.0 / q) * math.sqrt(q)) if mean > 0 else 0.0
        out.append(
            {
                "q": q,
                "moment": mean,
                "moment_se": se,
                "ratio": ratio,
                "ratio_se": ratio_se,
                "flagged": ratio > 1.0 + tolerance,
                "wide_bars": se > 0.1 * mean if mean > 0 else True,
            }
        )
    return out
