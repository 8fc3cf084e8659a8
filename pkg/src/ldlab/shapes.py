"""Connected multigraph statistics of symmetric random matrices.

A shape is a connected multigraph on v unlabeled vertices with edge
multiplicities; its statistic on a symmetric matrix M is

    psi(M) = |L|^{-1/2} * sum over distinct injective labelings of
             prod_edges h_mult(M[pair]),

with h_m the normalized Hermite polynomials and |L| = n^(v) / |Aut| the
number of labelings modulo automorphism.  Under the Gaussian matrix null
the psi of distinct shapes form an orthonormal family, which makes them the
natural degree-limited basis for matrix-input likelihood-ratio projections.

Evaluation is exact and batched: the injective sum is expanded over vertex
partitions (Mobius inversion on the partition lattice) into free sums, and
every free sum is one einsum over elementwise Hermite transforms of M.
Merged vertices produce loop factors on the diagonal; these intermediate
terms cancel in the total, so the result never depends on the diagonal
convention.  The expansion is validated against direct enumeration in the
test suite.
"""

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

__all__ = [
    "MultigraphShape",
    "make_shape",
    "enumerate_connected_shapes",
    "ShapeEvaluator",
    "FamilyEvaluator",
    "shape_statistic",
]


def _partitions_of_set(items):
    """All set partitions, as tuples of tuples."""
    items = list(items)
    if not items:
        yield ()
        return
    first, rest = items[0], items[1:]
    for part in _partitions_of_set(rest):
        yield ((first,),) + part
        for i, block in enumerate(part):
            yield part[:i] + ((first,) + block,) + part[i + 1 :]


def _canonical_key(nverts, edges):
    """Minimum over vertex relabelings of the sorted (u, v, mult) encoding."""
    best = None
    for perm in permutations(range(nverts)):
        enc = tuple(
            sorted((min(perm[u], perm[v]), max(perm[u], perm[v]), m) for u, v, m in edges)
        )
        if best is None or enc < best:
            best = enc
    return best


def _automorphism_count(nverts, edges):
    ref = tuple(sorted((u, v, m) for u, v, m in edges))
    count = 0
    for perm in permutations(range(nverts)):
        enc = tuple(
            sorted((min(perm[u], perm[v]), max(perm[u], perm[v]), m) for u, v, m in edges)
        )
        if enc == ref:
            count += 1
    return count


def _is_connected(nverts, edges):
    if nverts == 1:
        return True
    adj = {i: set() for i in range(nverts)}
    for u, v, _ in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == nverts


@dataclass(frozen=True)
class MultigraphShape:
    """Connected multigraph with per-edge multiplicities; vertices 0..nverts-1."""

    nverts: int
    edges: tuple  # ((u, v, mult), ...) with u < v
    aut: int

    @property
    def total_degree(self):
        return sum(m for _, _, m in self.edges)

    @property
    def nedges(self):
        return len(self.edges)

    @property
    def max_mult(self):
        return max(m for _, _, m in self.edges)

    def labeling_count(self, n):
        if n < self.nverts:
            return 0
        return math.perm(n, self.nverts) // self.aut

    def canonical(self):
        return _canonical_key(self.nverts, self.edges)

    def describe(self):
        return ";".join(f"{u}-{v}x{m}" for u, v, m in self.edges)


def make_shape(edges):
    """Shape from an iterable of (u, v) pairs or (u, v, mult) triples."""
    norm = {}
    verts = set()
    for e in edges:
        if len(e) == 2:
            u, v, m = e[0], e[1], 1
        else:
            u, v, m = e
        if u == v:
            raise ValueError("loops are not allowed in shapes")
        key = (min(u, v), max(u, v))
        norm[key] = norm.get(key, 0) + m
        verts.update(key)
    if not norm:
        raise ValueError("shape needs at least one edge")
    if sorted(verts) != list(range(len(verts))):
        raise ValueError("vertices must be 0..v-1 with no gaps")
    nverts = len(verts)
    etuple = tuple(sorted((u, v, m) for (u, v), m in norm.items()))
    if not _is_connected(nverts, etuple):
        raise ValueError("shape must be connected")
    return MultigraphShape(nverts, etuple, _automorphism_count(nverts, etuple))


def enumerate_connected_shapes(max_total_degree):
    """All connected shapes with no isolated vertices and total degree <= bound."""
    found = {}
    for v in range(2, max_total_degree + 2):
        pairs = [(a, b) for a in range(v) for b in range(a + 1, v)]
        min_edges = v - 1  # spanning requirement
        if min_edges > max_total_degree:
            break

        def assign(idx, remaining, current):
            if idx == len(pairs):
                if not current:
                    return
                covered = set()
                for (a, b), m in current.items():
                    covered.update((a, b))
                if len(covered) != v:
                    return
                etuple = tuple(sorted((a, b, m) for (a, b), m in current.items()))
                if not _is_connected(v, etuple):
                    return
                key = _canonical_key(v, etuple)
                if key not in found:
                    found[key] = MultigraphShape(v, key, _automorphism_count(v, key))
                return
            # skip this pair
            assign(idx + 1, remaining, current)
            for m in range(1, remaining + 1):
                current[pairs[idx]] = m
                assign(idx + 1, remaining - m, current)
            current.pop(pairs[idx], None)

        assign(0, max_total_degree, {})
    shapes = sorted(found.values(), key=lambda s: (s.total_degree, s.nverts, s.edges))
    return shapes


def _quotient(shape, blocks):
    """Quotient descriptor under a vertex partition: edge and loop mult-multisets."""
    block_of = {}
    for bi, block in enumerate(blocks):
        for u in block:
            block_of[u] = bi
    edge_labels = {}
    loop_labels = {}
    for u, v, m in shape.edges:
        bu, bv = block_of[u], block_of[v]
        if bu == bv:
            loop_labels.setdefault(bu, []).append(m)
        else:
            key = (min(bu, bv), max(bu, bv))
            edge_labels.setdefault(key, []).append(m)
    edges = tuple(sorted((u, v, tuple(sorted(ms))) for (u, v), ms in edge_labels.items()))
    loops = tuple(sorted((b, tuple(sorted(ms))) for b, ms in loop_labels.items()))
    return len(blocks), edges, loops


def _quotient_canonical(nblocks, edges, loops):
    best = None
    for perm in permutations(range(nblocks)):
        e = tuple(
            sorted((min(perm[u], perm[v]), max(perm[u], perm[v]), ms) for u, v, ms in edges)
        )
        lo = tuple(sorted((perm[b], ms) for b, ms in loops))
        enc = (e, lo)
        if best is None or enc < best:
            best = enc
    return (nblocks, best[0], best[1])


def _mobius_weight(blocks):
    w = 1
    for block in blocks:
        k = len(block)
        w *= (-1) ** (k - 1) * math.factorial(k - 1)
    return w


_LETTERS = "ijklmnop"
_PATH_CACHE = {}


def _hermite_mats(m_batch, mults):
    """Elementwise Hermite transforms h_m(M) for the needed orders only."""
    mats = {}
    prev = np.zeros_like(m_batch)
    cur = np.ones_like(m_batch)
    for m in range(1, max(mults) + 1):
        prev, cur = cur, (m_batch * cur - math.sqrt(m - 1) * prev) / math.sqrt(m)
        if m in mults:
            mats[m] = cur
    n = m_batch.shape[-1]
    didx = np.arange(n)
    diags = {m: w[:, didx, didx] for m, w in mats.items()}
    return mats, diags


def _free_sum(q, mats, diags, n):
    nblocks, edges, loops = q
    operands = []
    subs = []
    used = set()
    for u, v, ms in edges:
        w = mats[ms[0]]
        for m in ms[1:]:
            w = w * mats[m]
        operands.append(w)
        subs.append("z" + _LETTERS[u] + _LETTERS[v])
        used.update((u, v))
    for b, ms in loops:
        d = diags[ms[0]]
        for m in ms[1:]:
            d = d * diags[m]
        operands.append(d)
        subs.append("z" + _LETTERS[b])
        used.add(b)
    free = nblocks - len(used)
    spec = ",".join(subs) + "->z"
    pkey = (spec, tuple(op.shape for op in operands))
    path = _PATH_CACHE.get(pkey)
    if path is None:
        path = np.einsum_path(spec, *operands, optimize="optimal")[0]
        _PATH_CACHE[pkey] = path
    out = np.einsum(spec, *operands, optimize=path)
    return out * float(n) ** free


class ShapeEvaluator:
    """Batched exact evaluator of a shape's normalized statistic."""

    def __init__(self, shape):
        self.shape = shape
        terms = {}
        for blocks in _partitions_of_set(range(shape.nverts)):
            q = _quotient(shape, blocks)
            key = _quotient_canonical(*q)
            mu = _mobius_weight(blocks)
            if key in terms:
                terms[key] = (terms[key][0] + mu, terms[key][1])
            else:
                terms[key] = (mu, q)
        self.terms = [(key, mu, q) for key, (mu, q) in terms.items() if mu != 0]
        self.mults = sorted({m for _, _, m in shape.edges})

    def _eval_prepared(self, mats, diags, n, cache):
        total = 0.0
        for key, mu, q in self.terms:
            if key not in cache:
                cache[key] = _free_sum(q, mats, diags, n)
            total = total + mu * cache[key]
        norm = self.shape.aut * math.sqrt(self.shape.labeling_count(n))
        return total / norm

    def __call__(self, m_batch):
        """Values of the statistic on a (B, n, n) symmetric batch (or one matrix)."""
        m_batch = np.asarray(m_batch, dtype=float)
        single = m_batch.ndim == 2
        if single:
            m_batch = m_batch[None]
        n = m_batch.shape[-1]
        if self.shape.nverts > n:
            raise ValueError(f"n={n} smaller than shape on {self.shape.nverts} vertices")
        mats, diags = _hermite_mats(m_batch, set(self.mults))
        out = self._eval_prepared(mats, diags, n, {})
        return out[0] if single else out


class FamilyEvaluator:
    """Evaluate many shapes on one batch, sharing Hermite transforms and the
    free sums of quotients that several shapes have in common."""

    def __init__(self, shapes):
        self.evals = [ShapeEvaluator(s) for s in shapes]
        self.mults = set()
        for ev in self.evals:
            self.mults.update(ev.mults)

    def __call__(self, m_batch):
        """(B, n_shapes) value matrix."""
        m_batch = np.asarray(m_batch, dtype=float)
        if m_batch.ndim == 2:
            m_batch = m_batch[None]
        n = m_batch.shape[-1]
        mats, diags = _hermite_mats(m_batch, self.mults)
        cache = {}
        cols = [ev._eval_prepared(mats, diags, n, cache) for ev in self.evals]
        return np.stack(cols, axis=1)


def shape_statistic(shape, m_batch):
    """One-shot evaluation; build a ShapeEvaluator for repeated use."""
    return ShapeEvaluator(shape)(m_batch)
