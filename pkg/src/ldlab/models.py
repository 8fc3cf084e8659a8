"""Null and planted distributions, noise operators, and exact noisy-law oracles.

Domains:
  * ``boolean``: strings in {-1, +1}^n, null = product of Ber(gamma) signs
    (+1 with probability gamma),
  * ``vector``: R^n, null = N(0, I_n),
  * ``wigner``: symmetric n x n matrices, null has independent N(0,1) entries
    above the diagonal and independent N(0,1) entries on the diagonal (the
    diagonal convention is recorded in batch metadata; no statistic in this
    package reads the diagonal).

Planted laws are relabeling-invariant by construction.  Noise operators:
coordinate resampling for boolean inputs, Ornstein-Uhlenbeck interpolation
``sqrt(1-eps) x + sqrt(eps) g`` for Gaussian vectors and matrices.
"""

import json
import struct
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .orthopoly import WeightLaw, make_weight_law
from .quadrature import gauss_hermite_rule
from .rng import CHUNK, chunk_generator, philox_key

__all__ = [
    "NullSpec",
    "PlantedSpec",
    "SampleBatch",
    "boolean_null",
    "gauss_vector_null",
    "gauss_wigner_null",
    "biased_product_spec",
    "weight_conditioned_spec",
    "spiked_mean_spec",
    "quadrature_product_spec",
    "wigner_spike_spec",
    "sample",
    "apply_boolean_noise",
    "apply_ou_noise",
    "noisy_weight_law",
    "planted_weight_law",
    "compose_eps",
    "save_batch",
    "load_batch",
    "batch_to_csv",
]

MAGIC = b"LDLB"
FORMAT_VERSION = 1
_DOMAIN_TAGS = {"boolean": 1, "vector": 2, "wigner": 3}
_TAG_DOMAINS = {v: k for k, v in _DOMAIN_TAGS.items()}


@dataclass(frozen=True)
class NullSpec:
    """Null distribution: kind in {'boolean', 'vector', 'wigner'}."""

    kind: str
    n: int
    gamma: Optional[Fraction] = None

    def __post_init__(self):
        if self.kind not in _DOMAIN_TAGS:
            raise ValueError(f"unknown null kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "boolean":
            if self.gamma is None or not (0 < self.gamma < 1):
                raise ValueError("boolean null needs gamma in (0, 1)")

    @property
    def domain(self):
        return self.kind

    def canonical(self):
        g = "" if self.gamma is None else f",gamma={self.gamma}"
        return f"null:{self.kind}(n={self.n}{g})"


@dataclass(frozen=True)
class PlantedSpec:
    """Planted distribution over the same domain as its base null.

    Kinds:
      * ``biased_product(eta)``      boolean, marginal Ber(gamma + eta)
      * ``weight_conditioned(W)``    boolean, null conditioned on weight in W
      * ``spiked_mean(lam)``         vector, x = g + lam * r / sqrt(n), r Rademacher
      * ``quadrature_product(m)``    vector, iid m-point Gauss-Hermite marginal
      * ``wigner_spike(lam, ell)``   wigner, M = lam u u^T + W, u an ell-sparse
                                     unit vector with Rademacher signs
    """

    kind: str
    base: NullSpec
    params: tuple = field(default_factory=tuple)

    def __post_init__(self):
        k, b = self.kind, self.base
        if k == "biased_product":
            (eta,) = self.params
            if b.kind != "boolean":
                raise ValueError("biased_product needs a boolean base")
            if not (0 < float(b.gamma) + eta < 1):
                raise ValueError("gamma + eta must lie in (0, 1)")
        elif k == "weight_conditioned":
            (window,) = self.params
            if b.kind != "boolean":
                raise ValueError("weight_conditioned needs a boolean base")
            if not window or min(window) < 0 or max(window) > b.n:
                raise ValueError("weight window must be a nonempty subset of 0..n")
        elif k == "spiked_mean":
            (lam,) = self.params
            if b.kind != "vector":
                raise ValueError("spiked_mean needs a vector base")
        elif k == "quadrature_product":
            (m,) = self.params
            if b.kind != "vector":
                raise ValueError("quadrature_product needs a vector base")
            if m < 2:
                raise ValueError("need at least 2 quadrature nodes")
        elif k == "wigner_spike":
            lam, ell = self.params
            if b.kind != "wigner":
                raise ValueError("wigner_spike needs a wigner base")
            if not (1 <= ell <= b.n):
                raise ValueError("sparsity must lie in 1..n")
        else:
            raise ValueError(f"unknown planted kind {k!r}")

    @property
    def domain(self):
        return self.base.kind

    @property
    def n(self):
        return self.base.n

    def canonical(self):
        if self.kind == "weight_conditioned":
            inner = "W=" + ",".join(str(w) for w in sorted(self.params[0]))
        else:
            inner = ",".join(repr(p) for p in self.params)
        return f"planted:{self.kind}({inner})|{self.base.canonical()}"


def boolean_null(n, gamma):
    gamma = gamma if isinstance(gamma, Fraction) else Fraction(gamma).limit_denominator(10**12)
    return NullSpec("boolean", n, gamma)


def gauss_vector_null(n):
    return NullSpec("vector", n)


def gauss_wigner_null(n):
    return NullSpec("wigner", n)


def biased_product_spec(n, gamma, eta):
    return PlantedSpec("biased_product", boolean_null(n, gamma), (float(eta),))


def weight_conditioned_spec(n, gamma, window):
    return PlantedSpec("weight_conditioned", boolean_null(n, gamma), (tuple(sorted(set(window))),))


def spiked_mean_spec(n, lam):
    return PlantedSpec("spiked_mean", gauss_vector_null(n), (float(lam),))


def quadrature_product_spec(m, n):
    """Product law whose marginal is the m-point Gauss-Hermite measure.

    The marginal matches N(0,1) moments up to degree 2m-1 exactly, so the
    degree-D likelihood-ratio advantage vanishes for D <= 2m-1 while the law
    stays discrete: the standard witness that noise is necessary for any
    TV-closeness statement.
    """
    return PlantedSpec("quadrature_product", gauss_vector_null(n), (int(m),))


def wigner_spike_spec(n, lam, ell):
    return PlantedSpec("wigner_spike", gauss_wigner_null(n), (float(lam), int(ell)))


@dataclass
class SampleBatch:
    domain: str
    count: int
    payload: np.ndarray
    seed: int
    meta: dict = field(default_factory=dict)


def _sym_gauss(rng, b, n):
    w = rng.normal(size=(b, n, n))
    upper = np.triu(w, 1)
    m = upper + upper.transpose(0, 2, 1)
    m[:, np.arange(n), np.arange(n)] = rng.normal(size=(b, n))
    return m


def _sample_chunk(spec, rng, b):
    n = spec.n
    if isinstance(spec, NullSpec):
        if spec.kind == "boolean":
            u = rng.random(size=(b, n))
            return np.where(u < float(spec.gamma), 1, -1).astype(np.int8)
        if spec.kind == "vector":
            return rng.normal(size=(b, n))
        return _sym_gauss(rng, b, n)
    kind = spec.kind
    if kind == "biased_product":
        (eta,) = spec.params
        p = float(spec.base.gamma) + eta
        u = rng.random(size=(b, n))
        return np.where(u < p, 1, -1).astype(np.int8)
    if kind == "weight_conditioned":
        (window,) = spec.params
        law = planted_weight_law(spec)
        probs = law.pmf
        ws = rng.choice(n + 1, size=b, p=probs)
        x = -np.ones((b, n), dtype=np.int8)
        # uniform positions for the +1s: argsort of uniforms is a uniform permutation
        order = np.argsort(rng.random(size=(b, n)), axis=1)
        rows = np.repeat(np.arange(b), ws)
        mask_cols = np.concatenate([order[i, : ws[i]] for i in range(b)]) if b else []
        if len(rows):
            x[rows, mask_cols] = 1
        return x
    if kind == "spiked_mean":
        (lam,) = spec.params
        g = rng.normal(size=(b, n))
        r = rng.choice([-1.0, 1.0], size=(b, n))
        return g + lam * r / np.sqrt(n)
    if kind == "quadrature_product":
        (m,) = spec.params
        nodes, weights = gauss_hermite_rule(m)
        idx = rng.choice(m, size=(b, n), p=weights / weights.sum())
        return nodes[idx]
    if kind == "wigner_spike":
        lam, ell = spec.params
        w = _sym_gauss(rng, b, n)
        for i in range(b):
            support = rng.choice(n, size=ell, replace=False)
            signs = rng.choice([-1.0, 1.0], size=ell)
            u = np.zeros(n)
            u[support] = signs / np.sqrt(ell)
            w[i] += lam * np.outer(u, u)
        return w
    raise ValueError(f"unknown kind {kind!r}")


def sample(spec, count, seed, stream="sample"):
    """Draw `count` iid samples; deterministic in (spec, count, seed)."""
    if count < 1:
        raise ValueError("count must be >= 1")
    key = philox_key(seed, f"{stream}|{spec.canonical()}")
    parts = []
    for chunk_index, start in enumerate(range(0, count, CHUNK)):
        b = min(CHUNK, count - start)
        parts.append(_sample_chunk(spec, chunk_generator(key, chunk_index), b))
    payload = np.concatenate(parts, axis=0)
    meta = {
        "spec": spec.canonical(),
        "chunk": CHUNK,
        "rng": "philox-sha256",
        "wigner_diagonal": "N(0,1), independent of the off-diagonal",
    }
    return SampleBatch(spec.domain, count, payload, int(seed), meta)


def sample_chunks(spec, count, seed, stream="sample", chunk=CHUNK):
    """Yield (start, chunk_payload) without materializing the whole batch."""
    key = philox_key(seed, f"{stream}|{spec.canonical()}")
    for chunk_index, start in enumerate(range(0, count, chunk)):
        b = min(chunk, count - start)
        yield start, _sample_chunk(spec, chunk_generator(key, chunk_index), b)


def apply_boolean_noise(x, eps, gamma, seed, stream="tnoise"):
    """Coordinate-resampling channel: keep each sign w.p. 1-eps, else fresh Ber(gamma).

    Fresh symbols are +1 with probability gamma, in the same +-1 coding as the
    null.  Accepts a single string or a batch (leading axis).
    """
    if not (0 <= eps <= 1):
        raise ValueError("eps must lie in [0, 1]")
    x = np.asarray(x)
    if eps == 0:
        return x.copy()
    rng = chunk_generator(philox_key(seed, stream), 0)
    resample = rng.random(size=x.shape) < eps
    fresh = np.where(rng.random(size=x.shape) < float(gamma), 1, -1).astype(x.dtype)
    return np.where(resample, fresh, x)


def apply_ou_noise(x, eps, seed, stream="ounoise"):
    """sqrt(1-eps) x + sqrt(eps) g with fresh standard Gaussian g of matching shape.

    Vectors get iid g; square matrices get a symmetric g with the package's
    diagonal convention.  Batches are recognized by a leading axis.
    """
    if not (0 <= eps <= 1):
        raise ValueError("eps must lie in [0, 1]")
    x = np.asarray(x, dtype=float)
    rng = chunk_generator(philox_key(seed, stream), 0)
    symmetric = x.ndim >= 2 and x.shape[-1] == x.shape[-2]
    if symmetric:
        batch = x.reshape((-1,) + x.shape[-2:])
        g = _sym_gauss(rng, batch.shape[0], batch.shape[-1]).reshape(x.shape)
    else:
        g = rng.normal(size=x.shape)
    return np.sqrt(1.0 - eps) * x + np.sqrt(eps) * g


def compose_eps(eps1, eps2):
    """Noise level of two composed applications (both channels form a semigroup)."""
    return eps1 + eps2 - eps1 * eps2


def planted_weight_law(spec):
    """Exact weight law of a boolean planted spec."""
    n, gamma = spec.base.n, spec.base.gamma
    if spec.kind == "biased_product":
        (eta,) = spec.params
        p = Fraction(float(gamma) + eta).limit_denominator(10**12)
        law = make_weight_law(n, p)
        # support/y-map must stay those of the null (same gamma)
        return WeightLaw(n, gamma, law.pmf)
    if spec.kind == "weight_conditioned":
        (window,) = spec.params
        null = make_weight_law(n, gamma)
        pmf = np.zeros(n + 1)
        idx = np.array(sorted(window))
        pmf[idx] = null.pmf[idx]
        total = pmf.sum()
        if total <= 0:
            raise ValueError("weight window has zero null mass")
        return WeightLaw(n, gamma, pmf / total)
    raise ValueError(f"{spec.kind!r} has no boolean weight law")


def noisy_weight_law(pi, eps, gamma=None):
    """Exact weight law after the coordinate-resampling channel.

    Conditioned on weight w, the noisy weight is Bin(w, 1 - eps*(1-gamma))
    + Bin(n-w, eps*gamma) with the two parts independent; the result is the
    mixture over pi.  This is the exact oracle used to validate every
    certified bound in binomial space.
    """
    from scipy.stats import binom as _binom

    if not (0 <= eps <= 1):
        raise ValueError("eps must lie in [0, 1]")
    gamma = float(pi.gamma) if gamma is None else float(gamma)
    n = pi.n
    p_keep = 1.0 - eps * (1.0 - gamma)
    p_new = eps * gamma
    out = np.zeros(n + 1)
    for w in range(n + 1):
        if pi.pmf[w] == 0.0:
            continue
        a = _binom.pmf(np.arange(w + 1), w, p_keep)
        b = _binom.pmf(np.arange(n - w + 1), n - w, p_new)
        out += pi.pmf[w] * np.convolve(a, b)
    out = np.clip(out, 0.0, None)
    return pi.with_pmf(out / out.sum())


def save_batch(path, batch):
    """Binary container: magic, version, domain tag, n, count; then payload.

    Payload is little-endian float64 for real domains and packed bits
    (+1 -> 1) for boolean strings.  A JSON metadata block is appended after
    the payload for provenance; readers ignore trailing bytes they do not
    need.
    """
    n = batch.payload.shape[1]
    header = struct.pack(
        "<4sIIQQ", MAGIC, FORMAT_VERSION, _DOMAIN_TAGS[batch.domain], n, batch.count
    )
    with open(path, "wb") as fh:
        fh.write(header)
        if batch.domain == "boolean":
            bits = (batch.payload > 0).astype(np.uint8)
            fh.write(np.packbits(bits, axis=None).tobytes())
        else:
            fh.write(np.ascontiguousarray(batch.payload, dtype="<f8").tobytes())
        fh.write(json.dumps({"seed": batch.seed, **batch.meta}).encode())
    return path


def load_batch(path):
    with open(path, "rb") as fh:
        header = fh.read(struct.calcsize("<4sIIQQ"))
        magic, version, tag, n, count = struct.unpack("<4sIIQQ", header)
        if magic != MAGIC:
            raise ValueError("not a sample container")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported container version {version}")
        domain = _TAG_DOMAINS[tag]
        if domain == "boolean":
            nbytes = (count * n + 7) // 8
            bits = np.unpackbits(np.frombuffer(fh.read(nbytes), dtype=np.uint8))
            payload = np.where(bits[: count * n].reshape(count, n) > 0, 1, -1).astype(np.int8)
        elif domain == "vector":
            payload = np.frombuffer(fh.read(count * n * 8), dtype="<f8").reshape(count, n).copy()
        else:
            payload = (
                np.frombuffer(fh.read(count * n * n * 8), dtype="<f8")
                .reshape(count, n, n)
                .copy()
            )
        trailer = fh.read()
    meta = json.loads(trailer) if trailer else {}
    seed = meta.pop("seed", 0)
    return SampleBatch(domain, count, payload, seed, meta)


def batch_to_csv(path, batch, limit=10000):
    """Flat CSV for small batches (row per sample; matrices row-major)."""
    if batch.count > limit:
        raise ValueError(f"batch too large for CSV export ({batch.count} > {limit})")
    flat = batch.payload.reshape(batch.count, -1)
    with open(path, "w") as fh:
        fh.write(",".join(f"c{j}" for j in range(flat.shape[1])) + "\n")
        for row in flat:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
    return path
