"""Gauss-Hermite quadrature for expectations under the standard Gaussian.

Probabilists' convention throughout: ``gauss_hermite_rule(m)`` returns nodes
``x`` and weights ``w`` with ``sum(w) = 1`` such that ``sum(w * f(x))``
integrates ``f`` against N(0,1) exactly for polynomials of degree < 2m.
"""

import functools

import numpy as np
from scipy.special import roots_hermitenorm

__all__ = ["gauss_hermite_rule", "gauss_expectation"]

_SQRT_2PI = np.sqrt(2.0 * np.pi)


@functools.lru_cache(maxsize=32)
def _cached_rule(m):
    x, w = roots_hermitenorm(int(m))
    x.flags.writeable = False
    w = w / _SQRT_2PI
    w.flags.writeable = False
    return x, w


def gauss_hermite_rule(m):
    """Nodes and probability weights of the m-point rule for N(0,1)."""
    if m < 1:
        raise ValueError("need at least one node")
    return _cached_rule(m)


def gauss_expectation(f, m=200):
    """E[f(g)] for g ~ N(0,1) by the m-point rule; f vectorized over nodes."""
    x, w = gauss_hermite_rule(m)
    return np.sum(w * f(x))
