"""Counter-based random streams.

Every sampler is keyed by (seed, stream label) through SHA-256 into a Philox
key, and batches are generated in fixed-size chunks whose Philox counters are
spaced 2^128 blocks apart.  Chunk boundaries depend only on the chunk size,
never on how work is scheduled, so a batch is bit-for-bit reproducible
regardless of parallelism.
"""

import hashlib

import numpy as np

__all__ = ["CHUNK", "philox_key", "chunk_generator", "stream_generator"]

CHUNK = 4096


def philox_key(seed, stream):
    """128-bit Philox key derived from an integer seed and a stream label."""
    digest = hashlib.sha256(f"{int(seed)}|{stream}".encode()).digest()
    return int.from_bytes(digest[:16], "little")


def chunk_generator(key, chunk_index):
    """Generator for one chunk; counters of distinct chunks never overlap."""
    bg = np.random.Philox(key=key, counter=[0, 0, int(chunk_index), 0])
    return np.random.Generator(bg)


def stream_generator(seed, stream):
    """Single-chunk convenience generator (chunk 0 of the stream)."""
    return chunk_generator(philox_key(seed, stream), 0)
