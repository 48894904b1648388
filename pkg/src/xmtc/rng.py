"""Deterministic per-worker random substreams.

Parallel training must not depend on scheduling order, so each tree gets its
own seed derived from (root seed, tree index) with a splitmix-style 64-bit
mixer. Substream ``i`` of root seed ``s`` is the ``i``-th output of a
SplitMix64 sequence started at ``s``:

    seed_i = mix64(s + (i + 1) * 0x9E3779B97F4A7C15)   (mod 2**64)

where ``mix64`` is the standard SplitMix64 finalizer. The mix is fixed; it is
part of the serialized-model contract, not an implementation detail.
"""

from __future__ import annotations

import numpy as np

__all__ = ["mix64", "substream_seed", "substream"]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    """SplitMix64 finalizer: a bijective avalanche over 64-bit integers."""
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def substream_seed(seed: int, index: int) -> int:
    """Seed of substream ``index`` derived from root ``seed``."""
    if index < 0:
        raise ValueError("substream index must be >= 0")
    return mix64((seed + (index + 1) * _GOLDEN) & _MASK64)


def substream(seed: int, index: int) -> np.random.Generator:
    """A PCG64 generator seeded from ``substream_seed(seed, index)``."""
    return np.random.Generator(np.random.PCG64(substream_seed(seed, index)))
