"""Seeded random streams.

Every stochastic routine in the package draws from numpy's Philox4x64
counter-based bit generator, keyed through a ``SeedSequence`` built from a
tuple of non-negative integers (e.g. ``(seed, read_index)``). Philox output
is specified by its algorithm rather than by platform, so streams reproduce
bit-for-bit across machines.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def _entropy(keys) -> list[int]:
    return [int(k) & _MASK64 for k in keys]


def make_rng(*keys: int) -> np.random.Generator:
    """Return a Philox-backed generator keyed by ``keys``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(_entropy(keys))))


def derive_seed(*keys: int) -> int:
    """Hash ``keys`` into a single 64-bit seed."""
    state = np.random.SeedSequence(_entropy(keys)).generate_state(1, dtype=np.uint64)
    return int(state[0])
