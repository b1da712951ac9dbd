"""
Reproducible random streams.

Every random draw in rafpy comes from a ``numpy.random.Generator`` backed by the
counter-based Philox4x64-10 bit generator, seeded through a
``numpy.random.SeedSequence`` built from a master seed and a tuple of keys
(purpose tags and indices). The same arguments give the same stream on every
platform, and streams for different keys are statistically independent.
"""

from __future__ import annotations

import hashlib

import numpy as np

ALGORITHM = "philox4x64-10"

_MASK64 = (1 << 64) - 1


def _key_to_int(key: int | str) -> int:
    if isinstance(key, str):
        digest = hashlib.blake2b(key.encode("utf-8"), digest_size=8).digest()
        return int.from_bytes(digest, "little")
    if isinstance(key, (bool, np.bool_)):
        msg = "boolean keys are ambiguous, use an int or a str"
        raise TypeError(msg)
    return int(key) & _MASK64


def seed_sequence(master_seed: int, *keys: int | str) -> np.random.SeedSequence:
    """Build the SeedSequence for ``(master_seed, *keys)``; seeds are reduced mod 2**64."""
    entropy = [int(master_seed) & _MASK64, *(_key_to_int(key) for key in keys)]
    return np.random.SeedSequence(entropy)


def derive_seed(master_seed: int, *keys: int | str) -> int:
    """Derive a 64-bit child seed, e.g. ``derive_seed(7, "success-rate", 3, 12)``."""
    state = seed_sequence(master_seed, *keys).generate_state(1, dtype=np.uint64)
    return int(state[0])


def make_rng(seed: int, *keys: int | str) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed_sequence(seed, *keys)))
