"""
Labelled random streams: every stochastic subsystem draws from a generator
derived from (master seed, subsystem tag, index).
"""

import hashlib

import numpy as np

from .errors import ComplexInputError


def tag_key(tag: str) -> int:
    """Stable 32-bit key for a subsystem tag."""
    return int.from_bytes(hashlib.blake2b(tag.encode("utf-8"), digest_size=4).digest(), "little")


def derive_rng(seed: int, tag: str, index: int = 0) -> np.random.Generator:
    if seed < 0 or index < 0:
        raise ComplexInputError("seeds and stream indices must be non-negative")
    sequence = np.random.SeedSequence(entropy=int(seed), spawn_key=(tag_key(tag), int(index)))
    return np.random.default_rng(sequence)
