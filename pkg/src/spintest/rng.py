"""Seeded, splittable random streams.

Every random choice in the package draws from a stream derived from a
user seed plus a tuple of names, so that e.g. the port choice and the
k-th matching of a gadget never share state.
"""
from __future__ import annotations

import random
import zlib

import numpy as np

MASK64 = (1 << 64) - 1


def _key(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFF
    return zlib.crc32(str(part).encode())


def seed_sequence(seed: int, *names) -> np.random.SeedSequence:
    return np.random.SeedSequence(int(seed) & MASK64, spawn_key=tuple(_key(n) for n in names))


def stream(seed: int, *names) -> np.random.Generator:
    """Independent generator for the substream ``names`` of ``seed``."""
    return np.random.Generator(np.random.PCG64(seed_sequence(seed, *names)))


def py_stream(seed: int, *names) -> random.Random:
    """Python ``random.Random`` substream; used where exact big-integer draws are needed."""
    state = seed_sequence(seed, *names).generate_state(4, dtype=np.uint64)
    return random.Random(int.from_bytes(state.tobytes(), "little"))


def child_seed(seed: int, *names) -> int:
    """A 64-bit integer seed for a named substream."""
    return int(seed_sequence(seed, *names).generate_state(1, dtype=np.uint64)[0])
