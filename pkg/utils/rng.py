# utils/rng.py
"""
Seed derivation.

Every random quantity in a run is drawn from a generator derived from the run
seed plus a task key, so results do not depend on scheduling order.
"""
from __future__ import annotations
import zlib
from typing import Sequence, Tuple, Union

import numpy as np

from models.errors import DomainError

KeyPart = Union[int, float, str]

_COORD_OFFSET = 1 << 31
MAX_SITE_DIMENSION = 6


def _key_word(part: KeyPart) -> int:
    if isinstance(part, (bool, np.bool_)):
        return int(part)
    if isinstance(part, (int, np.integer)):
        value = int(part)
        return value if value >= 0 else (1 << 32) + (value & 0xFFFFFFFF)
    return zlib.crc32(repr(part).encode("utf-8"))


def seed_sequence(seed: int, *keys: KeyPart) -> np.random.SeedSequence:
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(_key_word(k) for k in keys))


def derive_seed(seed: int, *keys: KeyPart) -> int:
    """Child seed for the task identified by keys"""
    return int(seed_sequence(seed, *keys).generate_state(1, np.uint32)[0])


def make_rng(seed: int, *keys: KeyPart) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, *keys))


def philox_key(seed: int) -> np.ndarray:
    return seed_sequence(seed, "site-disorder").generate_state(2, np.uint64)


def site_counter(coords: Sequence[int]) -> np.ndarray:
    """
    Philox counter addressing one lattice site.

    Word 0 is left at zero for the draws of that site; coordinates are packed two
    per word into words 1..3.
    """
    if len(coords) > MAX_SITE_DIMENSION:
        raise DomainError(f"site-addressed streams support d <= {MAX_SITE_DIMENSION}, got {len(coords)}")
    words = [0, 0, 0, 0]
    for i, c in enumerate(coords):
        shifted = int(c) + _COORD_OFFSET
        if not 0 <= shifted < (1 << 32):
            raise DomainError(f"coordinate {c} out of range for site addressing")
        words[1 + i // 2] |= shifted << (32 * (i % 2))
    return np.array(words, dtype=np.uint64)


def site_stream(key: np.ndarray, coords: Tuple[int, ...]) -> np.random.Generator:
    """Generator whose output is a pure function of (key, coords)"""
    return np.random.Generator(np.random.Philox(key=key, counter=site_counter(coords)))
