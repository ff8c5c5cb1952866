"""Seeded random streams.

All randomness goes through Philox4x64-10 (counter-based, 64-bit) keyed
directly by the user seed, with the counter starting at zero. Draw ``i`` of a
stream therefore depends only on ``(seed, i)``, never on evaluation order.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.Philox(key=seed))


def log_uniform(rng: np.random.Generator, lo: float, hi: float, size) -> np.ndarray:
    u = rng.random(size)
    return np.exp(np.log(lo) + u * (np.log(hi) - np.log(lo)))


def uniform(rng: np.random.Generator, lo: float, hi: float, size) -> np.ndarray:
    u = rng.random(size)
    return lo + u * (hi - lo)
