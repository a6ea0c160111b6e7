"""Seeded block streams for batch Monte Carlo.

Trials are cut into fixed-size blocks. Block ``i`` of a run keyed by ``key``
draws from ``SeedSequence(seed, spawn_key=(*key, i))``, so the totals depend
only on (seed, key, trials) and never on how many workers ran the blocks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

BLOCK_SIZE = 1 << 16


def block_rng(seed: int, key: tuple[int, ...], block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(*key, block)))


def run_blocked(
    kernel: Callable[[np.random.Generator, int], np.ndarray],
    trials: int,
    seed: int,
    key: tuple[int, ...] = (),
    workers: int = 1,
) -> np.ndarray:
    """Sum the integer tallies ``kernel(rng, n)`` returns over all blocks.

    Tallies must be integer arrays so that the reduction is exact and
    order-independent.
    """
    if trials < 0:
        raise ValueError("trials must be non-negative")
    sizes = [min(BLOCK_SIZE, trials - start) for start in range(0, trials, BLOCK_SIZE)]

    def one(i: int) -> np.ndarray:
        return np.asarray(kernel(block_rng(seed, key, i), sizes[i]), dtype=np.int64)

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(one, range(len(sizes))))
    else:
        parts = [one(i) for i in range(len(sizes))]
    if not parts:
        return np.zeros(0, dtype=np.int64)
    return np.sum(parts, axis=0)
