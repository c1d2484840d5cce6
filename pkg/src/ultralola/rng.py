"""Counter-based random streams.

Every stream is a Philox4x64-10 generator (Random123 family) keyed by the
64-bit master seed and a purpose tag. Monte Carlo work is cut into fixed-size
blocks of trials; block ``b`` starts its counter at ``b << 192``, so any block
can be generated independently of the others. A run split over several
workers therefore reproduces the serial run exactly.
"""

from __future__ import annotations

import numpy as np

BLOCK_TRIALS = 1 << 16

# purpose tags, second word of the Philox key
TAG_FEATURES = 1
TAG_TRANSMISSION = 2
TAG_CLASSIFICATION = 3
TAG_SIM_MS = 4
TAG_SIM_MV = 5

_MASK64 = (1 << 64) - 1


def check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0 or seed > _MASK64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def stream(seed: int, tag: int, block: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, tag, block)``."""
    seed = check_seed(seed)
    if block < 0:
        raise ValueError("block index must be nonnegative")
    bitgen = np.random.Philox(key=[seed, tag], counter=[0, 0, 0, block])
    return np.random.Generator(bitgen)


def blocks(trials: int, block_size: int = BLOCK_TRIALS) -> list[tuple[int, int]]:
    """Split ``trials`` into ``(block_index, n_trials)`` pairs."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    out = []
    for b, start in enumerate(range(0, trials, block_size)):
        out.append((b, min(block_size, trials - start)))
    return out
