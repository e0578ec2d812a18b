# module_experiment/utils/seeding.py
"""
Sub-seed derivation for independent, reproducible trial streams.

derive_sub_seed folds each key part into the master seed with the splitmix64
finalizer, so a trial's stream depends only on (master_seed, distribution,
block size index, trial) and never on scheduling.
"""
import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# Key part used in place of the block-size index for a shared (fixed) mempool.
FIXED_MEMPOOL_PART = _MASK64


def splitmix64(x: int) -> int:
    z = (x + _GOLDEN_GAMMA) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_sub_seed(master_seed: int, *parts: int) -> int:
    h = splitmix64(master_seed & _MASK64)
    for part in parts:
        h = splitmix64(h ^ (part & _MASK64))
    return h


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator seeded with a 64-bit value."""
    return np.random.Generator(np.random.PCG64(seed))
