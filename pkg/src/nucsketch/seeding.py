"""Deterministic seed derivation.

Every random object in the toolkit is a pure function of a 64-bit seed.  Child
seeds for Monte Carlo trials are derived with the SplitMix64 finalizer applied to
``master + (index + 1) * GOLDEN`` (mod 2**64).  The finalizer is a bijection on
64-bit words and ``GOLDEN`` is odd, so distinct indices below 2**64 always give
distinct child seeds for a fixed master seed.
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def check_seed(seed) -> int:
    from .errors import ParameterError

    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise ParameterError(f"seed must be an integer, got {seed!r}")
    seed = int(seed)
    if not 0 <= seed <= MASK64:
        raise ParameterError(f"seed must fit in an unsigned 64-bit word, got {seed}")
    return seed


def derive_seed(master: int, index: int, stream: int = 0) -> int:
    """Child seed number `index` of `master`; `stream` separates independent uses."""
    base = splitmix64(check_seed(master) ^ splitmix64(stream)) if stream else check_seed(master)
    return splitmix64(base + (index + 1) * GOLDEN)


def rng_for(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(check_seed(seed)))
