"""Counter-based RNG stream derivation.

Every stochastic unit of work (one generated graph, one perturbed graph at one
level) gets its own stream keyed by the user seed plus integer coordinates, so
results do not depend on execution order or thread count.
"""

import numpy as np

# Domain tags keep streams of different subsystems disjoint for the same seed.
SYNTH = 1
PERTURB = 2
BENCH = 3


def derive_stream(seed, *key):
    seq = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))


def check_seed(seed):
    if seed is None:
        raise ValueError("a seed is required for reproducible results")
    if isinstance(seed, (bool, float)) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    return int(seed)
