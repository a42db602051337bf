"""Counter-based random streams keyed by (seed, sweep index, realization).

Each trial owns a Philox generator whose key is derived from the triple, so
results do not depend on execution order or worker count.
"""
import numpy as np


def trial_stream(seed, sweep_index, realization):
    """Independent Philox-backed generator for one trial."""
    if seed < 0 or sweep_index < 0 or realization < 0:
        raise ValueError("seed and indices must be nonnegative")
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFFFFFFFFFF, int(sweep_index), int(realization)])
    return np.random.Generator(np.random.Philox(ss))
