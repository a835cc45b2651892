import numpy as np


def as_seed(rng):
    """Normalise an int seed or a numpy Generator into a 64-bit kernel seed."""
    if rng is None:
        return 0
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(0, 2**63, dtype=np.int64))
    return int(rng) & ((1 << 64) - 1)


def run_seed(master, i):
    """Counter-based per-run seed: independent of execution order."""
    ss = np.random.SeedSequence([int(master) & ((1 << 64) - 1), int(i)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])
