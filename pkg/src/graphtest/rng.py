"""Deterministic random-stream derivation.

All randomness in the package flows through :func:`substream`, which derives
an independent generator from a 64-bit master seed plus an integer path
(for example ``substream(seed, cell_index, replicate)``).  Derived streams
are stable across runs and independent of scheduling, so replicated
experiments produce identical results whether they run serially or on a
worker pool.
"""

from __future__ import annotations

import numpy as np

from .errors import ConfigError

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    """Validate and return a master seed (unsigned 64-bit integer)."""
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"seed must be in [0, 2^64), got {seed}")
    return int(seed)


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Return the generator keyed by ``(master_seed, *path)``.

    The same key always yields the same stream; distinct keys yield
    statistically independent streams.
    """
    check_seed(master_seed)
    for p in path:
        if not isinstance(p, (int, np.integer)) or p < 0:
            raise ConfigError(f"stream path entries must be non-negative ints, got {p!r}")
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(p) for p in path))
    return np.random.default_rng(seq)


def fresh_seed() -> int:
    """Draw a master seed from OS entropy (for runs without --seed)."""
    return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
