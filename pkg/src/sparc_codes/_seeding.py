"""Deterministic seed derivation."""

from __future__ import annotations

import numpy as np


def derive_seed(*keys: int) -> int:
    """A 64-bit seed determined by the tuple of non-negative integer ``keys``."""
    return int(np.random.SeedSequence(list(keys)).generate_state(1, np.uint64)[0])


def resolve_seed(random_state) -> int:
    """Turn an estimator's ``random_state`` into a concrete 64-bit seed.

    ``None`` draws fresh OS entropy; integers pass through unchanged.
    """
    if random_state is None:
        return int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    if isinstance(random_state, bool) or not isinstance(random_state, (int, np.integer)):
        raise TypeError(
            "random_state must be None or a non-negative integer; generator "
            "objects cannot reproduce a codebook"
        )
    if not 0 <= random_state < 2**64:
        raise ValueError(f"random_state must lie in [0, 2**64), got {random_state}")
    return int(random_state)
