"""Seeded random streams.

Every sample owns an independent PCG64 stream whose seed sequence is
``SeedSequence([seed, index])``, so sample ``i`` of a batch is reproducible
on its own and batches can be split across workers without coordination.
"""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 20240229

GRID = 2.0**-53


def sample_stream(seed: int, index: int) -> np.random.Generator:
    if seed < 0 or index < 0:
        raise ValueError("seed and index must be nonnegative")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(index)])))


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an int seed or None (fixed default seed)."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.default_rng(DEFAULT_SEED)
    if isinstance(rng, (int, np.integer)):
        return np.random.default_rng(int(rng))
    raise TypeError(f"cannot build a random generator from {rng!r}")


def snap_to_grid(x: float) -> float:
    """Round to the nearest multiple of 2**-53.

    ``Generator.random`` already returns values on this grid; keeping all
    capacity values on it makes ``1 - (1 - x) == x`` hold exactly.
    """
    return float(np.round(x / GRID) * GRID)
