"""Registry of capacity generators and seeded batch generation.

Sample ``i`` of a batch with master seed ``seed`` is produced from its own
stream :func:`sample_stream(seed, i) <capgen.rng.sample_stream>`; the same
stream first drives the linear extension and then the sorted uniforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .capacity import capacity_values_from_extension
from .exact import MAX_TABLE_N, ResourceLimitError, sample_extension_exact
from .lattice import check_n
from .reference import MarkovConfig, generate_markov, generate_random_node
from .rng import DEFAULT_SEED, sample_stream
from .twolayer import sample_extension


@dataclass(frozen=True)
class GeneratorSpec:
    name: str
    description: str
    min_n: int
    max_n: int
    uniform: bool  # exactly uniform on the capacity polytope


GENERATORS: dict[str, GeneratorSpec] = {
    "exact": GeneratorSpec("exact", "exact uniform linear extensions from ideal counts", 1, MAX_TABLE_N, True),
    "twolayer": GeneratorSpec("twolayer", "2-layer approximation sampler", 1, 16, False),
    "markov": GeneratorSpec("markov", "lazy adjacent-transposition Markov chain", 2, 16, False),
    "randomnode": GeneratorSpec("randomnode", "random node generator (biased baseline)", 1, 16, False),
}


class UnknownGeneratorError(KeyError):
    def __str__(self):
        return f"unknown generator {self.args[0]!r}; choose from {', '.join(GENERATORS)}"


def check_method(method: str, n: int) -> GeneratorSpec:
    """Validate a (method, n) combination and return the generator's description."""
    try:
        spec = GENERATORS[method]
    except KeyError:
        raise UnknownGeneratorError(method) from None
    n = check_n(n)
    if not spec.min_n <= n <= spec.max_n:
        err = ResourceLimitError if n > spec.max_n else ValueError
        raise err(f"method {method!r} supports {spec.min_n} <= n <= {spec.max_n}, got n={n}")
    return spec


def _one(method: str, n: int, rng: np.random.Generator, markov: MarkovConfig) -> np.ndarray:
    if method == "randomnode":
        return generate_random_node(n, rng)
    if method == "twolayer":
        order = sample_extension(n, rng)
    elif method == "markov":
        order = generate_markov(n, markov, rng)
    else:
        order = sample_extension_exact(n, rng)
    return capacity_values_from_extension(order, n, rng)


def sample_capacity(
    method: str, n: int, seed: int = DEFAULT_SEED, index: int = 0, markov_steps: int | None = None
) -> np.ndarray:
    """Value vector of sample ``index`` in the batch with master ``seed``."""
    check_method(method, n)
    return _one(method, n, sample_stream(seed, index), MarkovConfig(markov_steps))


def generate_batch(
    method: str,
    n: int,
    count: int,
    seed: int = DEFAULT_SEED,
    markov_steps: int | None = None,
    start: int = 0,
    progress: Callable[[int], None] | None = None,
) -> np.ndarray:
    """``count`` capacities as a (count, 2**n) array of values indexed by mask."""
    check_method(method, n)
    if count < 0:
        raise ValueError("count must be nonnegative")
    cfg = MarkovConfig(markov_steps)
    out = np.empty((count, 1 << n))
    for i in range(count):
        out[i] = _one(method, n, sample_stream(seed, start + i), cfg)
        if progress is not None:
            progress(i)
    return out


def generate_pairs(
    method: str, n: int, count: int, seed: int = DEFAULT_SEED, markov_steps: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Extensions and the capacities built from them, as :func:`generate_batch` would produce."""
    check_method(method, n)
    if method == "randomnode":
        raise ValueError("the random node generator does not produce linear extensions")
    cfg = MarkovConfig(markov_steps)
    orders = np.empty((count, (1 << n) - 2), dtype=np.int64)
    values = np.empty((count, 1 << n))
    for i in range(count):
        rng = sample_stream(seed, i)
        if method == "twolayer":
            orders[i] = sample_extension(n, rng)
        elif method == "markov":
            orders[i] = generate_markov(n, cfg, rng)
        else:
            orders[i] = sample_extension_exact(n, rng)
        values[i] = capacity_values_from_extension(orders[i], n, rng)
    return orders, values
