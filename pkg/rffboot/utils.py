from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

import numpy as np

from rffboot.exceptions import InvalidInput

T = TypeVar("T")
R = TypeVar("R")


def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """Random stream that depends only on ``seed`` and the ``keys`` path.

    Streams with different key paths are statistically independent, so work
    items seeded this way can run in any order on any worker.
    """
    sequence = np.random.SeedSequence(
        int(seed), spawn_key=tuple(int(k) for k in keys)
    )
    return np.random.default_rng(sequence)


def derive_seed(seed: int, *keys: int) -> int:
    """Integer seed derived the same way as :func:`derive_rng`."""
    sequence = np.random.SeedSequence(
        int(seed), spawn_key=tuple(int(k) for k in keys)
    )
    return int(sequence.generate_state(1, dtype=np.uint32)[0])


def as_rng(rng) -> np.random.Generator:
    """Accept a generator, an integer seed or ``None``."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def parallel_map(
    function: Callable[[T], R], items: Iterable[T], workers: int = 1
) -> List[R]:
    """Apply ``function`` to ``items`` and return results in input order.

    :param workers: Number of threads; ``1`` runs inline.
    """
    if workers < 1:
        raise InvalidInput(f"Worker count must be positive, got {workers}.")
    items = list(items)
    if workers == 1 or len(items) < 2:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(function, items))
