"""Seeded generators and order-preserving fan-out over worker processes."""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

import numpy as np

T = TypeVar("T")
R = TypeVar("R")


def make_rng(seed: int) -> np.random.Generator:
    """Get a Philox counter-based generator; the identifier is ``config.RNG_ALGORITHM``."""
    return np.random.Generator(np.random.Philox(seed))


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int = 1) -> list[R]:
    """Apply ``fn`` to every item, returning results in input order.

    Args:
        fn: A picklable top-level function
        items: Work items
        workers: Process count; 1 or less runs in the calling process

    Returns:
        Results in the order of ``items``, independent of ``workers``
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
