# File: src/analyzers/sphere_sampler.py
"""Invariant-measure sampling on the complex unit sphere and chunked MC runs"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar
import logging
import math

import numpy as np

from core.data_models import ComplexUnitVector, Dimension
from utils.config_manager import get_config, resolve_threads

logger = logging.getLogger(__name__)

R = TypeVar("R")


class SphereSampler:
    """Reproducible stream of uniformly distributed unit vectors in C^d.

    The stream is keyed by (seed, stream, chunk_index) through a counter-based
    Philox generator, so chunks are independent and need no shared state.
    """

    def __init__(self, d: int, seed: int, chunk_index: int = 0, stream: int = 0):
        self.d = Dimension(d)
        self.seed = int(seed)
        self.chunk_index = int(chunk_index)
        self.stream = int(stream)
        self.counter = 0
        sequence = np.random.SeedSequence([self.seed, self.stream, self.chunk_index])
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def draw(self, n: int) -> np.ndarray:
        """(n, d) array; rows are normalized complex Gaussian vectors"""
        g = self.generator.standard_normal((n, self.d)) + 1j * self.generator.standard_normal((n, self.d))
        self.counter += n
        return g / np.linalg.norm(g, axis=1, keepdims=True)


def sample_uniform(sampler: SphereSampler) -> ComplexUnitVector:
    """One draw from the unitarily invariant measure"""
    return ComplexUnitVector(sampler.draw(1)[0])


def chunk_sizes(n_total: int, chunk_size: Optional[int] = None) -> List[int]:
    chunk_size = chunk_size or get_config()["monte_carlo"]["chunk_size"]
    n_chunks = math.ceil(n_total / chunk_size)
    return [min(chunk_size, n_total - i * chunk_size) for i in range(n_chunks)]


def run_chunked(task: Callable[[SphereSampler, int], R], d: int, n_total: int, seed: int,
                stream: int = 0, chunk_size: Optional[int] = None,
                threads: Optional[int] = None) -> List[R]:
    """Run task(sampler, size) over fixed-size chunks; results in chunk order.

    Results depend on the chunk size but never on the thread count.
    """
    if n_total < 1:
        raise ValueError(f"need at least one sample, got {n_total}")
    sizes = chunk_sizes(n_total, chunk_size)
    workers = min(resolve_threads(threads), len(sizes))
    logger.debug(f"{n_total} samples in {len(sizes)} chunks on {workers} threads")

    def run(index: int) -> R:
        return task(SphereSampler(d, seed, chunk_index=index, stream=stream), sizes[index])

    if workers == 1:
        return [run(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(run, range(len(sizes))))
