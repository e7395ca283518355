"""
Sampling Module

Counter-based random streams and the chunked sample loop shared by the Monte
Carlo kernels (volume, validation, slicing).

A stream is keyed by (seed, stream id); chunk k of a loop always draws from
counter block k, so a loop gives bitwise identical results for any number of
workers. Chunk results are returned in chunk order and reduced by the caller.
"""

import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, Tuple, TypeVar

import numpy as np
import structlog
from scipy.stats import norm, qmc
from tqdm import tqdm

from simtile.config import CHUNK_SIZE

logger = structlog.get_logger(__name__)

T = TypeVar("T")

# Stream ids, one per sampling purpose
VOLUME_STREAM = 1
VALIDATION_STREAM = 2
INTERIOR_STREAM = 3
PROBE_STREAM = 4
SLICE_STREAM = 5
SUPPORT_STREAM = 6
TEST_STREAM = 99

_WORD = 1 << 64


def stream(seed: int, stream_id: int, chunk: int = 0) -> np.random.Generator:
    """
    Random generator for one chunk of one stream

    Args:
        seed: User seed, 0 <= seed < 2**64
        stream_id: Purpose of the stream
        chunk: Chunk index, stored in the high word of the Philox counter

    Returns:
        numpy Generator on a Philox bit generator
    """
    key = (int(seed) % _WORD) * _WORD + (int(stream_id) % _WORD)
    counter = (int(chunk) % _WORD) << 192
    return np.random.Generator(np.random.Philox(key=key, counter=counter))


def chunk_bounds(total: int, chunk_size: int = CHUNK_SIZE) -> List[Tuple[int, int]]:
    """Split range(total) into consecutive [start, stop) blocks of chunk_size."""
    return [(start, min(start + chunk_size, total)) for start in range(0, total, chunk_size)]


def map_chunks(
    fn: Callable[[int, int, int], T],
    total: int,
    workers: int = 1,
    chunk_size: int = CHUNK_SIZE,
    progress: bool = False,
    desc: str = "sampling",
) -> List[T]:
    """
    Run fn(chunk_index, start, stop) over all chunks of a sample loop

    Args:
        fn: Chunk kernel; must draw its randomness from `stream(..., chunk_index)`
        total: Number of samples
        workers: Thread count (1 runs inline)
        chunk_size: Samples per chunk
        progress: Show a tqdm bar on stderr
        desc: Progress bar label

    Returns:
        Chunk results in chunk order
    """
    bounds = chunk_bounds(total, chunk_size)
    jobs = [(index, start, stop) for index, (start, stop) in enumerate(bounds)]
    bar = tqdm(total=len(jobs), desc=desc, disable=not progress, leave=False)
    try:
        if workers <= 1 or len(jobs) <= 1:
            results = []
            for job in jobs:
                results.append(fn(*job))
                bar.update(1)
            return results
        with ThreadPoolExecutor(max_workers=workers) as executor:
            futures = [executor.submit(fn, *job) for job in jobs]
            results = []
            for future in futures:
                results.append(future.result())
                bar.update(1)
            return results
    finally:
        bar.close()


def uniform_box(rng: np.random.Generator, lo: np.ndarray, hi: np.ndarray, count: int) -> np.ndarray:
    """`count` uniform points of the box [lo, hi]."""
    return rng.uniform(lo, hi, size=(count, lo.size))


def ball_points(rng: np.random.Generator, center: np.ndarray, radius: float, count: int) -> np.ndarray:
    """`count` uniform points of the closed ball B(center, radius)."""
    dim = center.size
    directions = rng.standard_normal((count, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(size=(count, 1)) ** (1.0 / dim)
    return center + radii * directions


def quasi_uniform_directions(dim: int, m: int, seed: int = 0) -> np.ndarray:
    """
    Low-discrepancy unit directions

    Evenly spaced angles with a seeded offset in the plane; scrambled Sobol
    points mapped through the normal inverse CDF in higher dimensions.

    Args:
        dim: Ambient dimension
        m: Number of directions
        seed: Scrambling seed

    Returns:
        (m, dim) array of unit vectors
    """
    if dim == 1:
        return np.where(np.arange(m) % 2 == 0, 1.0, -1.0).reshape(-1, 1)
    if dim == 2:
        offset = stream(seed, SUPPORT_STREAM).uniform(0.0, 2.0 * np.pi / m)
        angles = offset + 2.0 * np.pi * np.arange(m) / m
        return np.column_stack([np.cos(angles), np.sin(angles)])
    # Sobol spawns child generators, which needs a seed sequence; hand it an integer
    sobol_seed = int(stream(seed, SUPPORT_STREAM).integers(1 << 63))
    sampler = qmc.Sobol(d=dim, scramble=True, seed=sobol_seed)
    with warnings.catch_warnings():
        # Sobol balance warning for counts that are not powers of two
        warnings.simplefilter("ignore", UserWarning)
        cube = sampler.random(m)
    gaussian = norm.ppf(np.clip(cube, 1e-12, 1.0 - 1e-12))
    lengths = np.linalg.norm(gaussian, axis=1, keepdims=True)
    lengths[lengths == 0.0] = 1.0
    return gaussian / lengths


def sum_counts(chunks: Sequence[np.ndarray]) -> np.ndarray:
    """Reduce per-chunk count arrays in chunk order."""
    total = np.zeros_like(chunks[0])
    for counts in chunks:
        total = total + counts
    return total
