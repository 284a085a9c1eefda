"""Counter-based random streams and blocked replication.

Every stream is a Philox generator keyed by ``(seed, tag, block)``.
Replications are grouped into fixed-size blocks, so the draws behind
replication ``i`` never depend on how many workers share the job.
"""

from __future__ import annotations

import zlib
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

REP_BLOCK = 2048

T = TypeVar("T")


def _tag_key(tag: str) -> int:
    return zlib.crc32(tag.encode("utf-8"))


def stream(seed: int, tag: str, *counters: int) -> np.random.Generator:
    """Independent generator for ``(seed, tag, *counters)``."""
    if seed < 0:
        raise ValueError(f"seed must be nonnegative, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=(_tag_key(tag), *map(int, counters)))
    return np.random.Generator(np.random.Philox(ss))


def block_sizes(reps: int, block: int = REP_BLOCK) -> list[int]:
    full, rest = divmod(int(reps), block)
    return [block] * full + ([rest] if rest else [])


def run_blocks(
    fn: Callable[[np.random.Generator, int, int], T],
    reps: int,
    seed: int,
    tag: str,
    workers: int = 1,
) -> list[T]:
    """Apply ``fn(rng, size, offset)`` to every replication block, in block order.

    ``offset`` is the global index of the block's first replication.
    """
    sizes = block_sizes(reps)
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int) if sizes else []
    jobs = [(stream(seed, tag, b), s, int(o)) for b, (s, o) in enumerate(zip(sizes, offsets))]
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def concat(parts: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate(list(parts), axis=0)
