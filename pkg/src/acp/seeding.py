"""Deterministic per-trial seed derivation and optional trial parallelism.

Every experiment in this package derives its per-trial randomness from
``subseed(master_seed, *key)``, a pure function of the master seed and the
trial's index path. Results are therefore independent of execution order:
running trials serially, in a different order, or across worker processes
produces identical aggregates.
"""

from __future__ import annotations

import multiprocessing
from typing import Callable, TypeVar

import numpy as np

T = TypeVar("T")


def subseed(master_seed: int, *key: int) -> np.random.SeedSequence:
    """SeedSequence(entropy=master_seed, spawn_key=key). Pure and collision-safe."""
    if master_seed < 0:
        raise ValueError("master_seed must be non-negative")
    return np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in key))


def rng_for(master_seed: int, *key: int) -> np.random.Generator:
    """Fresh generator for one trial, derived from (master_seed, key)."""
    return np.random.default_rng(subseed(master_seed, *key))


def map_indexed(fn: Callable[[int], T], n_items: int, workers: int = 1) -> list[T]:
    """[fn(0), ..., fn(n_items-1)], optionally computed by worker processes.

    ``fn`` must be picklable (module-level function or functools.partial of
    one) when workers > 1. Output order is always index order, so the result
    does not depend on scheduling.
    """
    if workers <= 1 or n_items <= 1:
        return [fn(i) for i in range(n_items)]
    ctx = multiprocessing.get_context()
    chunk = max(1, n_items // (workers * 8))
    with ctx.Pool(processes=workers) as pool:
        return pool.map(fn, range(n_items), chunksize=chunk)
