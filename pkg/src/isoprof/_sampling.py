"""Reproducible sample streams split into fixed-size, independently seeded chunks.

Chunk ``k`` of stream ``s`` under seed ``S`` is drawn from
``SeedSequence([S, s, k])``, so a stream of any length is the same for every
worker count.  Chunks are generated in a thread pool whose size is capped by
the ``ISOPROF_THREADS`` environment variable.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from functools import lru_cache

import numpy as np

CHUNK = 4096
BALL_STREAM = 0
SPHERE_STREAM = 1
UNIFORM_STREAM = 2


def worker_count() -> int:
    raw = os.environ.get("ISOPROF_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return max(1, min(8, os.cpu_count() or 1))


def _check_seed(seed):
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be a non-negative integer")
    return seed


def _chunk(stream, dim, seed, k):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream, k])))
    g = rng.standard_normal((CHUNK, dim))
    g /= np.linalg.norm(g, axis=1)[:, None]
    if stream == BALL_STREAM:
        g *= rng.random(CHUNK)[:, None] ** (1.0 / dim)
    elif stream == UNIFORM_STREAM:
        g = rng.random((CHUNK, dim))
    return g


@lru_cache(maxsize=16)
def _stream(stream, dim, n, seed):
    chunks = -(-n // CHUNK)
    workers = min(worker_count(), chunks)
    if workers <= 1:
        parts = [_chunk(stream, dim, seed, k) for k in range(chunks)]
    else:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda k: _chunk(stream, dim, seed, k), range(chunks)))
    out = np.concatenate(parts)[:n]
    out.setflags(write=False)
    return out


def ball_samples(dim: int, n: int, seed: int) -> np.ndarray:
    """``n`` uniform points in the unit ball of ``R^dim`` (read-only array)."""
    return _stream(BALL_STREAM, int(dim), int(n), _check_seed(seed))


def sphere_samples(dim: int, n: int, seed: int) -> np.ndarray:
    """``n`` uniform points on the unit sphere of ``R^dim`` (read-only array)."""
    return _stream(SPHERE_STREAM, int(dim), int(n), _check_seed(seed))


def cube_samples(dim: int, n: int, seed: int) -> np.ndarray:
    """``n`` uniform points in ``[0, 1)^dim`` (read-only array)."""
    return _stream(UNIFORM_STREAM, int(dim), int(n), _check_seed(seed))


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator keyed by ``(seed, *keys)`` for auxiliary draws."""
    return np.random.default_rng(np.random.SeedSequence([_check_seed(seed), 99, *keys]))


def parallel_map(fn, items):
    """Order-preserving map over a thread pool; results never depend on the pool size."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))
