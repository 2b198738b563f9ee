"""Deterministic sharded random streams.

Every Monte Carlo loop in the package draws its normals shard by shard.
Shard ``i`` of a stream gets its own generator seeded from
``SeedSequence(seed, spawn_key=(*keys, i))``, so the numbers a shard sees
depend only on the master seed, the stream keys and the shard index.
Results are reduced in shard order, which makes the output bit-identical
for any worker count.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

SHARD_SIZE = 10_000

_workers = 1


def set_workers(n):
    """Set the default number of threads used for shard evaluation."""
    global _workers
    if n < 1:
        raise ValueError("workers must be >= 1")
    _workers = int(n)


def get_workers():
    return _workers


def _check_seed(seed):
    if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return int(seed)


def derive_seed(seed, *keys):
    """Child seed for a named sub-stream; stable across runs and platforms."""
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))


def shard_sizes(count, shard_size=SHARD_SIZE):
    full, rest = divmod(count, shard_size)
    return [shard_size] * full + ([rest] if rest else [])


def shard_rng(seed, index, *keys):
    ss = np.random.SeedSequence(_check_seed(seed), spawn_key=tuple(int(k) for k in keys) + (index,))
    return np.random.Generator(np.random.PCG64(ss))


def map_shards(fn, seed, count, *keys, workers=None):
    """Call ``fn(rng, n)`` once per shard and return the results in shard order."""
    if count < 1:
        raise ValueError("count must be >= 1")
    sizes = shard_sizes(count)
    jobs = [(shard_rng(seed, i, *keys), n) for i, n in enumerate(sizes)]
    workers = _workers if workers is None else workers
    if workers <= 1 or len(jobs) == 1:
        return [fn(rng, n) for rng, n in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))


def mean_stderr(values):
    """Sample mean and standard error of the mean (0 for a single value)."""
    values = np.asarray(values, dtype=float)
    m = values.size
    if m and np.all(values == values.flat[0]):
        return float(values.flat[0]), 0.0
    mean = float(np.mean(values))
    if m < 2:
        return mean, 0.0
    sd = float(np.std(values, ddof=1))
    return mean, float(sd / np.sqrt(m))
