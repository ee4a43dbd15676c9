"""Deterministic worker-pool map over replicates.

Results come back in input order, so output never depends on the worker
count; ``threads <= 1`` runs in-process.
"""

from concurrent.futures import ProcessPoolExecutor


def parallel_map(fn, items, threads: int = 1) -> list:
    items = list(items)
    if threads is None or threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    chunk = max(1, len(items) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=chunk))
