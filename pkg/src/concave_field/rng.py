"""Reproducible per-replica random streams.

Every replica gets its own Philox (counter-based) generator keyed by
``(seed, replica)``, so results do not depend on scheduling or thread count.
"""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

THREADS_ENV = "CONCAVE_FIELD_THREADS"


def replica_rng(seed, replica=0):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(replica)])))


def thread_cap():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def map_replicas(fn, replicas, seed, offset=0):
    """``[fn(replica_rng(seed, offset + r)) for r in range(replicas)]`` as an array.

    Runs on up to ``$CONCAVE_FIELD_THREADS`` threads; output order is by replica.
    """
    streams = (replica_rng(seed, offset + r) for r in range(replicas))
    workers = thread_cap()
    if workers == 1:
        return np.asarray([fn(g) for g in streams])
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.asarray(list(pool.map(fn, streams)))
