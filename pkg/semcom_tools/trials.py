#!/usr/bin/env python
import logging
from concurrent.futures import ProcessPoolExecutor

import numpy as np

import semcom_tools.exceptions

log = logging.getLogger(__name__)


def trial_chunks(n_trials, chunk_size):
    """Contiguous [start, stop) ranges covering 0..n_trials-1"""
    if n_trials < 1:
        raise semcom_tools.exceptions.DomainError(
            f"n_trials must be at least 1, got {n_trials}"
        )
    if chunk_size < 1:
        raise semcom_tools.exceptions.DomainError(
            f"chunk_size must be at least 1, got {chunk_size}"
        )
    return [
        (start, min(start + chunk_size, n_trials))
        for start in range(0, n_trials, chunk_size)
    ]


def _call_chunk(func, bounds):
    return func(*bounds)


def map_trial_chunks(func, n_trials, workers=1, chunk_size=65536):
    """Evaluate func(start, stop) over every chunk of the trial range and
    concatenate the per-chunk arrays along the first axis in trial order.

    func must be picklable when workers > 1 (a module level function or a
    functools.partial of one). The result does not depend on workers or
    chunk_size because every trial draws its randomness from its own index.
    """
    chunks = trial_chunks(n_trials, chunk_size)
    if workers is None or workers <= 1 or len(chunks) == 1:
        results = [func(start, stop) for start, stop in chunks]
    else:
        log.debug("Running %s chunks on %s workers", len(chunks), workers)
        with ProcessPoolExecutor(max_workers=workers) as executor:
            # map keeps submission order, so aggregation stays by trial index
            results = list(
                executor.map(_call_chunk, [func] * len(chunks), chunks)
            )
    return np.concatenate(results, axis=0)
