"""Deterministic per-trial random streams and a trial-parallel map."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    """Independent stream keyed by ``(seed, trial)``; never by execution order."""
    return np.random.SeedSequence(int(seed), spawn_key=(int(trial),))


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(trial_seed(seed, trial)))


def default_jobs() -> int:
    return os.cpu_count() or 1


def map_trials(fn, args: list, jobs: int | None = None) -> list:
    """``[fn(a) for a in args]``, optionally across processes; output order follows ``args``."""
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1 or len(args) <= 1:
        return [fn(a) for a in args]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, args))
