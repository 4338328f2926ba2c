"""
Configuration helpers for bigcpm
Environment defaults and seeded random streams
"""
import logging
import os
from typing import Dict

import numpy as np

logger = logging.getLogger(__name__)

WORKERS_ENV = "BIGCPM_WORKERS"
STREAM_NAMES = ("partition", "binning", "simulate", "bench", "truth")


def default_workers() -> int:
    """Worker count for subset fits, from BIGCPM_WORKERS (fallback 1)"""
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return 1
    try:
        workers = int(raw)
    except ValueError:
        logger.warning("Ignoring %s=%r: not an integer", WORKERS_ENV, raw)
        return 1
    return max(1, workers)


def random_streams(seed: int) -> Dict[str, np.random.Generator]:
    """Independent generators derived from one master seed"""
    children = np.random.SeedSequence(seed).spawn(len(STREAM_NAMES))
    return {name: np.random.default_rng(child) for name, child in zip(STREAM_NAMES, children)}


def as_generator(rng) -> np.random.Generator:
    """Accept a Generator, an integer seed or None"""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)
