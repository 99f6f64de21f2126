"""Deterministic RNG substreams.

All randomness in a run flows from one master seed. Every consumer derives
its own generator from (master seed, tag path), so enabling or disabling a
feature never shifts the draws of another feature, and populations are
reproducible regardless of generation order or worker count.
"""

from __future__ import annotations

import hashlib

import numpy as np


def substream(master_seed: int, *tags) -> np.random.Generator:
    """Derive an independent generator from the master seed and a tag path.

    Tags may be ints or short strings (e.g. link index, cluster id, ray
    index, purpose). The mapping is stable across platforms and sessions:
    sha256 over the canonical repr of the tag tuple.
    """
    key = repr((int(master_seed),) + tuple(tags)).encode()
    digest = hashlib.sha256(key).digest()
    return np.random.default_rng(int.from_bytes(digest[:16], "little"))
