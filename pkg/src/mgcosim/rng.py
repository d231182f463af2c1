"""Seed-derivation helpers.

One master seed drives a whole run.  Every stochastic consumer (each
communication link, each sweep grid point) derives its own substream from
the master seed plus a stable string key, so adding or removing one
consumer never perturbs the draws of another.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _key_words(key: str) -> list[int]:
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return [int.from_bytes(digest[i : i + 4], "little") for i in range(0, 32, 4)]


def substream(master_seed: int, key: str) -> np.random.Generator:
    """Independent generator for ``key``, reproducible from the master seed."""
    entropy = [master_seed & _MASK64] + _key_words(key)
    return np.random.default_rng(np.random.SeedSequence(entropy))


def subseed(master_seed: int, key: str) -> int:
    """Derived 63-bit integer seed, for handing to a child run."""
    payload = f"{master_seed & _MASK64}:{key}".encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "little") >> 1
