"""Deterministic seed derivation for all stochastic components.

Every random draw in the package is keyed by a stable 64-bit hash of
(master seed, stream label, sample index).  This makes results bit-identical
across runs, platforms, and worker scheduling orders.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master_seed: int, label: str, index: int = 0) -> int:
    """Stable 64-bit seed from (master, label, index) via blake2b."""
    payload = f"{int(master_seed)}|{label}|{int(index)}".encode("utf-8")
    digest = hashlib.blake2b(payload, digest_size=8).digest()
    return int.from_bytes(digest, "big")


def rng_for(master_seed: int, label: str, index: int = 0) -> np.random.Generator:
    """PCG64 generator keyed by the derived seed."""
    return np.random.default_rng(derive_seed(master_seed, label, index))


def uniform_from_hash(master_seed: int, label: str, index: int = 0) -> float:
    """A single uniform(0,1) deterministically tied to the key, RNG-free.

    Used where a value must be stable under relabeling (e.g. cluster colors
    keyed by the cluster's minimal vertex id).
    """
    return derive_seed(master_seed, label, index) / 2.0 ** 64
