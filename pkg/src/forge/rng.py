"""Deterministic seed derivation.

Every random decision in the package flows from a 64-bit master seed through
named substreams, so independent components (surface generation, each GP
patch, exploration noise, score noise) never share or race a generator.
Derivation uses SHA-256 over the parent seed and the label path, which is
stable across platforms and process counts.
"""

from __future__ import annotations

import hashlib

import numpy as np

_MASK = (1 << 64) - 1


def derive_seed(seed: int, *labels: object) -> int:
    """Derive a child seed from ``seed`` and a label path.

    Labels may be strings or integers; the same path always yields the same
    child.  Distinct paths are independent for all practical purposes.
    """
    h = hashlib.sha256()
    h.update(int(seed & _MASK).to_bytes(8, "little"))
    for label in labels:
        h.update(b"/")
        h.update(str(label).encode("utf-8"))
    return int.from_bytes(h.digest()[:8], "little")


def generator(seed: int, *labels: object) -> np.random.Generator:
    """A PCG64 generator on the substream named by ``labels``."""
    return np.random.Generator(np.random.PCG64(derive_seed(seed, *labels)))
