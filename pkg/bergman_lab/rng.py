"""Counter-based random streams.

Every configuration draws from its own Philox stream keyed by (seed, stream),
so a sample depends only on its seed and parameters, never on how many other
samples were drawn before it or on which thread drew it.
"""

import math
from typing import List

import numpy as np

from .errors import ArgumentError

_MASK64 = (1 << 64) - 1


def stream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Generator for the (seed, stream_id) stream"""
    key = (int(seed) & _MASK64) | ((int(stream_id) & _MASK64) << 64)
    return np.random.Generator(np.random.Philox(key=key))


def complex_normal(rng: np.random.Generator, size) -> np.ndarray:
    """Standard complex Gaussians: E|ξ|² = 1"""
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return (re + 1j * im) / math.sqrt(2.0)


def parse_seed_range(text: str) -> List[int]:
    """Parse 'a..b' (inclusive) or a single integer"""
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            lo, hi = int(lo), int(hi)
            if hi < lo:
                raise ArgumentError(f"empty seed range {text!r}")
            return list(range(lo, hi + 1))
        return [int(text)]
    except ValueError as e:
        raise ArgumentError(f"bad seed range {text!r}, expected 'a..b'") from e
