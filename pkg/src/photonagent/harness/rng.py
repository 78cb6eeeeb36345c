"""Deterministic substream derivation on top of a counter-based generator.

Every consumer of randomness receives its own Philox stream whose key
is a splitmix64 hash of (seed, context tag, iteration, probe index).
Identical keys give identical streams on any platform; distinct keys
give statistically independent ones, so parallel or reordered execution
cannot change results.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import ValidationError

__all__ = ["RngStreamKey", "stream_from_key", "derive_stream"]

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + _GOLDEN) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return state, z ^ (z >> 31)


def _mix(*words: int) -> tuple[int, int]:
    state = 0
    out = 0
    for w in words:
        state = (state ^ (w & _MASK64)) & _MASK64
        state, out = _splitmix64(state)
    state, second = _splitmix64(state)
    return out, second


@lru_cache(maxsize=256)
def _context_word(context: str) -> int:
    digest = hashlib.sha256(context.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class RngStreamKey:
    """Derivation key (seed, context tag, iteration, probe index)."""

    seed: int
    context: str
    iteration: int = 0
    probe: int = 0

    def __post_init__(self) -> None:
        if not (0 <= self.seed < 1 << 64):
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.iteration < 0 or self.probe < 0:
            raise ValidationError("iteration and probe indices must be >= 0")


def stream_from_key(key: RngStreamKey) -> np.random.Generator:
    """Independent Philox generator for the given key."""
    k0, k1 = _mix(key.seed, _context_word(key.context), key.iteration, key.probe)
    return np.random.Generator(np.random.Philox(key=np.array([k0, k1], dtype=np.uint64)))


def derive_stream(seed: int, context: str, iteration: int = 0,
                  probe: int = 0) -> np.random.Generator:
    return stream_from_key(RngStreamKey(seed, context, iteration, probe))
