"""Deterministic 64-bit random stream (splitmix64).

The simulation kernel needs a generator that (a) is cheap enough to inline
into a jitted loop, (b) produces bit-identical streams in pure Python and
in compiled code, and (c) supports stateless splitting so run i of an
experiment gets its own stream derived from (base_seed, i) alone.
splitmix64 gives all three in a dozen lines.  Instance *generation* uses
numpy's Generator instead; only trajectory sampling goes through here.
"""

from __future__ import annotations

__all__ = ["SplitMix64", "mix64", "split_seed"]

_MASK = 0xFFFFFFFFFFFFFFFF
_GAMMA = 0x9E3779B97F4A7C15
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def mix64(x: int) -> int:
    """splitmix64 finalizer: a bijective avalanche mix of a 64-bit word."""
    x &= _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def split_seed(base_seed: int, index: int) -> int:
    """Derive the seed of substream `index` from `base_seed`.

    Stateless: depends only on the pair, so run order and parallel
    scheduling cannot change which stream a run index receives.
    """
    return mix64((mix64(base_seed) ^ mix64((index * _GAMMA + 0x243F6A8885A308D3) & _MASK)) & _MASK)


class SplitMix64:
    """Sequential splitmix64 stream over a 64-bit state."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + _GAMMA) & _MASK
        return mix64(self.state)

    def uniform(self) -> float:
        """One double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * _INV_2_53
