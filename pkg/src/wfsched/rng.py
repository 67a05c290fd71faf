"""Seeded SplitMix64 generator used by every stochastic component.

SplitMix64 (Steele, Lea & Flood) is tiny, has no hidden state beyond one
64-bit word and is trivial to port, so runs reproduce bit-for-bit in any
language.  The first ten outputs for seed 42 are::

    13679457532755275413  2949826092126892291  5139283748462763858
    6349198060258255764   701532786141963250   16015981125662989062
    4028864712777624925   14769051326987775908 6270620877612482005
    11408980392250668974

Derived quantities:

* ``random()``      -> ``(next_u64() >> 11) * 2**-53``, a float in [0, 1).
* ``randbelow(n)``  -> rejection sampling on ``next_u64()`` against the largest
  multiple of ``n`` below 2**64, then ``% n``.  Unbiased.
* ``split()``       -> a child generator seeded with the parent's next output.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import TypeVar

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
_TWO_NEG_53 = 2.0**-53

T = TypeVar("T")


class SplitMix64:
    __slots__ = ("_state",)

    def __init__(self, seed: int) -> None:
        if seed < 0:
            raise ValueError("seed must be a non-negative integer")
        self._state = seed & _MASK

    def next_u64(self) -> int:
        self._state = (self._state + _GOLDEN) & _MASK
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * _TWO_NEG_53

    def uniform(self, low: float, high: float) -> float:
        return low + (high - low) * self.random()

    def randbelow(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        limit = (1 << 64) - ((1 << 64) % n)
        while True:
            x = self.next_u64()
            if x < limit:
                return x % n

    def choice(self, items: Sequence[T]) -> T:
        return items[self.randbelow(len(items))]

    def split(self) -> SplitMix64:
        return SplitMix64(self.next_u64())
