"""Small portable PRNG (mulberry32) used wherever a seed must replay
identically outside this package (e.g. consumers re-deriving MLM masks
from a stored seed). All arithmetic is explicit 32-bit so any language
reproduces the stream bit-for-bit."""

from __future__ import annotations

_M32 = 0xFFFFFFFF


class Mulberry32:
    def __init__(self, seed: int):
        self.state = seed & _M32

    def next_u32(self) -> int:
        self.state = (self.state + 0x6D2B79F5) & _M32
        t = self.state
        t = ((t ^ (t >> 15)) * (t | 1)) & _M32
        t = (t ^ (t + (((t ^ (t >> 7)) * (t | 61)) & _M32))) & _M32
        return (t ^ (t >> 14)) & _M32

    def next_below(self, n: int) -> int:
        if n <= 0:
            raise ValueError("n must be positive")
        return self.next_u32() % n

    def shuffle(self, items: list) -> None:
        for i in range(len(items) - 1, 0, -1):
            j = self.next_below(i + 1)
            items[i], items[j] = items[j], items[i]


def sample_positions(n: int, k: int, seed: int) -> list[int]:
    """Deterministically pick k of the positions 0..n-1 (sorted). Partial
    Fisher-Yates over the index array."""
    if k > n:
        raise ValueError("cannot sample more positions than exist")
    rng = Mulberry32(seed)
    idx = list(range(n))
    for i in range(k):
        j = i + rng.next_below(n - i)
        idx[i], idx[j] = idx[j], idx[i]
    return sorted(idx[:k])


def derive_seed(*parts) -> int:
    """Stable 32-bit seed from a tuple of ints/strings (no PYTHONHASHSEED
    dependence)."""
    import zlib

    text = "\x1f".join(str(p) for p in parts)
    return zlib.crc32(text.encode("utf-8")) & _M32
