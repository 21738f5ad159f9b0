"""Bit-string primitives shared by every module.

Bitstrings are plain Python ``str`` objects over the characters '0' and
'1'.  They are hashable, sliceable, and sort lexicographically within a
fixed length, which is exactly what exhaustive enumeration needs.
"""

from __future__ import annotations

import random
from typing import Iterator

Bits = str


def is_bits(s: object) -> bool:
    return isinstance(s, str) and all(c in "01" for c in s)


def check_bits(s: object, what: str = "bitstring") -> Bits:
    """Validate *s* as a bitstring and return it."""
    if not isinstance(s, str):
        raise TypeError(f"{what} must be a str of '0'/'1', got {type(s).__name__}")
    if not all(c in "01" for c in s):
        raise ValueError(f"{what} must contain only '0' and '1': {s!r}")
    return s


def all_strings(n: int) -> Iterator[Bits]:
    """All strings of length *n*, in lexicographic order."""
    if n < 0:
        raise ValueError("length must be >= 0")
    if n == 0:
        yield ""
        return
    for i in range(1 << n):
        yield format(i, f"0{n}b")


def bits_to_index(x: Bits) -> int:
    return int(x, 2) if x else 0


def index_to_bits(i: int, n: int) -> Bits:
    if n == 0:
        return ""
    return format(i, f"0{n}b")


def bin_numeral(k: int) -> Bits:
    """Standard binary numeral without leading zeros; defined for k >= 1."""
    if k < 1:
        raise ValueError(f"binary numeral needs k >= 1, got {k}")
    return format(k, "b")


def random_bits(n: int, rng: random.Random) -> Bits:
    if n == 0:
        return ""
    return format(rng.getrandbits(n), f"0{n}b")


def pack_bits(bits: Bits) -> bytes:
    """Pack MSB-first into bytes, zero-padded at the end."""
    out = bytearray((len(bits) + 7) // 8)
    for i, b in enumerate(bits):
        if b == "1":
            out[i >> 3] |= 0x80 >> (i & 7)
    return bytes(out)


def unpack_bits(data: bytes, nbits: int) -> Bits:
    if nbits > 8 * len(data):
        raise ValueError("not enough bytes for requested bit count")
    return "".join(
        "1" if data[i >> 3] & (0x80 >> (i & 7)) else "0" for i in range(nbits)
    )
