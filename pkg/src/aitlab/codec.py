"""Self-delimiting encodings used by constructions and slack measurements.

The string code doubles every payload bit and terminates with "01"; the
pair code prefixes the doubled numeral of the second component's length.
Both are prefix-unambiguous.
"""

from __future__ import annotations

from .bits import Bits, bin_numeral, check_bits


class DecodeError(ValueError):
    """Input is not a well-formed encoding."""


def encode_self_delim(u: Bits) -> Bits:
    """Double every bit of u, then append the terminator "01"."""
    check_bits(u, "payload")
    return "".join(c + c for c in u) + "01"


def decode_self_delim(e: Bits) -> Bits:
    """Inverse of encode_self_delim; the input must be exactly one code word."""
    payload, rest = split_self_delim(e)
    if rest:
        raise DecodeError(f"trailing bits after terminator: {rest!r}")
    return payload


def split_self_delim(e: Bits) -> tuple[Bits, Bits]:
    """Read one doubled-bits code word from the front; return (payload, rest)."""
    check_bits(e, "encoded")
    out = []
    i = 0
    while True:
        pair = e[i : i + 2]
        if len(pair) < 2:
            raise DecodeError("input ends inside a bit pair")
        if pair == "01":
            return "".join(out), e[i + 2 :]
        if pair == "00":
            out.append("0")
        elif pair == "11":
            out.append("1")
        else:  # "10" cannot occur in a well-formed code word
            raise DecodeError(f"invalid bit pair {pair!r} at offset {i}")
        i += 2


def encode_pair(x1: Bits, x2: Bits) -> Bits:
    """Encode (x1, x2) as doubled(bin(|x2|)) + "01" + x1 + x2.

    The second component must be nonempty: a zero length has no
    leading-zero-free numeral, so it is rejected rather than special-cased.
    """
    check_bits(x1, "x1")
    check_bits(x2, "x2")
    if len(x2) == 0:
        raise ValueError("second component must be nonempty")
    return encode_self_delim(bin_numeral(len(x2))) + x1 + x2


def decode_pair(e: Bits) -> tuple[Bits, Bits]:
    """Inverse of encode_pair; e must be exactly one pair encoding."""
    numeral, rest = split_self_delim(e)
    if not numeral:
        raise DecodeError("missing length numeral for second component")
    if numeral[0] != "1":
        raise DecodeError(f"length numeral has a leading zero: {numeral!r}")
    n2 = int(numeral, 2)
    if n2 > len(rest):
        raise DecodeError("second component extends past the end of input")
    return rest[: len(rest) - n2], rest[len(rest) - n2 :]


def pair_code_length(len1: int, len2: int) -> int:
    """Exact length of encode_pair output for component lengths (len1, len2)."""
    if len2 < 1:
        raise ValueError("second component must be nonempty")
    return len1 + len2 + 2 * len(bin_numeral(len2)) + 2
