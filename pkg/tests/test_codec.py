import pytest

from aitlab.bits import all_strings
from aitlab.codec import (
    DecodeError,
    decode_pair,
    decode_self_delim,
    encode_pair,
    encode_self_delim,
    pair_code_length,
    split_self_delim,
)


def test_self_delim_examples():
    assert encode_self_delim("101") == "11001101"
    assert encode_self_delim("") == "01"


def test_self_delim_roundtrip_exhaustive():
    for length in range(13):
        for u in all_strings(length):
            e = encode_self_delim(u)
            assert len(e) == 2 * len(u) + 2
            assert decode_self_delim(e) == u


def test_self_delim_prefix_property():
    codes = [encode_self_delim(u) for n in range(8) for u in all_strings(n)]
    for i, a in enumerate(codes):
        for j, b in enumerate(codes):
            if i != j:
                assert not b.startswith(a)


def test_pair_example():
    assert encode_pair("0110", "10") == "110001011010"
    assert len(encode_pair("0110", "10")) == 12 == pair_code_length(4, 2)
    assert decode_pair("110001011010") == ("0110", "10")


def test_pair_roundtrip_exhaustive():
    for l1 in range(7):
        for l2 in range(1, 7):
            for x1 in all_strings(l1):
                for x2 in all_strings(l2):
                    e = encode_pair(x1, x2)
                    assert len(e) == pair_code_length(l1, l2)
                    assert decode_pair(e) == (x1, x2)


def test_pair_rejects_empty_second_component():
    with pytest.raises(ValueError):
        encode_pair("0110", "")


@pytest.mark.parametrize(
    "bad",
    [
        "01",  # no length numeral at all
        "",  # empty
        "10",  # illegal bit pair
        "1100",  # numeral but no terminator
        "110001",  # says |x2| = 2, but nothing follows
        "001101",  # numeral with a leading zero
    ],
)
def test_pair_malformed(bad):
    with pytest.raises(DecodeError):
        decode_pair(bad)


def test_self_delim_malformed():
    with pytest.raises(DecodeError):
        decode_self_delim("10")
    with pytest.raises(DecodeError):
        decode_self_delim("11")
    with pytest.raises(DecodeError):
        decode_self_delim("0101")  # trailing bits


def test_split_returns_remainder():
    payload, rest = split_self_delim(encode_self_delim("110") + "0011")
    assert payload == "110"
    assert rest == "0011"
