import hashlib

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from achievechain.crypto import (
    DIGEST_HEX_LEN,
    Md5,
    ZERO_DIGEST,
    hex_decode,
    hex_encode,
    is_digest_hex,
    md5_bytes,
    md5_digest,
)

# RFC 1321 appendix A.5 test suite, frozen verbatim.
RFC_VECTORS = [
    (b"", "d41d8cd98f00b204e9800998ecf8427e"),
    (b"a", "0cc175b9c0f1b6a831c399e269772661"),
    (b"abc", "900150983cd24fb0d6963f7d28e17f72"),
    (b"message digest", "f96b697d7cb7938d525a2f31aaf161d0"),
    (b"abcdefghijklmnopqrstuvwxyz", "c3fcd3d76192e4007dfb496cca67e13b"),
    (
        b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789",
        "d174ab98d277d9f5a5611c2c9f419d9f",
    ),
    (
        b"1234567890123456789012345678901234567890"
        b"1234567890123456789012345678901234567890",
        "57edf4a22be3c955ac49da2e2107b67a",
    ),
]


def oracle(message: bytes) -> str:
    return hashlib.md5(message).hexdigest()


@pytest.mark.parametrize("message,expected", RFC_VECTORS)
def test_rfc_1321_vectors(message, expected):
    assert md5_digest(message) == expected
    # The frozen vector and the reference oracle must agree with each other too.
    assert oracle(message) == expected


@given(st.binary(max_size=4096))
def test_matches_reference_oracle(message):
    assert md5_digest(message) == oracle(message)


@given(st.integers(min_value=0, max_value=3), st.binary(min_size=0, max_size=300))
def test_padding_boundaries_match_oracle(block_count, tail):
    # Exercise lengths straddling the 55/56/64-byte padding edges.
    message = b"\xa5" * (block_count * 64) + tail
    assert md5_digest(message) == oracle(message)


def test_large_input_matches_oracle():
    message = bytes(i % 251 for i in range(1 << 20))  # 1 MiB
    assert md5_digest(message) == oracle(message)


def test_digest_is_128_bits():
    for message, _ in RFC_VECTORS:
        assert len(md5_bytes(message)) == 16
        text = md5_digest(message)
        assert len(text) == DIGEST_HEX_LEN
        assert is_digest_hex(text)


def test_deterministic_across_calls():
    message = b"the same message"
    assert md5_digest(message) == md5_digest(message)


def test_one_bit_flip_changes_digest():
    import random

    rng = random.Random(1321)
    for _ in range(200):
        message = bytearray(rng.randbytes(rng.randrange(1, 128)))
        original = md5_digest(bytes(message))
        pos = rng.randrange(len(message))
        message[pos] ^= 1 << rng.randrange(8)
        assert md5_digest(bytes(message)) != original


@given(st.lists(st.binary(max_size=200), max_size=8))
@settings(max_examples=50)
def test_streaming_equals_one_shot(chunks):
    hasher = Md5()
    for chunk in chunks:
        hasher.update(chunk)
    assert hasher.hexdigest() == md5_digest(b"".join(chunks))


def test_copy_forks_the_state():
    base = Md5(b"prefix-prefix-prefix-prefix-prefix-prefix-prefix-prefix-prefix-")
    fork_a = base.copy()
    fork_a.update(b"1")
    fork_b = base.copy()
    fork_b.update(b"2")
    assert fork_a.hexdigest() == oracle(
        b"prefix-prefix-prefix-prefix-prefix-prefix-prefix-prefix-prefix-1"
    )
    assert fork_b.hexdigest() == oracle(
        b"prefix-prefix-prefix-prefix-prefix-prefix-prefix-prefix-prefix-2"
    )


def test_hex_encode_basics():
    assert hex_encode(b"") == ""
    assert hex_encode(bytes([0x00, 0xFF])) == "00ff"


def test_hex_decode_basics():
    assert hex_decode("") == b""
    assert hex_decode("00ff") == bytes([0x00, 0xFF])
    assert hex_decode("00FF") == bytes([0x00, 0xFF])


@pytest.mark.parametrize("bad", ["0", "abc", "zz", "0 0a", "0x41", "a\n"])
def test_hex_decode_rejects_malformed(bad):
    with pytest.raises(ValueError):
        hex_decode(bad)


@given(st.binary(max_size=256))
def test_hex_round_trip(data):
    assert hex_decode(hex_encode(data)) == data


def test_is_digest_hex():
    assert is_digest_hex(ZERO_DIGEST)
    assert is_digest_hex(md5_digest(b"x"))
    assert not is_digest_hex(ZERO_DIGEST[:-1])
    assert not is_digest_hex(ZERO_DIGEST + "0")
    assert not is_digest_hex("G" * 32)
    assert not is_digest_hex("0" * 31 + "A")  # uppercase is not canonical
