"""RFC 1321 MD5 and the hex plumbing around it.

Every fingerprint in the system is a 128-bit MD5 digest: certificate
documents, transaction ids, transaction roots, and block hashes all go
through the same primitive. The canonical text form of a digest is 32
lowercase hex characters, and digests are compared as strings everywhere
(wire, storage, UI).

MD5 is cryptographically broken; this codebase keeps it anyway because the
ledger is a desk-scale simulation and a single fixed primitive keeps every
component bit-for-bit comparable. See the README for the caveat.
"""

from __future__ import annotations

import struct

# A digest in canonical text form: exactly 32 chars drawn from [0-9a-f].
Digest128 = str

DIGEST_HEX_LEN = 32
ZERO_DIGEST = "0" * DIGEST_HEX_LEN

_MASK = 0xFFFFFFFF
_INIT = (0x67452301, 0xEFCDAB89, 0x98BADCFE, 0x10325476)

# Sine-derived round constants, T[i] = floor(2^32 * abs(sin(i + 1))).
_K = (
    0xD76AA478, 0xE8C7B756, 0x242070DB, 0xC1BDCEEE,
    0xF57C0FAF, 0x4787C62A, 0xA8304613, 0xFD469501,
    0x698098D8, 0x8B44F7AF, 0xFFFF5BB1, 0x895CD7BE,
    0x6B901122, 0xFD987193, 0xA679438E, 0x49B40821,
    0xF61E2562, 0xC040B340, 0x265E5A51, 0xE9B6C7AA,
    0xD62F105D, 0x02441453, 0xD8A1E681, 0xE7D3FBC8,
    0x21E1CDE6, 0xC33707D6, 0xF4D50D87, 0x455A14ED,
    0xA9E3E905, 0xFCEFA3F8, 0x676F02D9, 0x8D2A4C8A,
    0xFFFA3942, 0x8771F681, 0x6D9D6122, 0xFDE5380C,
    0xA4BEEA44, 0x4BDECFA9, 0xF6BB4B60, 0xBEBFBC70,
    0x289B7EC6, 0xEAA127FA, 0xD4EF3085, 0x04881D05,
    0xD9D4D039, 0xE6DB99E5, 0x1FA27CF8, 0xC4AC5665,
    0xF4292244, 0x432AFF97, 0xAB9423A7, 0xFC93A039,
    0x655B59C3, 0x8F0CCC92, 0xFFEFF47D, 0x85845DD1,
    0x6FA87E4F, 0xFE2CE6E0, 0xA3014314, 0x4E0811A1,
    0xF7537E82, 0xBD3AF235, 0x2AD7D2BB, 0xEB86D391,
)

_S = (7, 12, 17, 22) * 4 + (5, 9, 14, 20) * 4 + (4, 11, 16, 23) * 4 + (6, 10, 15, 21) * 4

_UNPACK16 = struct.Struct("<16I").unpack
_PACK4 = struct.Struct("<4I").pack
_PACK_LEN = struct.Struct("<Q").pack


def _message_index(step: int) -> int:
    if step < 16:
        return step
    if step < 32:
        return (5 * step + 1) % 16
    if step < 48:
        return (3 * step + 5) % 16
    return (7 * step) % 16


def _build_compress():
    # Proof-of-work mining hammers this function (thousands of calls per
    # block), and the generated straight-line form runs ~1.7x faster on
    # CPython than the equivalent table-driven loop.
    lines = [
        "def _compress(state, block):",
        "    a0, b0, c0, d0 = state",
        "    m = _unpack(block)",
        "    a, b, c, d = a0, b0, c0, d0",
    ]
    regs = ("a", "b", "c", "d")
    for i in range(64):
        a, b, c, d = (regs[(j - i) % 4] for j in range(4))
        if i < 16:
            f = f"({d} ^ ({b} & ({c} ^ {d})))"
        elif i < 32:
            f = f"({c} ^ ({d} & ({b} ^ {c})))"
        elif i < 48:
            f = f"({b} ^ {c} ^ {d})"
        else:
            f = f"({c} ^ ({b} | (~{d} & 0xFFFFFFFF)))"
        s = _S[i]
        lines.append(f"    t = ({a} + {f} + {_K[i]} + m[{_message_index(i)}]) & 0xFFFFFFFF")
        lines.append(f"    {a} = ({b} + (((t << {s}) | (t >> {32 - s})) & 0xFFFFFFFF)) & 0xFFFFFFFF")
    lines.append(
        "    return ((a0 + a) & 0xFFFFFFFF, (b0 + b) & 0xFFFFFFFF,"
        " (c0 + c) & 0xFFFFFFFF, (d0 + d) & 0xFFFFFFFF)"
    )
    namespace = {"_unpack": _UNPACK16}
    exec("\n".join(lines), namespace)
    return namespace["_compress"]


_compress = _build_compress()


class Md5:
    """Incremental MD5, hashlib-flavoured: update / digest / hexdigest / copy.

    copy() is cheap, which is what the miner leans on: hash the constant
    header prefix once, then fork the state per candidate nonce.
    """

    def __init__(self, data: bytes = b""):
        self._state = _INIT
        self._tail = b""
        self._length = 0
        if data:
            self.update(data)

    def update(self, data: bytes) -> None:
        self._length += len(data)
        buf = self._tail + data
        whole = len(buf) - (len(buf) % 64)
        if whole:
            state = self._state
            compress = _compress
            for offset in range(0, whole, 64):
                state = compress(state, buf[offset:offset + 64])
            self._state = state
        self._tail = buf[whole:]

    def copy(self) -> "Md5":
        clone = Md5.__new__(Md5)
        clone._state = self._state
        clone._tail = self._tail
        clone._length = self._length
        return clone

    def digest(self) -> bytes:
        padding = b"\x80" + b"\x00" * ((55 - self._length) % 64)
        buf = self._tail + padding + _PACK_LEN((self._length * 8) & 0xFFFFFFFFFFFFFFFF)
        state = self._state
        for offset in range(0, len(buf), 64):
            state = _compress(state, buf[offset:offset + 64])
        return _PACK4(*state)

    def hexdigest(self) -> str:
        return self.digest().hex()


def md5_bytes(message: bytes) -> bytes:
    """16-octet MD5 digest of an arbitrary byte sequence."""
    return Md5(message).digest()


def md5_digest(message: bytes) -> Digest128:
    """Canonical fingerprint: MD5 of the message as 32 lowercase hex chars."""
    return Md5(message).digest().hex()


def hex_encode(data: bytes) -> str:
    """Lowercase hex of an octet sequence; the single text encoding used on the wire."""
    return data.hex()


def hex_decode(text: str) -> bytes:
    """Inverse of hex_encode. Accepts upper or lower case; rejects anything else."""
    if len(text) % 2 != 0:
        raise ValueError(f"hex text has odd length {len(text)}")
    for ch in text:
        if ch not in "0123456789abcdefABCDEF":
            raise ValueError(f"invalid hex character {ch!r}")
    return bytes.fromhex(text)


def is_digest_hex(text: str) -> bool:
    """True iff text is a canonical digest: 32 chars of [0-9a-f]."""
    if not isinstance(text, str) or len(text) != DIGEST_HEX_LEN:
        return False
    return all(ch in "0123456789abcdef" for ch in text)
