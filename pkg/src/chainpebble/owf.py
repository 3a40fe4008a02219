"""Pluggable length-preserving one-way functions.

Every chain element is a fixed-width byte string, and every one-way function
maps such strings to strings of the same width.  Three built-ins are
registered:

- ``md5``: the 16-byte MD5 digest of a 16-byte input, the classic demo choice
  (no practical attacks on its one-wayness are known);
- ``davies-meyer-aes128``: f(x) = AES-128 encryption of the all-zero block
  under key x, one-way under standard block-cipher assumptions;
- ``testmix64``: an 8-byte non-cryptographic mixing permutation, for fast
  exhaustive tests -- pebbling correctness does not depend on one-wayness.

Values serialize as lowercase hex, two characters per octet, no prefix.
Handles are immutable and safe to share; evaluation is pure and re-entrant.
"""

import hashlib
from dataclasses import dataclass, field
from typing import Callable

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes


class WidthError(ValueError):
    """Input width does not match the one-way function's width."""


class UnknownOwfError(ValueError):
    """Requested a one-way function that is not registered."""


@dataclass(frozen=True)
class Owf:
    """A named, length-preserving one-way function."""

    name: str
    width: int
    fn: Callable[[bytes], bytes] = field(repr=False)


def evaluate(owf: Owf, v: bytes) -> bytes:
    """Apply the one-way function once; width in equals width out."""
    if len(v) != owf.width:
        raise WidthError(f"{owf.name} expects {owf.width} bytes, got {len(v)}")
    return owf.fn(v)


def iterate(owf: Owf, v: bytes, m: int) -> bytes:
    """Apply the one-way function m times; iterate(owf, v, 0) is v itself."""
    if m < 0:
        raise ValueError("iteration count must be >= 0")
    for _ in range(m):
        v = evaluate(owf, v)
    return v


def _md5_block(x: bytes) -> bytes:
    return hashlib.md5(x).digest()


def _davies_meyer_aes128(x: bytes) -> bytes:
    enc = Cipher(algorithms.AES(x), modes.ECB()).encryptor()
    return enc.update(b"\x00" * 16) + enc.finalize()


_MASK64 = (1 << 64) - 1


def _testmix64(x: bytes) -> bytes:
    # splitmix64 step: every stage is invertible, so this is a bijection;
    # the additive constant keeps the all-zero block from being a fixed point
    z = (int.from_bytes(x, "big") + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z.to_bytes(8, "big")


_BUILTINS = {
    "md5": Owf("md5", 16, _md5_block),
    "davies-meyer-aes128": Owf("davies-meyer-aes128", 16, _davies_meyer_aes128),
    "testmix64": Owf("testmix64", 8, _testmix64),
}

OWF_NAMES = tuple(_BUILTINS)


def builtin(name: str) -> Owf:
    """Look up a built-in one-way function by name."""
    try:
        return _BUILTINS[name]
    except KeyError:
        raise UnknownOwfError(
            f"unknown one-way function {name!r}; choose from {', '.join(OWF_NAMES)}"
        ) from None
