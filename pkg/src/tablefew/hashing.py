"""Deterministic 64-bit hashing used for ids, sampling ranks, and config digests.

Everything that needs a stable pseudo-random ordering (per-website caps,
task sampling, example subsetting, query selection) derives it from FNV-1a
over a documented byte layout, so results are reproducible across runs,
input orderings, and process counts.
"""

from __future__ import annotations

FNV_OFFSET_BASIS = 14695981039346656037
FNV_PRIME = 1099511628211
_MASK64 = (1 << 64) - 1

# Field separator inside hash payloads; never appears in hostnames or indices.
_SEP = b"\x1f"


def fnv1a64(data: bytes) -> int:
    """FNV-1a hash of *data*, folded to 64 bits."""
    h = FNV_OFFSET_BASIS
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & _MASK64
    return h


def fnv1a64_extend(h: int, data: bytes) -> int:
    """Continue an FNV-1a hash with more bytes.

    FNV-1a is a per-byte fold, so ``fnv1a64(a + b) ==
    fnv1a64_extend(fnv1a64(a), b)``; hot paths hash a shared prefix once
    and extend it per suffix.
    """
    for b in data:
        h = ((h ^ b) * FNV_PRIME) & _MASK64
    return h


def hex16(value: int) -> str:
    """Lower-case hex of a 64-bit value, zero-padded to 16 chars."""
    return format(value & _MASK64, "016x")


def rank64(seed: int, *parts: str | int) -> int:
    """Seeded rank key for deterministic hash-order selection.

    Byte layout: the seed as 8 bytes big-endian, then for each part a
    0x1F separator followed by the UTF-8 bytes of ``str(part)``. Ties on
    the 64-bit value are broken by callers (lexicographic id order).
    """
    buf = bytearray((seed & _MASK64).to_bytes(8, "big"))
    for part in parts:
        buf += _SEP
        buf += str(part).encode("utf-8")
    return fnv1a64(bytes(buf))
