"""Ternary codes, two-bitplane packing, and Hamming distance over the packed form.

A length-d code over {-1, 0, +1} is stored as two bitplanes: the positive
plane sets bit i when trit i is +1, the negative plane when it is -1. Under
the induced binary encoding (+1 -> "10", 0 -> "00", -1 -> "01") the Hamming
distance between two codes is popcount(pos XOR pos') + popcount(neg XOR neg'),
so disagreeing nonzero trits cost 2 and zero/nonzero disagreements cost 1.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

_TRIT_BITS = {1: "10", 0: "00", -1: "01"}

_CODES_MAGIC = b"TNC1"


@dataclass(frozen=True)
class TernaryCode:
    """A vector of trits in {-1, 0, +1}, stored as int8."""

    trits: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.trits)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("trits must be a non-empty 1-d array")
        if not np.all(np.isin(arr, (-1, 0, 1))):
            raise ValueError("trits must take values in {-1, 0, +1}")
        object.__setattr__(self, "trits", arr.astype(np.int8))

    def __eq__(self, other):
        if not isinstance(other, TernaryCode):
            return NotImplemented
        return np.array_equal(self.trits, other.trits)

    def __len__(self):
        return self.trits.size


@dataclass(frozen=True)
class PackedCode:
    """Two little-endian uint64 bitplanes over ceil(d/64) words each."""

    pos: np.ndarray
    neg: np.ndarray
    d: int

    def __post_init__(self):
        pos = np.asarray(self.pos, dtype=np.uint64)
        neg = np.asarray(self.neg, dtype=np.uint64)
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d!r}")
        words = (self.d + 63) // 64
        if pos.shape != (words,) or neg.shape != (words,):
            raise ValueError(f"expected {words} words per plane for d={self.d}")
        if np.any(pos & neg):
            raise ValueError("a trit cannot be both +1 and -1")
        tail = self.d % 64
        if tail:
            mask = np.uint64((1 << tail) - 1)
            if (pos[-1] & ~mask) or (neg[-1] & ~mask):
                raise ValueError(f"bits set beyond d={self.d}")
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "neg", neg)

    def __eq__(self, other):
        if not isinstance(other, PackedCode):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.pos, other.pos) and np.array_equal(self.neg, other.neg)


def ternarize(features, alpha: float) -> TernaryCode:
    """Quantize a real feature vector to a ternary code at threshold alpha."""
    from .activation import hard_ternary

    arr = np.asarray(features, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("features must be a non-empty 1-d array")
    return TernaryCode(hard_ternary(arr, alpha))


def _pack_plane(bits: np.ndarray) -> np.ndarray:
    words = (bits.size + 63) // 64
    padded = np.zeros(words * 64, dtype=np.uint8)
    padded[: bits.size] = bits
    return np.packbits(padded, bitorder="little").view("<u8").astype(np.uint64)


def pack(code: TernaryCode) -> PackedCode:
    """Split trits into the two bitplanes."""
    return PackedCode(
        pos=_pack_plane((code.trits == 1).astype(np.uint8)),
        neg=_pack_plane((code.trits == -1).astype(np.uint8)),
        d=code.trits.size,
    )


def unpack(packed: PackedCode) -> TernaryCode:
    """Inverse of pack."""
    pos = np.unpackbits(packed.pos.astype("<u8").view(np.uint8), bitorder="little")[: packed.d]
    neg = np.unpackbits(packed.neg.astype("<u8").view(np.uint8), bitorder="little")[: packed.d]
    return TernaryCode(pos.astype(np.int8) - neg.astype(np.int8))


def encode_binary(code: TernaryCode) -> str:
    """Two-character-per-trit binary string: +1 -> '10', 0 -> '00', -1 -> '01'."""
    return "".join(_TRIT_BITS[int(t)] for t in code.trits)


def hamming(a: PackedCode, b: PackedCode) -> int:
    """Hamming distance between the binary encodings of two packed codes."""
    if a.d != b.d:
        raise ValueError(f"code lengths differ: {a.d} vs {b.d}")
    return int(np.bitwise_count(a.pos ^ b.pos).sum() + np.bitwise_count(a.neg ^ b.neg).sum())


def save_codes(path, codes: list[PackedCode]) -> None:
    """Write packed codes: magic 'TNC1', u32 count, u32 d, then per code the
    positive plane's words followed by the negative plane's, all little-endian u64."""
    if not codes:
        raise ValueError("cannot save an empty code list")
    d = codes[0].d
    if any(c.d != d for c in codes):
        raise ValueError("all codes must share one length")
    with open(path, "wb") as fh:
        fh.write(_CODES_MAGIC)
        fh.write(struct.pack("<II", len(codes), d))
        for c in codes:
            fh.write(c.pos.astype("<u8").tobytes())
            fh.write(c.neg.astype("<u8").tobytes())


def load_codes(path) -> list[PackedCode]:
    """Inverse of save_codes."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _CODES_MAGIC:
            raise ValueError(f"bad magic {magic!r}, expected {_CODES_MAGIC!r}")
        n, d = struct.unpack("<II", fh.read(8))
        if n < 1 or d < 1:
            raise ValueError(f"invalid header: n={n}, d={d}")
        words = (d + 63) // 64
        out = []
        for _ in range(n):
            raw = fh.read(2 * words * 8)
            if len(raw) != 2 * words * 8:
                raise ValueError("truncated code payload")
            planes = np.frombuffer(raw, dtype="<u8")
            out.append(PackedCode(pos=planes[:words].astype(np.uint64), neg=planes[words:].astype(np.uint64), d=d))
        if fh.read(1):
            raise ValueError("trailing bytes after code payload")
    return out
