"""Bit-packed storage for batches of hypercube points.

A point of {-1,+1}^n is stored as ceil(n/8) bytes, little-endian within each
byte: bit j of byte k holds coordinate 8*k + j, with bit value 1 meaning +1
and bit value 0 meaning -1.  A batch is a uint8 array of shape (m, nbytes(n)).
Padding bits beyond coordinate n-1 are kept at zero so packed representations
are canonical and hashable.

Packing exists purely for throughput: uniform sampling touches 8x less memory
and halfspace evaluation can run off per-byte lookup tables.  Everything here
converts losslessly to and from plain +-1 int8 vectors.
"""

from __future__ import annotations

import numpy as np

# (256, 8) matrix: row b lists the bits of byte value b, LSB first.
BYTE_BITS = ((np.arange(256)[:, None] >> np.arange(8)[None, :]) & 1).astype(np.int8)
# Same, mapped to {-1,+1}.
BYTE_SIGNS = (2 * BYTE_BITS - 1).astype(np.int8)


def nbytes(n: int) -> int:
    return (n + 7) // 8


def tail_mask(n: int) -> int:
    """Byte mask keeping only the valid bits of the final byte."""
    rem = n % 8
    return 0xFF if rem == 0 else (1 << rem) - 1


def random_packed(rng: np.random.Generator, m: int, n: int) -> np.ndarray:
    """m uniform points of {-1,+1}^n, packed; padding bits zeroed."""
    nb = nbytes(n)
    out = np.frombuffer(rng.bytes(m * nb), dtype=np.uint8).reshape(m, nb).copy()
    out[:, -1] &= tail_mask(n)
    return out


def pack(points_pm: np.ndarray, n: int | None = None) -> np.ndarray:
    """Pack an (m, n) or (n,) array over {-1,+1} into bytes."""
    pm = np.atleast_2d(np.asarray(points_pm))
    if n is None:
        n = pm.shape[1]
    bits = (pm > 0).astype(np.uint8)
    return np.packbits(bits, axis=1, bitorder="little")


def unpack(packed: np.ndarray, n: int) -> np.ndarray:
    """Unpack an (m, nbytes) batch to (m, n) int8 over {-1,+1}."""
    packed = np.atleast_2d(packed)
    bits = np.unpackbits(packed, axis=1, count=n, bitorder="little")
    return (2 * bits.astype(np.int8) - 1)


def get_bit_column(packed: np.ndarray, i: int) -> np.ndarray:
    """Values (0/1) of coordinate i across the batch."""
    return (packed[:, i >> 3] >> (i & 7)) & 1


def set_bit_column(packed: np.ndarray, i: int, plus: bool) -> None:
    """Force coordinate i to +1 (plus=True) or -1 across the batch, in place."""
    byte, bit = i >> 3, np.uint8(1 << (i & 7))
    if plus:
        packed[:, byte] |= bit
    else:
        packed[:, byte] &= np.uint8(~bit & 0xFF)


def signed_bit_sums(packed: np.ndarray, v: np.ndarray, n: int) -> np.ndarray:
    """For each coordinate i, return sum_j v[j] * x[j, i] with x in {-1,+1}.

    v must be float64; the computation is exact for integer-valued v.  Runs
    off per-byte histograms, so cost is O(m * nbytes) rather than O(m * n).
    """
    nb = packed.shape[1]
    total = float(v.sum())
    out = np.empty(8 * nb, dtype=np.float64)
    bm = BYTE_BITS.astype(np.float64)
    for p in range(nb):
        hist = np.bincount(packed[:, p], weights=v, minlength=256)
        out[8 * p: 8 * p + 8] = hist @ bm
    # sum v*bit -> sum v*(2 bit - 1)
    return (2.0 * out - total)[:n]


def point_to_string(point_pm: np.ndarray) -> str:
    """Render a +-1 vector as a '+-...' string."""
    return "".join("+" if b > 0 else "-" for b in np.asarray(point_pm).ravel())


def point_from_string(s: str) -> np.ndarray:
    if not s or any(c not in "+-" for c in s):
        raise ValueError(f"malformed point string: {s!r}")
    return np.array([1 if c == "+" else -1 for c in s], dtype=np.int8)
