"""Subsets of a finite carrier as Python-int bitsets.

Bit ``i`` of a mask is set iff element ``i`` belongs to the subset.  Python
ints give exact union/intersection/complement at any carrier size.
"""
from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np


def full(n: int) -> int:
    return (1 << n) - 1


def from_indices(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << int(i)
    return mask


def from_bool(arr: np.ndarray) -> int:
    """Pack a 1-d boolean array into a mask."""
    packed = np.packbits(np.asarray(arr, dtype=bool), bitorder="little")
    return int.from_bytes(packed.tobytes(), "little")


def rows_from_bool(mat: np.ndarray) -> list[int]:
    packed = np.packbits(np.asarray(mat, dtype=bool), axis=-1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def to_bool(mask: int, n: int) -> np.ndarray:
    nbytes = max(1, (n + 7) // 8)
    raw = np.frombuffer(mask.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].astype(bool)


def members(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_list(mask: int) -> list[int]:
    return list(members(mask))


def count(mask: int) -> int:
    return mask.bit_count()


def is_subset(a: int, b: int) -> bool:
    return a & ~b == 0


def lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1
