"""Integer partitions stored as multiplicity vectors.

A partition is kept as the sorted tuple of ``(part, multiplicity)`` pairs,
largest part first.  Every formula downstream is phrased through the
multiplicities ``r_m``, so that is the canonical form; the part sequence is
derived on demand.
"""

from __future__ import annotations

import re
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping


class Partition:
    __slots__ = ("_mult", "_size", "_hash")

    def __init__(self, mult: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        items = mult.items() if isinstance(mult, Mapping) else mult
        clean: dict[int, int] = {}
        for m, r in items:
            if m < 1 or r < 0:
                raise ValueError(f"invalid part/multiplicity pair ({m}, {r})")
            if r:
                clean[m] = clean.get(m, 0) + r
        self._mult = tuple(sorted(clean.items(), reverse=True))
        self._size = sum(m * r for m, r in self._mult)
        self._hash = hash(self._mult)

    @classmethod
    def from_parts(cls, parts: Iterable[int]) -> "Partition":
        counts: dict[int, int] = {}
        for p in parts:
            if p < 1:
                raise ValueError(f"parts must be positive, got {p}")
            counts[p] = counts.get(p, 0) + 1
        return cls(counts)

    @classmethod
    def parse(cls, text: str) -> "Partition":
        """Parse a literal such as ``[3,2,2,1]`` or ``[]``."""
        text = text.strip()
        if not re.fullmatch(r"\[\s*(\d+\s*(,\s*\d+\s*)*)?\]", text):
            raise ValueError(f"not a partition literal: {text!r}")
        body = text[1:-1].strip()
        return cls.from_parts(int(x) for x in body.split(",")) if body else cls()

    @property
    def mult(self) -> tuple[tuple[int, int], ...]:
        return self._mult

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(m for m, r in self._mult for _ in range(r))

    @property
    def size(self) -> int:
        return self._size

    @property
    def length(self) -> int:
        return sum(r for _, r in self._mult)

    def r(self, m: int) -> int:
        for part, count in self._mult:
            if part == m:
                return count
        return 0

    def is_strict(self) -> bool:
        return all(r == 1 for _, r in self._mult)

    def union(self, other: "Partition") -> "Partition":
        """Multiset union; this is the monomial product ``u_self * u_other``."""
        if not other._mult:
            return self
        if not self._mult:
            return other
        counts = dict(self._mult)
        for m, r in other._mult:
            counts[m] = counts.get(m, 0) + r
        return Partition(counts)

    def __eq__(self, other):
        return isinstance(other, Partition) and self._mult == other._mult

    def __lt__(self, other: "Partition"):
        return (self._size, self.parts) < (other._size, other.parts)

    def __hash__(self):
        return self._hash

    def __len__(self):
        return self.length

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __repr__(self):
        return f"Partition({list(self.parts)})"

    def __str__(self):
        return "[" + ",".join(map(str, self.parts)) + "]"


EMPTY = Partition()


def _descending(n: int, largest: int) -> Iterator[tuple[int, ...]]:
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _descending(n - first, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def gen_partitions(n: int) -> tuple[Partition, ...]:
    """All partitions of ``n`` in lexicographically descending order of parts.

    ``gen_partitions(4)`` starts with ``[4]`` and ends with ``[1,1,1,1]``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    return tuple(Partition.from_parts(p) for p in _descending(n, n))


def partitions_upto(cutoff: int) -> Iterator[Partition]:
    for n in range(cutoff + 1):
        yield from gen_partitions(n)


def multiplicity(lam: Partition, m: int) -> int:
    if m < 1:
        raise ValueError("part size must be positive")
    return lam.r(m)


def moebius_partition(lam: Partition) -> int:
    if not lam.is_strict():
        return 0
    return -1 if lam.length % 2 else 1


def sub_partitions(lam: Partition) -> list[Partition]:
    """Every sub-multiset of ``lam`` (including the empty one and ``lam``)."""
    parts = [m for m, _ in lam.mult]
    ranges = [range(r + 1) for _, r in lam.mult]
    out = [Partition(zip(parts, choice)) for choice in product(*ranges)]
    out.sort()
    return out
