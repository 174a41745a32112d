"""Set partitions of ``{1, ..., l}``, the refinement order and its Moebius function."""

from __future__ import annotations

from functools import lru_cache
from math import factorial
from typing import Iterable, Iterator

MAX_GROUND = 10


class SizeError(ValueError):
    pass


class OrderError(ValueError):
    pass


class SetPartition:
    """Canonical set partition: blocks are sorted tuples ordered by least element."""

    __slots__ = ("blocks", "ground")

    def __init__(self, blocks: Iterable[Iterable[int]]):
        canon = sorted((tuple(sorted(b)) for b in blocks), key=lambda b: b[0] if b else 0)
        if any(not b for b in canon):
            raise ValueError("blocks must be non-empty")
        elems = [x for b in canon for x in b]
        if len(elems) != len(set(elems)):
            raise ValueError("blocks must be disjoint")
        self.blocks: tuple[tuple[int, ...], ...] = tuple(canon)
        self.ground = frozenset(elems)

    @classmethod
    def top(cls, l: int) -> "SetPartition":
        return cls([range(1, l + 1)])

    @classmethod
    def bottom(cls, l: int) -> "SetPartition":
        return cls([[i] for i in range(1, l + 1)])

    def __len__(self):
        return len(self.blocks)

    def __iter__(self):
        return iter(self.blocks)

    def __eq__(self, other):
        return isinstance(other, SetPartition) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __lt__(self, other):
        return self.blocks < other.blocks

    def __repr__(self):
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def _check_size(l: int):
    if not 1 <= l <= MAX_GROUND:
        raise SizeError(f"ground set size must lie in 1..{MAX_GROUND}, got {l}")


def _set_partitions(items: tuple[int, ...]) -> Iterator[list[list[int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


@lru_cache(maxsize=None)
def gen_set_partitions(l: int) -> tuple[SetPartition, ...]:
    """All Bell(l) set partitions of ``{1..l}``, sorted canonically."""
    _check_size(l)
    return tuple(sorted(SetPartition(p) for p in _set_partitions(tuple(range(1, l + 1)))))


def set_partitions_of(items: Iterable[int]) -> list[SetPartition]:
    items = tuple(sorted(items))
    _check_size(len(items))
    return sorted(SetPartition(p) for p in _set_partitions(items))


def refines(alpha: SetPartition, beta: SetPartition) -> bool:
    if alpha.ground != beta.ground:
        raise OrderError("set partitions live on different ground sets")
    owner = {x: i for i, b in enumerate(beta.blocks) for x in b}
    return all(len({owner[x] for x in a}) == 1 for a in alpha.blocks)


def refinements(beta: SetPartition) -> list[SetPartition]:
    """Every alpha <= beta: independent set partitions of each block of beta."""
    out = [[]]
    for block in beta.blocks:
        out = [acc + list(p.blocks) for acc in out for p in set_partitions_of(block)]
    return sorted(SetPartition(p) for p in out)


def moebius_sp(alpha: SetPartition, beta: SetPartition) -> int:
    """``prod_{B in beta} (-1)^(|alpha_B|+1) (|alpha_B|-1)!`` for alpha refining beta."""
    if not refines(alpha, beta):
        raise OrderError(f"{alpha} does not refine {beta}")
    result = 1
    for b in beta.blocks:
        bs = set(b)
        k = sum(1 for a in alpha.blocks if a[0] in bs)
        result *= (-1) ** (k + 1) * factorial(k - 1)
    return result


def moebius_top(alpha: SetPartition) -> int:
    """``mu(alpha, 1^)`` = (-1)^(|alpha|+1) (|alpha|-1)!."""
    k = len(alpha.blocks)
    return (-1) ** (k + 1) * factorial(k - 1)
