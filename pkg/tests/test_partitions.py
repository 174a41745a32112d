from hypothesis import given, strategies as st
import pytest

from qbrackets.partitions import (EMPTY, Partition, gen_partitions, moebius_partition, multiplicity,
                                  partitions_upto, sub_partitions)

P = Partition.from_parts


def test_small_counts():
    assert gen_partitions(0) == (EMPTY,)
    assert len(gen_partitions(4)) == 5
    assert gen_partitions(4)[0] == P([4]) and gen_partitions(4)[-1] == P([1, 1, 1, 1])


def test_counts_match_oracle(frozen):
    assert [len(gen_partitions(n)) for n in range(31)] == frozen["partition_counts_0_30"]


def test_enumeration_is_complete_and_distinct():
    for n in range(12):
        ps = gen_partitions(n)
        assert len(set(ps)) == len(ps)
        assert all(p.size == n for p in ps)


def test_multiplicity():
    assert multiplicity(P([2, 2, 1]), 2) == 2
    assert multiplicity(EMPTY, 3) == 0
    assert multiplicity(P([5, 3, 3, 3, 1]), 3) == 3
    with pytest.raises(ValueError):
        multiplicity(EMPTY, 0)


def test_moebius():
    assert moebius_partition(P([3, 2, 1])) == -1
    assert moebius_partition(P([2, 2])) == 0
    assert moebius_partition(EMPTY) == 1


def test_sub_partitions():
    assert sub_partitions(P([1])) == [EMPTY, P([1])]
    assert sub_partitions(P([2, 1])) == [EMPTY, P([1]), P([2]), P([2, 1])]
    assert len(sub_partitions(P([2, 2]))) == 3


def test_parse_literal():
    assert Partition.parse("[3,2,2,1]") == P([3, 2, 2, 1])
    assert Partition.parse("[]") == EMPTY
    for bad in ("3,2", "[0]", "[a]", "[1,]"):
        with pytest.raises(ValueError):
            Partition.parse(bad)
    assert str(P([3, 2, 2, 1])) == "[3,2,2,1]"


def test_invalid_parts():
    with pytest.raises(ValueError):
        P([2, 0])


parts = st.lists(st.integers(1, 8), max_size=8)


@given(parts, parts)
def test_union_is_concatenation(a, b):
    assert P(a).union(P(b)) == P(a + b)
    assert P(a).union(P(b)).size == sum(a) + sum(b)


@given(parts)
def test_round_trip_and_moebius_sum(a):
    lam = P(a)
    assert sorted(lam.parts, reverse=True) == sorted(a, reverse=True)
    assert Partition.parse(str(lam)) == lam
    # sum of mu over sub-multisets vanishes unless lam is empty
    total = sum(moebius_partition(nu) for nu in sub_partitions(lam))
    assert total == (1 if lam == EMPTY else 0)


def test_partitions_upto_sizes():
    assert sum(1 for _ in partitions_upto(6)) == 1 + 1 + 2 + 3 + 5 + 7 + 11
