from hypothesis import given, strategies as st
import pytest

from oracles import restricted_growth
from qbrackets.setpartitions import (OrderError, SetPartition, SizeError, gen_set_partitions,
                                     moebius_sp, moebius_top, refinements, refines)


def test_bell_numbers(frozen):
    assert [len(gen_set_partitions(l)) for l in range(1, 9)] == frozen["bell_1_8"]


def test_enumeration_matches_growth_strings():
    for l in range(1, 7):
        ours = set(gen_set_partitions(l))
        theirs = set()
        for rgs in restricted_growth(l):
            blocks = {}
            for i, b in enumerate(rgs, start=1):
                blocks.setdefault(b, []).append(i)
            theirs.add(SetPartition(blocks.values()))
        assert ours == theirs


def test_size_errors():
    for l in (0, 11):
        with pytest.raises(SizeError):
            gen_set_partitions(l)


def test_moebius_examples():
    top2, top3 = SetPartition.top(2), SetPartition.top(3)
    assert moebius_sp(top3, top3) == 1
    assert moebius_sp(SetPartition.bottom(2), top2) == -1
    assert moebius_sp(SetPartition.bottom(3), top3) == 2
    with pytest.raises(OrderError):
        moebius_sp(top2, SetPartition.bottom(2))


def test_refinement_examples():
    a = SetPartition([[1, 3], [2]])
    assert refines(a, a)
    assert refines(SetPartition.bottom(3), SetPartition.top(3))
    assert len(refinements(SetPartition.top(3))) == 5


def test_bad_blocks():
    with pytest.raises(ValueError):
        SetPartition([[1, 2], [2]])


@given(st.integers(2, 7))
def test_moebius_sums_to_zero(l):
    assert sum(moebius_top(a) for a in gen_set_partitions(l)) == 0


@given(st.integers(1, 6), st.data())
def test_moebius_is_inverse_of_zeta(l, data):
    # sum over alpha <= gamma <= beta of mu(alpha, gamma) is [alpha == beta]
    parts = gen_set_partitions(l)
    beta = data.draw(st.sampled_from(parts))
    alpha = data.draw(st.sampled_from(refinements(beta)))
    total = sum(moebius_sp(alpha, g) for g in refinements(beta) if refines(alpha, g))
    assert total == (1 if alpha == beta else 0)
