from fractions import Fraction

from hypothesis import given, settings, strategies as st
import pytest

from qbrackets.algebra import ParamContext, USeries, series_equal, substitute_u_to_q
from qbrackets.brackets import (BracketContext, RangeError, connected_q_bracket, connected_u_bracket,
                                connected_via_moebius, connected_via_multiplicities, phi_inverse,
                                products_via_connected, q_bracket, q_bracket_direct, u_bracket)
from qbrackets.invariants import (PartitionFn, S_k, constant_fn, identity_seq, kernel_D, length_fn,
                                  multiplicity_fn, of_multiplicity, t_N)
from qbrackets.partitions import EMPTY, Partition, partitions_upto
from qbrackets.qforms import A_N_useries, rhs_thm1_ubrackoffa
from qbrackets.setpartitions import SetPartition, gen_set_partitions

E = ParamContext(())
Z = ParamContext(("zeta",), (1,))
P = Partition.from_parts


def coeffs(series, order):
    return [str(series.coefficient(n).constant_term()) for n in range(order + 1)]


def test_bracket_of_one():
    bc = BracketContext(E, 8)
    assert u_bracket(constant_fn(E), bc).terms == {EMPTY: E.one()}
    assert coeffs(q_bracket(constant_fn(E), bc), 8) == ["1"] + ["0"] * 8


def test_bracket_of_multiplicity():
    u = u_bracket(multiplicity_fn(E, 2), BracketContext(E, 8))
    assert set(u.terms) == {P([2] * r) for r in range(1, 5)}
    assert all(c == E.one() for c in u.terms.values())


def test_frozen_q_brackets(frozen):
    bc = BracketContext(E, 10)
    assert coeffs(q_bracket(length_fn(E), BracketContext(E, 8)), 8) == frozen["bracket_length_8"]
    assert coeffs(q_bracket(S_k(2), bc), 10) == frozen["bracket_S2_10"]
    assert coeffs(q_bracket(multiplicity_fn(E, 1), BracketContext(E, 8)), 8) == frozen["bracket_r1_8"]


def test_t1_is_theta(frozen):
    s = q_bracket(t_N(1, Z), BracketContext(Z, 16))
    got = [str(s.coefficient(n).evaluate_param("zeta", Fraction(1)).constant_term()) for n in range(17)]
    assert got == frozen["bracket_t1_at_one_16"]


def test_t_N_u_bracket_is_A_N():
    for N in (1, 2):
        bc = BracketContext(Z, 12)
        assert series_equal(u_bracket(t_N(N, Z), bc), A_N_useries(Z, N, 12))


def test_two_routes_agree():
    bc = BracketContext(Z, 10)
    q_bracket(t_N(1, Z), bc, cross_check=True)


def test_connected_small():
    bc = BracketContext(E, 8)
    f1, f2 = length_fn(E), multiplicity_fn(E, 1)
    assert series_equal(connected_q_bracket([f1], bc), q_bracket(f1, bc))
    want = q_bracket(f1 * f2, bc) - q_bracket(f1, bc) * q_bracket(f2, bc)
    assert series_equal(connected_q_bracket([f1, f2], bc), want)


def test_connected_t1_t1():
    ctx = ParamContext(("zeta1", "zeta2"), (1, 1))
    bc = BracketContext(ctx, 8)
    fs = [t_N(1, ctx, "zeta1"), t_N(1, ctx, "zeta2")]
    assert series_equal(connected_u_bracket(fs, bc), rhs_thm1_ubrackoffa((1, 1), ctx, 8))


def test_phi_examples():
    one = phi_inverse(USeries.one(E, 6))
    assert all(one(lam) == E.one() for lam in partitions_upto(6))
    phiA = phi_inverse(A_N_useries(Z, 1, 10))
    t1 = t_N(1, Z)
    assert all(phiA(lam) == t1(lam) for lam in partitions_upto(10))
    u1 = phi_inverse(USeries.monomial(E, P([1]), 1, 6))
    assert all(u1(lam).constant_term() == int(lam.r(1) >= 1) for lam in partitions_upto(6))
    with pytest.raises(RangeError):
        one(P([7]))


def test_fast_path_examples():
    bc = BracketContext(E, 8)
    g = identity_seq(E, 8)
    assert connected_via_multiplicities([g, g], [1, 2], bc).terms == {}
    one = connected_via_multiplicities([identity_seq(E, 4)], [2], bc)
    assert series_equal(one, u_bracket(multiplicity_fn(E, 2), bc))
    gs = [kernel_D(1, 1, 10), identity_seq(E, 10)]
    bc10 = BracketContext(E, 10)
    assert series_equal(connected_via_multiplicities(gs, [1, 1], bc10),
                        connected_u_bracket([of_multiplicity(g, 1) for g in gs], bc10))


def test_cutoff_range():
    with pytest.raises(RangeError):
        BracketContext(E, 31)


# properties

def random_fn(table):
    # a deterministic scalar function on partitions from a small integer table
    return PartitionFn(E, lambda lam: E.const(sum(table[(p * 3 + i) % len(table)]
                                                  for i, p in enumerate(lam.parts))), "rand")


tables = st.lists(st.integers(-3, 3), min_size=5, max_size=5)


@settings(max_examples=40)
@given(st.lists(tables, min_size=4, max_size=4), st.sampled_from(gen_set_partitions(4)))
def test_moebius_inversion(tabs, alpha):
    bc = BracketContext(E, 6)
    fs = [random_fn(t) for t in tabs]
    lhs, rhs = products_via_connected(fs, alpha, bc)
    assert series_equal(lhs, rhs)
    # the connected bracket of the whole set agrees with the Moebius sum formula
    top = SetPartition.top(4)
    assert series_equal(connected_via_moebius(fs, top, bc), connected_u_bracket(fs, bc))


@settings(max_examples=40)
@given(st.dictionaries(st.sampled_from(list(partitions_upto(8))), st.integers(-4, 4), max_size=6))
def test_phi_round_trip(d):
    G = USeries(E, {k: E.const(v) for k, v in d.items()}, 8)
    assert series_equal(u_bracket(phi_inverse(G), BracketContext(E, 8)), G)


@settings(max_examples=40)
@given(tables)
def test_q_bracket_is_specialised_u_bracket(t):
    bc = BracketContext(E, 8)
    f = random_fn(t)
    assert series_equal(q_bracket_direct(f, bc), substitute_u_to_q(u_bracket(f, bc)))
