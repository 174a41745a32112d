from fractions import Fraction

from hypothesis import given, strategies as st
import pytest

from qbrackets.algebra import ParamContext, expand_rational_param
from qbrackets.invariants import (DomainError, NatSeq, Q_k, S_k, bernoulli, connected_kernel,
                                  discrete_convolution, discrete_derivative, identity_seq,
                                  kernel_D, kernel_X, s_fn, sgenser_check, shat_fn, t_N)
from qbrackets.partitions import EMPTY, Partition

P = Partition.from_parts
F = Fraction
Z = ParamContext(("zeta",), (1,))
R = ParamContext(("rho",), (1,))
RX = ParamContext(("rho", "xi"), (1, 1))
X = ParamContext(("xi",), (1,))


def test_bernoulli():
    assert [bernoulli(n) for n in (0, 1, 2, 4, 6)] == [1, F(-1, 2), F(1, 6), F(-1, 30), F(1, 42)]


def test_power_sums():
    assert S_k(2)(EMPTY).constant_term() == F(-1, 24)
    assert Q_k(2)(EMPTY).constant_term() == F(-1, 24)
    assert S_k(2)(P([1])).constant_term() == F(23, 24)
    with pytest.raises(DomainError):
        S_k(3)


@given(st.lists(st.integers(1, 6), max_size=6))
def test_Q2_is_size_shift(parts):
    lam = P(parts)
    assert Q_k(2)(lam).constant_term() == F(-1, 24) + lam.size
    assert S_k(2)(lam).constant_term() == F(-1, 24) + lam.size


def test_t_N_values():
    z = Z.var("zeta")
    zi = Z.var("zeta", -1)
    assert t_N(1, Z)(EMPTY) == Z.one()
    assert t_N(1, Z)(P([1])) == 1 + z + zi
    assert t_N(2, Z)(P([1, 1, 2, 2, 2, 2])) == 1 + z + zi + Z.var("zeta", 2) + Z.var("zeta", -2)
    assert t_N(2, Z)(P([1, 2, 2, 2])) == Z.one()
    with pytest.raises(DomainError):
        t_N(0, Z)


def test_s_values():
    rho = R.var("rho")
    const = rho * expand_rational_param("geom", R, "rho", 7) + F(1, 2)
    win = {"rho": (-6, 6)}
    assert s_fn(R, "rho", 8)(EMPTY).restrict(**win) == const.restrict(**win)
    got = s_fn(R, "rho", 8)(P([2])).restrict(**win)
    assert got == (const + R.var("rho", 2) - R.var("rho", -2)).restrict(**win)


def test_shat_empty():
    v = shat_fn(RX, "rho", "xi", 6)(EMPTY).restrict(rho=(-5, 5), xi=(-5, 5))
    assert v.coefficient() == 1
    assert v.coefficient(rho=3) == 1 and v.coefficient(xi=3) == 1
    assert v.coefficient(rho=1, xi=1) == 0


def test_shat_parts():
    v = shat_fn(RX, "rho", "xi", 6)(P([2, 2])).restrict(rho=(-5, 5), xi=(-5, 5))
    assert v.coefficient(rho=2, xi=1) == 1 and v.coefficient(rho=2, xi=2) == 1
    assert v.coefficient(rho=-2, xi=-2) == -1


@pytest.mark.parametrize("lam,order", [(EMPTY, 3), (P([1]), 5), (P([3, 2]), 7)])
def test_generating_identity(lam, order):
    assert sgenser_check(lam, order).equal


def test_kernels():
    d = kernel_D(2, 3, 10)
    assert d(5).constant_term() == 0 and d(6).constant_term() == 1
    x = kernel_X(X, "xi", 5)
    assert x(3) == X.var("xi") + X.var("xi", 2) + X.var("xi", 3)
    dd = discrete_derivative(kernel_D(2, 3, 20))
    assert [dd(r).constant_term() for r in range(1, 21)] == [int(r == 6) for r in range(1, 21)]


def test_derivative_and_convolution():
    E = ParamContext(())
    ident = identity_seq(E, 10)
    assert all(discrete_derivative(ident)(n).constant_term() == 1 for n in range(1, 11))
    d11 = discrete_derivative(kernel_D(1, 1, 10))
    conv = discrete_convolution(d11, d11)
    assert conv(1).constant_term() == 0
    assert [conv(n).constant_term() for n in range(1, 11)] == [int(n == 2) for n in range(1, 11)]


def test_connected_kernel_small():
    E = ParamContext(())
    g1 = NatSeq.from_fn(E, lambda r: r * r, 8)
    g2 = NatSeq.from_fn(E, lambda r: 2 ** r, 8)
    assert connected_kernel([g1]).values == discrete_derivative(g1).values
    want = discrete_derivative(g1 * g2) - discrete_convolution(discrete_derivative(g1),
                                                               discrete_derivative(g2))
    assert connected_kernel([g1, g2]).values[1:] == want.values[1:]


def test_connected_kernel_matches_oracle(frozen):
    g = connected_kernel([kernel_D(1, 1, 10, X), kernel_X(X, "xi", 10)])
    for r, want in enumerate(frozen["kernel_D11_X_1_10"], start=1):
        assert {str(k[0]): int(v) for k, v in g(r).terms.items()} == want


@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6), st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_convolution_commutes(a, b):
    E = ParamContext(())
    ga, gb = NatSeq.from_fn(E, lambda r: a[r], 5), NatSeq.from_fn(E, lambda r: b[r], 5)
    assert discrete_convolution(ga, gb).values == discrete_convolution(gb, ga).values
