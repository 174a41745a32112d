import random
import warnings

import mpmath
from hypothesis import given, settings, strategies as st
import pytest

from qbrackets.checks import (check_completion_norms, check_limit_T, check_limit_psi, law_points)
from qbrackets.numerics import (LAWS, S, T, Action, BranchWarning, DomainError, GammaMatrix, Point,
                                PoleError, chi, check_transformation, epsilon_d, eta_multiplier,
                                eval_appell, eval_E, eval_eta, eval_R, eval_theta, kronecker)


def test_E_basics():
    assert eval_E(0) == 0
    for x in (0.3, 1.7, 0.2 + 0.4j):
        assert abs(eval_E(-x) + eval_E(x)) < 1e-15


def test_E_tail_against_quadrature():
    # 1 - E(10) is about 1e-137, so the subtraction needs roughly 460 bits
    eps = 1 - eval_E(10, 600)
    with mpmath.workprec(200):
        # factor out exp(-100 pi) so the integrand is not steep: t = 10 + u
        pi = mpmath.pi
        quad = 2 * mpmath.exp(-100 * pi) * mpmath.quad(lambda u: mpmath.exp(-20 * pi * u - pi * u * u),
                                                       [0, 0.02, 0.05, 0.1, 0.2, 0.5, 1, 2])
    assert 0 < eps < 1e-12
    assert abs(eps - quad) < abs(quad) * 1e-20


def test_R_term_count_and_precisions():
    val, n = eval_R(0.1 + 0.2j, 1j, 34, return_terms=True)
    assert n <= 60
    lo, hi = eval_R(0.1 + 0.2j, 0.3 + 1.1j, 53), eval_R(0.1 + 0.2j, 0.3 + 1.1j, 160)
    assert abs(lo - hi) < 1e-9


def test_domain_errors():
    with pytest.raises(DomainError):
        eval_R(0.1, -1j)
    with pytest.raises(DomainError):
        epsilon_d(2)
    with pytest.raises(DomainError):
        GammaMatrix(1, 1, 1, 1)


def test_theta_values():
    for tau in (1j, 0.3 + 0.7j, -0.2 + 1.5j):
        assert abs(eval_theta("vartheta", 0, tau)) < 1e-14


def test_theta_big_theta_bridge():
    rng = random.Random(3)
    for _ in range(5):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.5, 1.5))
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.2, 0.2))
        r = check_transformation("theta-big-theta-bridge", Point(z, 0, tau), Action(), 80)
        assert r.relative < 1e-10


def test_eta():
    v = eval_eta(2j, 80)
    prod = mpmath.exp(-2 * mpmath.pi * 2 / 24) * mpmath.nprod(lambda n: 1 - mpmath.exp(-4 * mpmath.pi * n), [1, mpmath.inf])
    assert abs(v.imag) < 1e-20 and v.real > 0
    assert abs(v - prod) < 1e-15


def test_eta_multiplier_values():
    assert abs(eta_multiplier(T) - mpmath.expjpi(mpmath.mpf(1) / 12)) < 1e-15
    tau = 0.1 + 1.1j
    lhs = eval_eta(-1 / tau)
    rhs = mpmath.sqrt(-1j * tau) * eval_eta(tau)
    assert abs(lhs - rhs) < 1e-12
    assert abs(eta_multiplier(S) * mpmath.sqrt(tau) - mpmath.sqrt(-1j * tau)) < 1e-12


def random_gamma(rng):
    while True:
        a, b = rng.randint(-9, 9), rng.randint(-9, 9)
        from math import gcd
        if gcd(a, b) != 1:
            continue
        # extended Euclid for c, d with a d - b c = 1
        old_r, r, old_s, s, old_t, t = a, b, 1, 0, 0, 1
        while r:
            qq = old_r // r
            old_r, r = r, old_r - qq * r
            old_s, s = s, old_s - qq * s
            old_t, t = t, old_t - qq * t
        if old_r == -1:
            old_s, old_t = -old_s, -old_t
        k = rng.randint(-3, 3)
        return GammaMatrix(a, b, -old_t + k * a, old_s + k * b)


def test_eta_multiplier_is_unimodular_and_consistent():
    rng = random.Random(0)
    tau = 0.05 + 0.9j
    for _ in range(100):
        g = random_gamma(rng)
        assert abs(abs(eta_multiplier(g)) - 1) < 1e-14
    for _ in range(10):
        g = random_gamma(rng)
        if g.c == 0:
            continue
        r = check_transformation("eta-modular", Point(tau=tau), Action(gamma=g), 80)
        assert r.relative < 1e-12


def test_kronecker_small():
    assert [kronecker(a, 5) for a in range(5)] == [0, 1, -1, -1, 1]
    assert kronecker(2, 7) == 1 and kronecker(-1, 7) == -1 and kronecker(3, 8) == -1


def test_appell_and_pole():
    a = eval_appell(1, 0.1 + 0.3j, 0.2 - 0.1j, 0.1 + 1.0j, 53)
    b = eval_appell(1, 0.1 + 0.3j, 0.2 - 0.1j, 0.1 + 1.0j, 160)
    assert abs(a - b) < 1e-12
    with pytest.raises(PoleError):
        eval_appell(1, 1e-9, 0.2, 1j)


def test_branch_warning():
    with pytest.warns(BranchWarning):
        chi(GammaMatrix(1, 0, 1, 1), -2 + 1e-10j, 2j)


def test_spec_law_examples():
    pt = Point(0.3 + 0.2j, 0.1 - 0.05j, 0.1 + 1.2j, 0.2 + 2.0j)
    assert check_transformation("theta-modular", pt, Action(gamma=S)).relative < 1e-10
    assert check_transformation("theta-elliptic", pt, Action(m=1, l=1)).relative < 1e-10
    assert check_transformation("big-theta-modular", pt, Action(gamma=GammaMatrix(1, 0, 2, 1))).relative < 1e-10


def test_big_theta_character_sign():
    pt = Point(0.3 + 0.2j, 0, 0.1 + 1.2j)
    g = GammaMatrix(3, -2, 8, -5)
    assert check_transformation("big-theta-modular", pt, Action(gamma=g), 80).relative < 1e-12
    bad = check_transformation("big-theta-modular-variant", pt, Action(gamma=g), 80)
    assert bad.relative > 0.1


def test_unknown_law():
    with pytest.raises(DomainError):
        check_transformation("nope", Point(), Action())


def test_limits():
    assert check_limit_psi().passed
    assert check_limit_T().passed
    assert check_limit_psi(norm="pi-scaled").passed
    assert check_completion_norms().passed


@settings(max_examples=25)
@given(st.integers(0, 10 ** 6), st.sampled_from(["theta-elliptic", "appell-elliptic", "psi-hat-elliptic"]),
       st.integers(-2, 2), st.integers(-2, 2))
def test_elliptic_laws_on_random_points(seed, law, m, l):
    pt = law_points(1, seed)[0]
    act = Action(m=m, l=l, m2=l, l2=-m, ell=1 + seed % 2)
    assert check_transformation(law, pt, act, 80).relative < 1e-15


@settings(max_examples=15)
@given(st.integers(0, 10 ** 6))
def test_theta_modular_on_random_matrices(seed):
    g = random_gamma(random.Random(seed))
    pt = law_points(1, seed)[0]
    # keep the image point well inside the upper half-plane
    if g.act(pt.tau).imag < 0.05:
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        assert check_transformation("theta-modular", pt, Action(gamma=g), 80).relative < 1e-12


def test_registry_shape():
    assert {"theta-elliptic", "theta-modular", "T-hat-modular", "fN-diag-modular"} <= set(LAWS)
    for law in LAWS.values():
        assert law.kind in ("elliptic", "modular", "bridge")
