from fractions import Fraction
import json

import pytest

from qbrackets.algebra import ParamContext, dump_qseries, series_equal
from qbrackets.qforms import (DomainError, FormSpec, MAX_ORDER, PoleError, F_w_coefficients,
                              build, build_A_N, build_F, build_F_at, build_F_n, build_T_star,
                              build_f_N, fN_as_appell, inv_p_minus_one, parse_monomial,
                              rhs_falsemock, rhs_falsemock_literal, t_psi_bridge, theta_bridge)

F = Fraction
Z = ParamContext(("zeta",), (1,))
ZX = ParamContext(("zeta", "xi"), (1, 1))


def test_A1_terms():
    a = build_A_N(Z, 1, 4)
    assert dump_qseries(a) == "0/1 | 1\n1/1 | 1 zeta^1 + 1 zeta^-1\n4/1 | 1 zeta^2 + 1 zeta^-2\n"


def test_F_first_coefficient():
    c = build_F(ZX, 3).coefficient(1)
    assert c == -(ZX.mono(1, zeta=1, xi=1) - ZX.mono(1, zeta=-1, xi=-1))


def test_F_constant_term_regions():
    # (zeta xi - 1)/((zeta-1)(xi-1)) for |zeta|,|xi| > 1 starts with 1 + zeta^-1 + xi^-1
    c = build_F(ZX, 2, porder=6).coefficient(0).restrict(zeta=(-3, 3), xi=(-3, 3))
    assert c.coefficient() == 1 and c.coefficient(zeta=-1) == 1 and c.coefficient(xi=-1) == 1
    lt = build_F(ZX, 2, region={"zeta": "lt1", "xi": "lt1"}, porder=6).coefficient(0)
    assert lt.restrict(zeta=(-3, 3), xi=(-3, 3)).coefficient() == -1


def test_unknown_region():
    with pytest.raises(ValueError):
        inv_p_minus_one(Z, "zeta", 4, "sideways")


def test_F_pole_guard():
    with pytest.raises(PoleError):
        build_F_at(ZX, 3, {"zeta": 0}, {"xi": 1})


def test_fN_first_term():
    f = build_f_N(ZX, 1, 3)
    assert f.coefficient(1).coefficient(zeta=1) == 1


def test_T_star_signs():
    t = build_T_star(Z, 4)
    assert t.coefficient(0).coefficient() == 1
    assert t.coefficient(1).coefficient(zeta=-1) == -1
    assert t.coefficient(1).coefficient(zeta=1) == 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_F_w_coefficients_two_routes(n):
    closed, via = F_w_coefficients(n, 6, porder=10)
    assert series_equal(closed, via, window={"zeta": (-8, 8)})


def test_F_w_second_has_bernoulli_constant():
    closed, _ = F_w_coefficients(2, 3)
    assert closed.coefficient(0).constant_term() == F(1, 12)


def test_bridges():
    assert t_psi_bridge(25)
    assert theta_bridge(20)
    for N in (1, 2):
        assert fN_as_appell(N, 10)


def test_F_n_products():
    for n in (1, 2):
        lhs, rhs = build_F_n(n, 4, box=4)
        assert series_equal(lhs, rhs)


def test_falsemock_forms():
    ctx = ParamContext(("zeta", "rho", "xi"), (1, 1, 1))
    from qbrackets.brackets import BracketContext, connected_q_bracket
    from qbrackets.invariants import shat_fn, t_N
    lhs = connected_q_bracket([t_N(1, ctx), shat_fn(ctx, "rho", "xi", 24)], BracketContext(ctx, 5))
    win = {"rho": (-16, 16), "xi": (-16, 16)}
    assert series_equal(lhs, rhs_falsemock(1, ctx, 5, 34), window=win)
    lit = series_equal(lhs, rhs_falsemock_literal(1, ctx, 5, ("zeta*rho", "xi"), 34), window=win)
    assert not lit.equal


def test_parse_monomial():
    assert parse_monomial("zeta^-1*rho") == {"zeta": -1, "rho": 1}
    assert parse_monomial("xi^N", N=2) == {"xi": 2}


def test_formspec_json():
    spec = FormSpec.from_json('{"which": "A_N", "N": 2}', order=9)
    assert FormSpec.from_json(spec.to_json()) == spec
    assert json.loads(spec.to_json())["order"] == 9
    assert series_equal(build(spec), build_A_N(Z, 2, 9))
    with pytest.raises(DomainError):
        FormSpec.from_json('{"which": "nope"}')
    with pytest.raises(DomainError):
        FormSpec.from_json('{"which": "A_N", "colour": 1}')


def test_order_limit():
    with pytest.raises(DomainError):
        build(FormSpec("A_N", order=MAX_ORDER + 1))


def test_bindings_rename():
    s = build(FormSpec("A_N", order=4, bindings={"zeta": "z1"}))
    assert s.ctx.names == ("z1",)
