"""Closed-form truncated expansions and right-hand sides of the bracket identities.

Every builder returns an exact :class:`QSeries` (or :class:`USeries`).  Bilateral
sums are cut by solving the quadratic exponent bound exactly, and rational
prefactors such as ``1/(1-rho)`` are one-sided geometric expansions whose
validity windows travel with the coefficients.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import product
from math import factorial, isqrt
from typing import Any, Mapping, Sequence

from .algebra import (INF, Q_DEN, EqualityReport, LaurentCoeff, ParamContext, QSeries,
                      TruncationError, USeries, coefficient_in, expand_rational_param,
                      series_equal, twist, w_expand_coeff, w_expand_rational)
from .invariants import bernoulli
from .partitions import EMPTY, Partition
from .setpartitions import gen_set_partitions, moebius_top


class DomainError(ValueError):
    pass


class PoleError(ValueError):
    pass


MAX_ORDER = 64
HALF = Fraction(1, 2)


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


def _check_order(order):
    if order < 0 or order > MAX_ORDER:
        raise DomainError(f"order must lie in 0..{MAX_ORDER}")


def _qs(ctx: ParamContext, acc: dict, order) -> QSeries:
    """Assemble ``{q-exponent: {key: coeff}}`` into a QSeries."""
    terms = {}
    for e, d in acc.items():
        terms[Q_DEN * e if isinstance(e, int) else int(e * Q_DEN)] = LaurentCoeff(ctx, d)
    return QSeries(ctx, terms, int(order * Q_DEN) if order != INF else INF)


def _add(acc: dict, qexp, key, c):
    bucket = acc.setdefault(qexp, {})
    bucket[key] = bucket.get(key, 0) + c


def inv_p_minus_one(ctx: ParamContext, name: str, order: int, region: str) -> LaurentCoeff:
    """``1/(p - 1)`` for ``|p| < 1`` (``lt1``) or ``|p| > 1`` (``gt1``)."""
    if region == "lt1":
        return -expand_rational_param("geom", ctx, name, order)
    if region == "gt1":
        return ctx.var(name, -1) * expand_rational_param("geom_neg", ctx, name, order - 1)
    raise DomainError(f"unknown region flag {region!r}")


# ---------------------------------------------------------------------------
# theta-type series


def build_A_N(ctx: ParamContext, N: int, order, zeta: str = "zeta") -> QSeries:
    """``sum_m zeta^m q^(N m^2)``."""
    acc: dict = {}
    mmax = isqrt(int(order) // N) if order >= 0 else -1
    for m in range(-mmax, mmax + 1):
        _add(acc, N * m * m, ctx.key({zeta: m}), 1)
    return _qs(ctx, acc, order)


def A_N_useries(ctx: ParamContext, N: int, cutoff: int, zeta: str = "zeta") -> USeries:
    """``sum_{m in Z} zeta^m u_m^(mN)`` with ``u_0 = 1`` and ``u_{-m} = 1/u_m``."""
    terms: dict[Partition, LaurentCoeff] = {}
    mmax = isqrt(cutoff // N)
    for m in range(-mmax, mmax + 1):
        # u_m^(mN) for m < 0 is (u_|m|^-1)^(mN) = u_|m|^(|m|N)
        lam = Partition({abs(m): abs(m) * N}) if m else EMPTY
        c = ctx.var(zeta, m)
        terms[lam] = terms[lam] + c if lam in terms else c
    return USeries(ctx, terms, cutoff)


def build_theta_star(ctx: ParamContext, order, zeta: str = "zeta", base: int = 1) -> QSeries:
    """``sum_n zeta^n q^(base n^2)``."""
    return build_A_N(ctx, base, order, zeta)


def build_T_star(ctx: ParamContext, order, zeta: str = "zeta", base: int = 1) -> QSeries:
    """``sum_n sgn(n + 1/2) zeta^n q^(base n^2)``."""
    acc: dict = {}
    nmax = isqrt(int(order) // base)
    for n in range(-nmax, nmax + 1):
        _add(acc, base * n * n, ctx.key({zeta: n}), 1 if n >= 0 else -1)
    return _qs(ctx, acc, order)


def _half_integers(bound: Fraction):
    """Half-odd integers ``n`` with ``n^2/2 <= bound``."""
    k = 0
    out = []
    while True:
        n = Fraction(2 * k + 1, 2)
        if n * n / 2 > bound:
            break
        out.extend((n, -n))
        k += 1
    return out


def build_jacobi_theta(ctx: ParamContext, order, y: str = "y") -> QSeries:
    """``sum_{n in Z+1/2} y^n q^(n^2/2)`` with ``y = e^(2 pi i (z + 1/2))``."""
    acc: dict = {}
    for n in _half_integers(Fraction(order)):
        _add(acc, n * n / 2, ctx.key({y: n}), 1)
    return _qs(ctx, acc, order)


def build_psi(ctx: ParamContext, order, y: str = "y") -> QSeries:
    """False theta ``sum_{n in Z+1/2} sgn(n) y^n q^(n^2/2)``, ``y = e^(2 pi i (z + 1/2))``."""
    acc: dict = {}
    for n in _half_integers(Fraction(order)):
        _add(acc, n * n / 2, ctx.key({y: n}), _sgn(n))
    return _qs(ctx, acc, order)


def build_big_theta(ctx: ParamContext, order, zeta: str = "zeta") -> QSeries:
    """``sum_n zeta^n q^(n^2/2)``."""
    acc: dict = {}
    nmax = isqrt(int(2 * Fraction(order)))
    for n in range(-nmax, nmax + 1):
        if Fraction(n * n, 2) <= order:
            _add(acc, Fraction(n * n, 2), ctx.key({zeta: n}), 1)
    return _qs(ctx, acc, order)


# ---------------------------------------------------------------------------
# B, F and friends


def B_useries(ctx: ParamContext, cutoff: int, rho: str = "rho", porder: int = 12) -> USeries:
    """``rho/(1-rho) + 1/2 + sum_{mr>0} sgn(m) rho^m u_m^r``, read with ``u_{-m} = 1/u_m``."""
    const = ctx.var(rho) * expand_rational_param("geom", ctx, rho, porder - 1) + HALF
    terms: dict[Partition, LaurentCoeff] = {EMPTY: const}
    for m in range(-cutoff, cutoff + 1):
        if m == 0:
            continue
        for r in range(-cutoff, cutoff + 1):
            if m * r <= 0 or abs(m * r) > cutoff:
                continue
            lam = Partition({abs(m): abs(r)})
            c = ctx.var(rho, m).scale(_sgn(m))
            terms[lam] = terms[lam] + c if lam in terms else c
    return USeries(ctx, terms, cutoff)


def build_B(ctx: ParamContext, order: int, rho: str = "rho", porder: int = 12) -> QSeries:
    u = B_useries(ctx, order, rho, porder)
    return u.to_q()


def _mono_name(binding) -> str:
    if isinstance(binding, str):
        return binding
    raise DomainError("bindings must name a parameter")


def build_F(ctx: ParamContext, order: int, zeta: str = "zeta", xi: str = "xi",
            region: Mapping[str, str] | None = None, porder: int = 12) -> QSeries:
    """``(zeta xi - 1)/((zeta-1)(xi-1)) - sum_{m,r>=1} (zeta^m xi^r - zeta^-m xi^-r) q^(mr)``.

    ``region`` picks the expansion of each pole factor: ``lt1`` for ``|p| < 1``
    and ``gt1`` for ``|p| > 1`` (default ``gt1`` for both).
    """
    region = dict(region or {})
    rz, rx = region.get("zeta", "gt1"), region.get("xi", "gt1")
    if zeta == xi:
        raise PoleError("zeta and xi must be distinct formal parameters")
    const = ((ctx.var(zeta) * ctx.var(xi) - 1) * inv_p_minus_one(ctx, zeta, porder, rz)
             * inv_p_minus_one(ctx, xi, porder, rx))
    acc: dict = {}
    for m in range(1, order + 1):
        for r in range(1, order // m + 1):
            _add(acc, m * r, ctx.key({zeta: m, xi: r}), -1)
            _add(acc, m * r, ctx.key({zeta: -m, xi: -r}), 1)
    qs = _qs(ctx, acc, order)
    return qs + QSeries(ctx, {0: const}, order * Q_DEN)


def build_F_at(ctx: ParamContext, order: int, zeta_image: Mapping[str, int],
               xi_image: Mapping[str, int], **kw) -> QSeries:
    """F with elliptic arguments given as monomials; a trivial monomial sits on the pole."""
    zeta_image = {k: v for k, v in zeta_image.items() if v}
    xi_image = {k: v for k, v in xi_image.items() if v}
    if not zeta_image or not xi_image:
        raise PoleError("an elliptic argument of F collapsed to 0, which is a pole")
    base = ParamContext.of("_z", "_x", den=1)
    F = build_F(base, order, "_z", "_x", **kw)
    return F.substitute(ctx, {"_z": zeta_image, "_x": xi_image})


def build_f_N(ctx: ParamContext, N: int, order: int, zeta: str = "zeta", xi: str = "xi",
              xi_order: int = 12) -> QSeries:
    """``1/2 sum (sgn(n+1/2) + sgn(m-1/2)) zeta^m xi^n q^(N m^2 + m n)``.

    Only the ``m = 0`` column at ``q^0`` is infinite (``-sum_{n<=-1} xi^n``); it
    is truncated at ``xi^-xi_order`` with the matching lower window.
    """
    acc: dict = {}
    for m in range(1, order + 1):
        if N * m * m > order:
            break
        for n in range(0, (order - N * m * m) // m + 1):
            _add(acc, N * m * m + m * n, ctx.key({zeta: m, xi: n}), 1)
    for k in range(1, order + 1):
        if N * k * k + k > order:
            break
        for p in range(1, (order - N * k * k) // k + 1):
            _add(acc, N * k * k + k * p, ctx.key({zeta: -k, xi: -p}), -1)
    qs = _qs(ctx, acc, order)
    i = ctx.index(xi)
    window = [(-INF, INF)] * len(ctx.names)
    window[i] = (-xi_order * ctx.dens[i], INF)
    col = LaurentCoeff(ctx, {ctx.key({xi: -p}): Fraction(-1) for p in range(1, xi_order + 1)},
                       tuple(window))
    return qs + QSeries(ctx, {0: col}, order * Q_DEN)


def f_N_difference(ctx: ParamContext, N: int, order: int, first: Mapping[str, int],
                   second: Mapping[str, int], first0: Mapping[str, int] | None = None) -> QSeries:
    """``f_N(x, y) - f_N(x0, y)`` with ``x, x0, y`` monomials in ``ctx`` (``x0 = 1`` by default).

    The infinite ``m = 0`` column does not depend on the first argument, so it
    cancels and the difference is exact.
    """
    base = ParamContext.of("_x", "_x0", "_y", den=max(ctx.dens) if ctx.dens else 1)
    acc: dict = {}

    def put(q, m, n, s):
        _add(acc, q, base.key({"_x": m, "_y": n}), s)
        _add(acc, q, base.key({"_x0": m, "_y": n}), -s)

    for m in range(1, order + 1):
        if N * m * m > order:
            break
        for n in range(0, (order - N * m * m) // m + 1):
            put(N * m * m + m * n, m, n, 1)
    for k in range(1, order + 1):
        if N * k * k + k > order:
            break
        for p in range(1, (order - N * k * k) // k + 1):
            put(N * k * k + k * p, -k, -p, -1)
    qs = _qs(base, acc, order)
    return qs.substitute(ctx, {"_x": dict(first), "_x0": dict(first0 or {}), "_y": dict(second)})


def build_appell(ctx: ParamContext, ell: int, order, zeta: str = "zeta", xi: str = "xi",
                 region0: str = "lt1", porder: int = 12) -> QSeries:
    """``zeta^(ell/2) sum_m (-1)^(ell m) q^(ell m(m+1)/2) xi^m / (1 - zeta q^m)``.

    Expanded for ``|q| < |zeta| < |q|^-1``; the ``m = 0`` pole factor uses
    ``region0`` to pick the side of ``|zeta| = 1``.
    """
    if ell < 1:
        raise DomainError("ell must be positive")
    order = Fraction(order)
    half = Fraction(ell, 2)
    acc: dict = {}
    for m in range(1, int(order) + 2):
        base_e = Fraction(ell * m * (m + 1), 2)
        if base_e > order:
            break
        s = (-1) ** (ell * m)
        for k in range(0, int((order - base_e) // m) + 1):
            _add(acc, base_e + m * k, ctx.key({zeta: half + k, xi: m}), s)
    for j in range(1, int(order) + 2):
        m = -j
        base_e = Fraction(ell * m * (m + 1), 2)
        if base_e + j > order:
            break
        s = (-1) ** (ell * m)
        k = 1
        while base_e + j * k <= order:
            _add(acc, base_e + j * k, ctx.key({zeta: half - k, xi: m}), -s)
            k += 1
    qs = _qs(ctx, acc, order)
    pole = -inv_p_minus_one(ctx, zeta, porder, region0)
    c0 = ctx.var(zeta, half) * pole
    return qs + QSeries(ctx, {0: c0}, int(order * Q_DEN))


# ---------------------------------------------------------------------------
# bracket right-hand sides


def rhs_thm1_ubrackoffa(Ns: Sequence[int], ctx: ParamContext, cutoff: int,
                        zetas: Sequence[str] | None = None) -> USeries:
    """``1/2 sum_alpha mu(alpha,1^) sum_{m in Z} u_m^(Mm) prod_j (zeta_j^m + zeta_j^-m)``.

    ``M`` is the sum over blocks of the largest ``N`` in the block; ``u_0 = 1``
    and ``u_{-m} = 1/u_m``.
    """
    l = len(Ns)
    if not 1 <= l <= 6:
        raise DomainError("between 1 and 6 functions are supported")
    zetas = list(zetas or [f"zeta{j}" for j in range(1, l + 1)])
    acc: dict[Partition, LaurentCoeff] = {}
    for alpha in gen_set_partitions(l):
        mu = moebius_top(alpha)
        M = sum(max(Ns[i - 1] for i in block) for block in alpha.blocks)
        mmax = isqrt(cutoff // M)
        for m in range(-mmax, mmax + 1):
            coeff = ctx.const(Fraction(mu, 2))
            for z in zetas:
                coeff = coeff * (ctx.var(z, m) + ctx.var(z, -m))
            lam = Partition({abs(m): M * abs(m)}) if m else EMPTY
            acc[lam] = acc[lam] + coeff if lam in acc else coeff
    return USeries(ctx, acc, cutoff)


NORMALIZATIONS = ("half", "full", "plain")


def rhs_thm2(Ns: Sequence[int], n: int, ctx: ParamContext, order: int,
             zetas: Sequence[str] | None = None, rhos: Sequence[str] | None = None,
             norm: str = "plain") -> QSeries:
    """Closed form of the connected q-bracket of ``t_{N_1}, ..., t_{N_l}`` and ``n`` copies of ``s``.

    ``sum_alpha mu(alpha,1^) S_alpha`` where, with
    ``c_m = prod_j (zeta_j^m + zeta_j^-m) prod_j (rho_j^m - rho_j^-m) (M m)^n q^(M m^2)``,
    ``S_alpha`` is ``1/2 sum_{m>=1} c_m`` (``half``), ``1/2 sum_{m in Z} c_m``
    (``full``) or ``sum_{m>=1} c_m`` (``plain``).
    """
    if norm not in NORMALIZATIONS:
        raise DomainError(f"norm must be one of {NORMALIZATIONS}")
    l = len(Ns)
    if l < 1 or l + n > 6:
        raise DomainError("need 1 <= l and l + n <= 6")
    zetas = list(zetas or [f"zeta{j}" for j in range(1, l + 1)])
    rhos = list(rhos or [f"rho{j}" for j in range(1, n + 1)])
    total = QSeries(ctx, {}, order * Q_DEN)
    for alpha in gen_set_partitions(l):
        mu = moebius_top(alpha)
        M = sum(max(Ns[i - 1] for i in block) for block in alpha.blocks)
        mmax = isqrt(order // M)
        ms = range(1, mmax + 1) if norm in ("half", "plain") else range(-mmax, mmax + 1)
        weight = Fraction(mu) if norm == "plain" else Fraction(mu, 2)
        terms: dict[int, LaurentCoeff] = {}
        for m in ms:
            c = ctx.const(weight * (M * m) ** n)
            if c.is_zero():
                continue
            for z in zetas:
                c = c * (ctx.var(z, m) + ctx.var(z, -m))
            for r in rhos:
                c = c * (ctx.var(r, m) - ctx.var(r, -m))
            k = M * m * m * Q_DEN
            terms[k] = terms[k] + c if k in terms else c
        total = total + QSeries(ctx, terms, order * Q_DEN)
    return total


def s_connected_rhs(n: int, ctx: ParamContext, cutoff: int, rhos: Sequence[str] | None = None,
                    porder: int = 12) -> USeries:
    """``(rho/(1-rho) + 1/2) [n = 1] + sum_{m,r>=1} prod_j (rho_j^m - rho_j^-m) r^(n-1) u_m^r``."""
    if not 1 <= n <= 5:
        raise DomainError("1 <= n <= 5")
    rhos = list(rhos or [f"rho{j}" for j in range(1, n + 1)])
    terms: dict[Partition, LaurentCoeff] = {}
    if n == 1:
        r0 = rhos[0]
        terms[EMPTY] = ctx.var(r0) * expand_rational_param("geom", ctx, r0, porder - 1) + HALF
    for m in range(1, cutoff + 1):
        base = ctx.one()
        for rj in rhos:
            base = base * (ctx.var(rj, m) - ctx.var(rj, -m))
        for r in range(1, cutoff // m + 1):
            terms[Partition({m: r})] = base.scale(r ** (n - 1))
    return USeries(ctx, terms, cutoff)


# ---------------------------------------------------------------------------
# the t_N (x) shat identity


FALSEMOCK_FIRST = ("zeta*rho", "zeta^-1*rho", "rho", "xi^N")
FALSEMOCK_SECOND = ("xi", "zeta*rho", "zeta^-1*rho")


def parse_monomial(text: str, N: int = 1) -> dict[str, int]:
    """``"zeta^-1*rho"`` -> ``{"zeta": -1, "rho": 1}``; ``^N`` uses the given ``N``."""
    out: dict[str, int] = {}
    for factor in text.split("*"):
        factor = factor.strip()
        if not factor:
            continue
        if "^" in factor:
            name, e = factor.split("^")
            e = N if e == "N" else int(e)
        else:
            name, e = factor, 1
        out[name] = out.get(name, 0) + e
    return {k: v for k, v in out.items() if v}


def _mono(ctx: ParamContext, exps: Mapping[str, int]) -> LaurentCoeff:
    return ctx.mono(1, **exps)


def _theta_like_at(ctx: ParamContext, builder, order: int, image: Mapping[str, int],
                   base: int) -> QSeries:
    aux = ParamContext.of("_a", den=1)
    return builder(aux, order, "_a", base).substitute(ctx, {"_a": dict(image)})


def rhs_falsemock_literal(N: int, ctx: ParamContext, order: int, arg_map: tuple[str, str],
                          porder: int = 40) -> QSeries:
    """The direct f_N(Nz, z) - f_N(0, z) combination.

    ``1/(2(xi-1))`` times the Theta*-block (base ``q``) and T*-block (base
    ``q^N``), plus ``f_N(a, b) - f_N(0, b)`` where ``e^(2 pi i a), e^(2 pi i b)``
    are the monomials named by ``arg_map``.
    """
    X = {"zeta": 1, "rho": 1}
    Y = {"zeta": -1, "rho": 1}

    def shifted(img, k):
        out = dict(img)
        out["xi"] = out.get("xi", 0) + k
        return out

    th = lambda img: _theta_like_at(ctx, build_theta_star, order, img, 1)
    ts = lambda img: _theta_like_at(ctx, build_T_star, order, img, N)
    block = (th(shifted(X, N)) + th(shifted(Y, N)) - th(shifted(X, -N)) - th(shifted(Y, -N))
             + ts(shifted(X, N)) + ts(shifted(Y, N)) + ts(shifted(X, -N)) + ts(shifted(Y, -N))
             - ts(X).scale(2) - ts(Y).scale(2))
    pref = -expand_rational_param("geom", ctx, "xi", porder).scale(HALF)
    first = parse_monomial(arg_map[0], N)
    second = parse_monomial(arg_map[1], N)
    return block * pref + f_N_difference(ctx, N, order, first, second)


def rhs_falsemock(N: int, ctx: ParamContext, order: int, porder: int = 40) -> QSeries:
    """Corrected closed form of the connected q-bracket of ``t_N`` and ``shat``.

    ``sum_{X in {zeta rho, zeta^-1 rho}} [Theta*(X xi^N; q^N) - Theta*(X; q^N)]/(xi - 1)
    + f_N(X xi^N, xi) - f_N(X, xi)``.
    """
    total = QSeries(ctx, {}, order * Q_DEN)
    inv = -expand_rational_param("geom", ctx, "xi", porder)
    for X in ({"zeta": 1, "rho": 1}, {"zeta": -1, "rho": 1}):
        Xs = dict(X, xi=N)
        diff = (_theta_like_at(ctx, build_theta_star, order, Xs, N)
                - _theta_like_at(ctx, build_theta_star, order, X, N))
        total = total + diff * inv + f_N_difference(ctx, N, order, Xs, {"xi": 1}, X)
    return total


# ---------------------------------------------------------------------------
# w-expansion of F


def F_w_coefficients(n: int, order: int, region: str = "gt1", porder: int = 12):
    """Two routes to ``(n-1)! [W^(n-1)] F`` with ``xi = e^W``, over the context ``(zeta,)``.

    Returns ``(closed_form, via_expansion)``.
    """
    if not 1 <= n <= 8:
        raise DomainError("1 <= n <= 8")
    zc = ParamContext(("zeta",), (1,))
    fact = factorial(n - 1)
    # closed form
    acc: dict = {}
    for m in range(1, order + 1):
        for r in range(1, order // m + 1):
            _add(acc, m * r, zc.key({"zeta": m}), -r ** (n - 1))
            _add(acc, m * r, zc.key({"zeta": -m}), -(-1) ** n * r ** (n - 1))
    c0 = zc.const(bernoulli(n) / n)
    if n == 1:
        c0 = c0 + 1 + inv_p_minus_one(zc, "zeta", porder, region)
    closed = _qs(zc, acc, order) + QSeries(zc, {0: c0}, order * Q_DEN)
    # expansion route
    fc = ParamContext(("zeta", "xi"), (1, 1))
    F = build_F(fc, order, region={"zeta": region, "xi": "gt1"}, porder=porder)
    terms = {}
    for k, c in F.terms.items():
        if k == 0:
            continue
        w = w_expand_coeff(c, xi="xi", w="W", order_w=n - 1)
        terms[k] = coefficient_in(w, "W", n - 1).scale(fact)
    z, x = fc.var("zeta"), fc.var("xi")
    laurent = w_expand_rational(z * x - 1, x - 1, xi="xi", w="W", order_w=n - 1)
    head = coefficient_in(laurent, "W", n - 1).scale(fact) * inv_p_minus_one(zc, "zeta", porder,
                                                                           region)
    terms[0] = head
    via = QSeries(zc, terms, order * Q_DEN)
    return closed, via


# ---------------------------------------------------------------------------
# products of F against the multiple sign sum


def _F_pair(ctx: ParamContext, order: int, X: str, Y: str, porder: int) -> QSeries:
    """``F(X, Y)`` expanded for ``|X| < 1`` and ``|Y| > 1``."""
    return build_F(ctx, order, X, Y, region={"zeta": "lt1", "xi": "gt1"}, porder=porder)


def build_F_n(n: int, order: int, box: int = 6):
    """Sign-weighted multiple sum and the product of F's, in matched coordinates.

    The monomial of index ``(m, r)`` is ``prod_j x_j^(m_j) y_j^(r_j)``.  The sum is
    rewritten through the unimodular change ``a_j = m_j - m_{j+1}``,
    ``b_j = r_1 + ... + r_j`` so that the j-th sign factor depends on ``(a_j, b_j)``
    only and the product side is ``prod_j F(X_j, Y_j)`` with ``X_j, Y_j``
    independent formal parameters.  Coefficients are compared on the box
    ``|a_j|, |b_j| <= box``.  Returns ``(lhs, rhs)``.
    """
    if n not in (1, 2):
        raise DomainError("n must be 1 or 2")
    names = []
    for j in range(1, n + 1):
        names += [f"X{j}", f"Y{j}"]
    ctx = ParamContext(tuple(names), (1,) * len(names))
    acc: dict = {}
    rng = range(-box, box + 1)
    for ab in product(rng, repeat=2 * n):
        a = ab[0::2]
        b = ab[1::2]
        # recover m_j, r_j
        m = [0] * (n + 1)
        for j in range(n - 1, -1, -1):
            m[j] = a[j] + m[j + 1]
        r = [b[0]] + [b[j] - b[j - 1] for j in range(1, n)]
        qe = sum(m[j] * r[j] for j in range(n))
        if qe < 0 or qe > order:
            continue
        w = Fraction(1)
        for j in range(n):
            w *= _sgn(m[j] - m[j + 1] - HALF) + _sgn(sum(r[: j + 1]) + HALF)
        if not w:
            continue
        w /= (-2) ** n
        _add(acc, qe, ctx.key({f"X{j+1}": a[j] for j in range(n)} |
                              {f"Y{j+1}": b[j] for j in range(n)}), w)
    lhs = _qs(ctx, acc, order)
    boxw = tuple((-box, box) for _ in names)
    lhs = lhs.map_coeffs(lambda c: LaurentCoeff(ctx, c.terms, boxw))
    rhs = None
    for j in range(1, n + 1):
        f = _F_pair(ctx, order, f"X{j}", f"Y{j}", box + 1)
        rhs = f if rhs is None else rhs * f
    return lhs, rhs


def F_n_index_map(n: int):
    """Exponent change from the multiple-sum monomial to the product coordinates.

    ``x_j = z_{2j-1}``, ``y_j = z_{2j}``; the j-th factor is
    ``F(z_1 + z_3 + ... + z_{2j-1}, z_{2j} - z_{2j+2})`` with ``z_{2n+2} = 0``.
    """
    return {"first": [f"z1+...+z{2*j-1}" for j in range(1, n + 1)],
            "second": [f"z{2*j}-z{2*j+2}" if j < n else f"z{2*j}" for j in range(1, n + 1)]}


# ---------------------------------------------------------------------------
# symbolic bridges


def t_psi_bridge(order: int) -> EqualityReport:
    """``T(z;tau) = zeta^(-1/2) q^(1/4) psi(z - tau - 1/2; 2 tau)``.

    ``psi`` is built in ``y = e^(2 pi i (u + 1/2))``; with ``u = z - tau - 1/2``
    we have ``y = zeta q^-1``.  ``psi`` is built to ``q'``-order ``order + 2``:
    a dropped term has ``n^2 > 2 order + 4`` hence ``|n| > 2`` and lands at
    ``n^2 - n + 1/4 > n^2/2 > order``.
    """
    if order > 40:
        raise DomainError("order <= 40")
    ctx = ParamContext(("zeta",), (2,))
    psi = build_psi(ctx, order + 2, "zeta").dilate(2)
    shifted = twist(psi, "zeta", "zeta", -1, order + 1)
    rhs = (shifted * QSeries(ctx, {6: ctx.var("zeta", Fraction(-1, 2))})).truncate(order)
    lhs = build_T_star(ctx, order, "zeta")
    return series_equal(lhs, rhs, order=order)


def theta_bridge(order: int) -> EqualityReport:
    """``Theta(z;tau) = zeta^(1/2) q^(1/8) vartheta(z - 1/2 + tau/2; tau)``.

    ``vartheta`` is built in ``y = e^(2 pi i (u + 1/2)) = zeta q^(1/2)``; built to
    order ``2 order + 4`` every dropped term lands above ``order``.
    """
    ctx = ParamContext(("zeta",), (2,))
    th = build_jacobi_theta(ctx, 2 * order + 4, "zeta")
    shifted = twist(th, "zeta", "zeta", HALF, order + 1)
    rhs = (shifted * QSeries(ctx, {3: ctx.var("zeta", HALF)})).truncate(order)
    lhs = build_big_theta(ctx, order, "zeta")
    return series_equal(lhs, rhs, order=order)


def fN_as_appell(N: int, order: int, porder: int = 12) -> EqualityReport:
    """``f_N(z, w) = xi^-N A_{2N}(w, z - N tau)`` for ``1 < |xi| < |q|^-1``.

    ``A_{2N}`` is expanded with its first variable ``xi`` and second ``zeta``,
    built to order ``2 order + 2``; the shift ``zeta -> zeta q^-N`` lowers a
    dropped ``m >= 1`` term by ``N m``, which is at most half its exponent.
    """
    if order > 32:
        raise DomainError("order <= 32")
    ctx = ParamContext(("zeta", "xi"), (1, 2))
    A = build_appell(ctx, 2 * N, 2 * order + 2, zeta="xi", xi="zeta", region0="gt1",
                     porder=porder + N)
    shifted = twist(A, "zeta", "zeta", -N, order)
    rhs = shifted * QSeries(ctx, {0: ctx.var("xi", -N)})
    lhs = build_f_N(ctx, N, order, "zeta", "xi", xi_order=porder)
    return series_equal(lhs, rhs, order=order)


# ---------------------------------------------------------------------------
# JSON form specs


FORMS = ("A_N", "B", "F", "theta_star", "T_star", "jacobi_theta", "big_theta", "psi_false",
         "f_N", "appell_A_ell", "F_n")


@dataclass
class FormSpec:
    which: str
    N: int = 1
    ell: int = 1
    n: int = 1
    order: int = 8
    base: int = 1
    porder: int = 12
    bindings: dict[str, str] = field(default_factory=dict)
    region: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if self.which not in FORMS:
            raise DomainError(f"unknown form {self.which!r}; expected one of {FORMS}")
        if self.order < 0:
            raise DomainError("order must be non-negative")
        vals = list(self.bindings.values())
        if len(vals) != len(set(vals)):
            raise DomainError("bindings must name distinct parameters")

    @classmethod
    def from_json(cls, text: str, **overrides) -> "FormSpec":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise DomainError("form spec must be a JSON object")
        data.update({k: v for k, v in overrides.items() if v is not None})
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise DomainError(f"unknown form spec fields {sorted(unknown)}")
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def name(self, role: str) -> str:
        return self.bindings.get(role, role)


def build(spec: FormSpec) -> QSeries:
    _check_order(spec.order)
    o = spec.order
    w = spec.which
    if w == "A_N":
        z = spec.name("zeta")
        return build_A_N(ParamContext((z,), (1,)), spec.N, o, z)
    if w == "B":
        r = spec.name("rho")
        return build_B(ParamContext((r,), (1,)), o, r, spec.porder)
    if w == "F":
        z, x = spec.name("zeta"), spec.name("xi")
        for flag in spec.region.values():
            if flag not in ("lt1", "gt1"):
                raise DomainError(f"unknown region flag {flag!r}")
        return build_F(ParamContext((z, x), (1, 1)), o, z, x, spec.region, spec.porder)
    if w == "theta_star":
        z = spec.name("zeta")
        return build_theta_star(ParamContext((z,), (1,)), o, z, spec.base)
    if w == "T_star":
        z = spec.name("zeta")
        return build_T_star(ParamContext((z,), (1,)), o, z, spec.base)
    if w == "jacobi_theta":
        y = spec.name("y")
        return build_jacobi_theta(ParamContext((y,), (2,)), o, y)
    if w == "big_theta":
        z = spec.name("zeta")
        return build_big_theta(ParamContext((z,), (1,)), o, z)
    if w == "psi_false":
        y = spec.name("y")
        return build_psi(ParamContext((y,), (2,)), o, y)
    if w == "f_N":
        z, x = spec.name("zeta"), spec.name("xi")
        return build_f_N(ParamContext((z, x), (1, 1)), spec.N, o, z, x, spec.porder)
    if w == "appell_A_ell":
        z, x = spec.name("zeta"), spec.name("xi")
        region0 = spec.region.get("zeta", "lt1")
        return build_appell(ParamContext((z, x), (2, 1)), spec.ell, o, z, x, region0, spec.porder)
    if w == "F_n":
        lhs, _ = build_F_n(spec.n, o)
        return lhs
    raise DomainError(w)
