"""q-brackets, u-brackets, connected brackets and the inverse map Phi."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .algebra import (INF, Q_DEN, LaurentCoeff, ParamContext, QSeries, TruncationError, USeries,
                      series_equal, substitute_u_to_q, useries_mul)
from .invariants import (NatSeq, PartitionFn, connected_kernel, pointwise_product)
from .partitions import (EMPTY, Partition, gen_partitions, moebius_partition, partitions_upto,
                         sub_partitions)
from .setpartitions import SetPartition, gen_set_partitions, moebius_sp, moebius_top, refinements

MAX_CUTOFF = 30


class RangeError(ValueError):
    pass


@dataclass(frozen=True)
class BracketContext:
    ctx: ParamContext
    cutoff: int

    def __post_init__(self):
        if not 0 <= self.cutoff <= MAX_CUTOFF:
            raise RangeError(f"cutoff must lie in 0..{MAX_CUTOFF}")

    @property
    def q_order(self) -> int:
        return self.cutoff


def _strict_partitions(cutoff: int) -> list[tuple[Partition, int]]:
    out = []
    for lam in partitions_upto(cutoff):
        mu = moebius_partition(lam)
        if mu:
            out.append((lam, mu))
    return out


def _accumulate(ctx, acc_terms, acc_window, key, coeff: LaurentCoeff, sign: int):
    d = acc_terms.setdefault(key, {})
    for k, v in coeff.terms.items():
        nv = d.get(k, 0) + (v if sign > 0 else -v)
        if nv:
            d[k] = nv
        else:
            d.pop(k, None)
    w = acc_window.get(key)
    acc_window[key] = coeff.window if w is None else tuple(
        (max(a[0], b[0]), min(a[1], b[1])) for a, b in zip(w, coeff.window))


def u_bracket(f: PartitionFn, bc: BracketContext) -> USeries:
    """``(sum f(lambda) u_lambda) * (sum mu(lambda) u_lambda)`` truncated at the cutoff."""
    ctx = bc.ctx
    strict = _strict_partitions(bc.cutoff)
    terms: dict[Partition, dict] = {}
    windows: dict[Partition, tuple] = {}
    for lam in partitions_upto(bc.cutoff):
        v = f(lam)
        if not v.terms and v.is_exact():
            continue
        room = bc.cutoff - lam.size
        for nu, mu in strict:
            if nu.size > room:
                break
            _accumulate(ctx, terms, windows, lam.union(nu), v, mu)
    out = {lam: LaurentCoeff(ctx, t, windows[lam]) for lam, t in terms.items()}
    return USeries(ctx, out, bc.cutoff)


def _pentagonal(ctx: ParamContext, cutoff: int) -> QSeries:
    coeffs: dict[int, int] = {}
    for lam, mu in _strict_partitions(cutoff):
        coeffs[lam.size] = coeffs.get(lam.size, 0) + mu
    return QSeries(ctx, {n * Q_DEN: ctx.const(c) for n, c in coeffs.items() if c}, cutoff * Q_DEN)


def q_bracket_direct(f: PartitionFn, bc: BracketContext) -> QSeries:
    """Numerator grouped by size, times ``prod (1 - q^m)`` (the Moebius-weighted series)."""
    ctx = bc.ctx
    num: dict[int, LaurentCoeff] = {}
    for n in range(bc.cutoff + 1):
        acc = None
        for lam in gen_partitions(n):
            v = f(lam)
            acc = v if acc is None else acc + v
        num[n * Q_DEN] = acc
    return QSeries(ctx, num, bc.cutoff * Q_DEN) * _pentagonal(ctx, bc.cutoff)


def q_bracket(f: PartitionFn, bc: BracketContext, cross_check: bool = False) -> QSeries:
    """``<f>_q``.  With ``cross_check`` both routes are computed and must agree."""
    direct = q_bracket_direct(f, bc)
    if cross_check:
        via_u = substitute_u_to_q(u_bracket(f, bc))
        rep = series_equal(direct, via_u)
        if not rep:
            raise AssertionError(f"q-bracket routes disagree: {rep.as_dict()}")
    return direct


def _subset_products(fs: Sequence[PartitionFn]):
    cache: dict[tuple[int, ...], PartitionFn] = {}

    def get(block: tuple[int, ...]) -> PartitionFn:
        if block not in cache:
            cache[block] = pointwise_product([fs[i - 1] for i in block])
        return cache[block]

    return get


def _connected(fs, bracket, one, mul):
    l = len(fs)
    if not 1 <= l <= 7:
        raise RangeError("connected brackets handle 1..7 functions")
    block_fn = _subset_products(fs)
    brackets: dict[tuple[int, ...], object] = {}
    total = None
    for alpha in gen_set_partitions(l):
        prod = None
        for block in alpha.blocks:
            if block not in brackets:
                brackets[block] = bracket(block_fn(block))
            prod = brackets[block] if prod is None else mul(prod, brackets[block])
        term = prod.scale(moebius_top(alpha))
        total = term if total is None else total + term
    return total


def connected_u_bracket(fs: Sequence[PartitionFn], bc: BracketContext) -> USeries:
    return _connected(fs, lambda f: u_bracket(f, bc), None, useries_mul)


def connected_q_bracket(fs: Sequence[PartitionFn], bc: BracketContext) -> QSeries:
    return _connected(fs, lambda f: q_bracket(f, bc), None, lambda a, b: a * b)


def products_via_connected(fs: Sequence[PartitionFn], alpha: SetPartition, bc: BracketContext,
                           domain: str = "u"):
    """Both sides of the inversion ``prod_{A in alpha} <f_A> = sum_{beta<=alpha} prod_B <(x)f_b>``."""
    bracket = (lambda f: u_bracket(f, bc)) if domain == "u" else (lambda f: q_bracket(f, bc))
    mul = useries_mul if domain == "u" else (lambda a, b: a * b)
    conn = (lambda sub: connected_u_bracket(sub, bc)) if domain == "u" else \
        (lambda sub: connected_q_bracket(sub, bc))
    block_fn = _subset_products(fs)
    lhs = None
    for block in alpha.blocks:
        b = bracket(block_fn(block))
        lhs = b if lhs is None else mul(lhs, b)
    memo: dict[tuple[int, ...], object] = {}
    rhs = None
    for beta in refinements(alpha):
        prod = None
        for block in beta.blocks:
            if block not in memo:
                memo[block] = conn([fs[i - 1] for i in block])
            prod = memo[block] if prod is None else mul(prod, memo[block])
        rhs = prod if rhs is None else rhs + prod
    return lhs, rhs


def connected_via_moebius(fs: Sequence[PartitionFn], beta: SetPartition, bc: BracketContext,
                          domain: str = "u"):
    """``prod_{B in beta} <(x)f_b> = sum_{alpha<=beta} mu(alpha,beta) prod_A <f_A>`` (right side)."""
    bracket = (lambda f: u_bracket(f, bc)) if domain == "u" else (lambda f: q_bracket(f, bc))
    mul = useries_mul if domain == "u" else (lambda a, b: a * b)
    block_fn = _subset_products(fs)
    memo: dict[tuple[int, ...], object] = {}
    total = None
    for alpha in refinements(beta):
        prod = None
        for block in alpha.blocks:
            if block not in memo:
                memo[block] = bracket(block_fn(block))
            prod = memo[block] if prod is None else mul(prod, memo[block])
        term = prod.scale(moebius_sp(alpha, beta))
        total = term if total is None else total + term
    return total


class PhiInverse(PartitionFn):
    """``Phi(G)(lambda) = sum over sub-multisets nu of lambda of g(nu)``.

    Evaluated by a running sum over multiplicities, memoised per partition.
    """

    __slots__ = ("series",)

    def __init__(self, series: USeries):
        self.series = series
        super().__init__(series.ctx, self._eval, "Phi")

    def _eval(self, lam: Partition) -> LaurentCoeff:
        if lam.size > self.series.cutoff:
            raise RangeError(f"{lam} lies beyond the cutoff {self.series.cutoff}")
        if not lam.mult:
            return self.series.coefficient(EMPTY)
        # peel one part of the largest size: f(lam) = f(lam - m) + sum over nu with r_m(nu) = r_m(lam)
        (m, r), rest = lam.mult[0], lam.mult[1:]
        smaller = Partition(((m, r - 1),) + rest)
        return self(smaller) + self._top_slice(m, r, Partition(rest))

    def _top_slice(self, m: int, r: int, rest: Partition) -> LaurentCoeff:
        # sum of g(nu) over sub-multisets nu of (m^r) u rest with r_m(nu) = r exactly
        total = self.ctx.zero()
        top = Partition({m: r})
        for nu in _sub_multisets(rest):
            c = self.series.terms.get(top.union(nu))
            if c is not None:
                total = total + c
        return total


def _sub_multisets(lam: Partition):
    return sub_partitions(lam)


def phi_inverse(G: USeries) -> PhiInverse:
    return PhiInverse(G)


def connected_via_multiplicities(gs: Sequence[NatSeq], ms: Sequence[int], bc: BracketContext,
                                 shortcut: bool = False) -> USeries:
    """Connected u-bracket of ``lambda -> g_j(r_{m_j}(lambda))``.

    Constants are removed first (``g_j - g_j(0)``), since they do not contribute
    to connected brackets with two or more entries and contribute ``g(0)`` when
    there is one entry.  With ``shortcut`` the last sequence must be the
    identity and ``sum_r r g_[n-1](r) u_m^r`` is used instead of ``g_[n]``.
    """
    n = len(gs)
    if n != len(ms) or not 1 <= n <= 7:
        raise RangeError("need 1..7 sequences with matching part sizes")
    ctx = bc.ctx
    if len(set(ms)) > 1:
        return USeries(ctx, {}, bc.cutoff)
    m = ms[0]
    rmax = bc.cutoff // m
    for g in gs:
        if g.length < rmax:
            raise TruncationError(f"sequence {g.tag} is too short for cutoff {bc.cutoff}")
    shifted = [g.shift_to_zero() for g in gs]
    terms: dict[Partition, LaurentCoeff] = {}
    if n == 1:
        terms[EMPTY] = gs[0].values[0]
    if shortcut:
        last = gs[-1]
        if any(last.values[r] != ctx.const(r) for r in range(last.length + 1)):
            raise ValueError("shortcut requires the identity as last sequence")
        if n == 1:
            raise ValueError("the shortcut needs at least two sequences")
        kern = connected_kernel(shifted[:-1])
        for r in range(1, rmax + 1):
            v = kern.values[r].scale(r)
            if v.terms:
                terms[Partition({m: r})] = v
    else:
        kern = connected_kernel(shifted)
        for r in range(1, rmax + 1):
            v = kern.values[r]
            if v.terms:
                terms[Partition({m: r})] = v
    return USeries(ctx, terms, bc.cutoff)
