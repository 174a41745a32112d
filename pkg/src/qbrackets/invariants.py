"""Functions on partitions and the discrete calculus on multiplicity sequences.

A :class:`PartitionFn` maps partitions to :class:`LaurentCoeff` values; a
:class:`NatSeq` is a finite table ``g(0), ..., g(length)``.  The kernel
``g_[n]`` is the set-partition sum of convolutions of discrete derivatives
that computes connected brackets of functions depending on one multiplicity.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Callable, Sequence

from .algebra import (EqualityReport, LaurentCoeff, ParamContext, expand_rational_param,
                      series_equal, w_expand_coeff, w_expand_rational)
from .partitions import Partition
from .setpartitions import gen_set_partitions, moebius_top


class DomainError(ValueError):
    pass


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli numbers with ``B_1 = -1/2``."""
    if n < 0:
        raise DomainError("n must be non-negative")
    b = [Fraction(1)]
    for m in range(1, n + 1):
        b.append(-sum(comb(m + 1, k) * b[k] for k in range(m)) / (m + 1))
    return b[n]


# ---------------------------------------------------------------------------
# functions on partitions


class PartitionFn:
    """A parameter-valued function on partitions, memoised per partition."""

    __slots__ = ("ctx", "fn", "tag", "_cache")

    def __init__(self, ctx: ParamContext, fn: Callable[[Partition], LaurentCoeff], tag: str = "f"):
        self.ctx = ctx
        self.fn = fn
        self.tag = tag
        self._cache: dict[Partition, LaurentCoeff] = {}

    def __call__(self, lam: Partition) -> LaurentCoeff:
        v = self._cache.get(lam)
        if v is None:
            v = self.fn(lam)
            if not isinstance(v, LaurentCoeff):
                v = self.ctx.const(v)
            self._cache[lam] = v
        return v

    def __mul__(self, other: "PartitionFn") -> "PartitionFn":
        if isinstance(other, (int, Fraction)):
            return PartitionFn(self.ctx, lambda lam: self(lam).scale(other), f"{other}*{self.tag}")
        return PartitionFn(self.ctx, lambda lam: self(lam) * other(lam), f"{self.tag}*{other.tag}")

    __rmul__ = __mul__

    def __add__(self, other: "PartitionFn") -> "PartitionFn":
        if isinstance(other, (int, Fraction)):
            return PartitionFn(self.ctx, lambda lam: self(lam) + other, f"{self.tag}+{other}")
        return PartitionFn(self.ctx, lambda lam: self(lam) + other(lam), f"{self.tag}+{other.tag}")

    def __repr__(self):
        return f"PartitionFn({self.tag})"


def pointwise_product(fs: Sequence[PartitionFn]) -> PartitionFn:
    if not fs:
        raise ValueError("empty product")
    out = fs[0]
    for f in fs[1:]:
        out = out * f
    return out


def constant_fn(ctx: ParamContext, c=1) -> PartitionFn:
    v = c if isinstance(c, LaurentCoeff) else ctx.const(c)
    return PartitionFn(ctx, lambda lam: v, str(c))


def length_fn(ctx: ParamContext) -> PartitionFn:
    return PartitionFn(ctx, lambda lam: ctx.const(lam.length), "length")


def multiplicity_fn(ctx: ParamContext, m: int) -> PartitionFn:
    return PartitionFn(ctx, lambda lam: ctx.const(lam.r(m)), f"r_{m}")


def S_k(k: int, ctx: ParamContext | None = None) -> PartitionFn:
    """``-B_k/(2k) + sum_j lambda_j^(k-1)`` for even ``k >= 2``."""
    if k < 2 or k % 2:
        raise DomainError("S_k needs an even k >= 2")
    ctx = ctx or ParamContext(())
    c0 = -bernoulli(k) / (2 * k)
    return PartitionFn(ctx, lambda lam: ctx.const(c0 + sum(p ** (k - 1) for p in lam.parts)),
                       f"S_{k}")


def Q_k(k: int, ctx: ParamContext | None = None) -> PartitionFn:
    """Shifted symmetric power sum; the j-sum stops at the length since later terms cancel."""
    if k < 2:
        raise DomainError("Q_k needs k >= 2")
    ctx = ctx or ParamContext(())
    c0 = -(1 - Fraction(1, 2 ** (k - 1))) * bernoulli(k) / k
    half = Fraction(1, 2)

    def value(lam: Partition):
        total = c0
        for j, p in enumerate(lam.parts, start=1):
            total += (p - j + half) ** (k - 1) - (-j + half) ** (k - 1)
        return ctx.const(total)

    return PartitionFn(ctx, value, f"Q_{k}")


def t_N(N: int, ctx: ParamContext, zeta: str = "zeta") -> PartitionFn:
    """``1 + sum_m (zeta^m + zeta^-m) [r_m >= N m]``."""
    if N < 1:
        raise DomainError("N must be positive")

    def value(lam: Partition):
        terms = {ctx.key({}): Fraction(1)}
        for m, r in lam.mult:
            if r >= N * m:
                for e in (m, -m):
                    k = ctx.key({zeta: e})
                    terms[k] = terms.get(k, 0) + 1
        return LaurentCoeff(ctx, terms)

    return PartitionFn(ctx, value, f"t_{N}({zeta})")


def s_constant(ctx: ParamContext, rho: str, order: int) -> LaurentCoeff:
    """``rho/(1-rho) + 1/2`` expanded for ``|rho| < 1``."""
    return ctx.var(rho) * expand_rational_param("geom", ctx, rho, order - 1) + Fraction(1, 2)


def s_fn(ctx: ParamContext, rho: str = "rho", order: int = 12) -> PartitionFn:
    """``rho/(1-rho) + 1/2 + sum_m (rho^m - rho^-m) r_m``; the prefactor is valid to ``rho^order``."""
    const = s_constant(ctx, rho, order)

    def value(lam: Partition):
        terms = {}
        for m, r in lam.mult:
            terms[ctx.key({rho: m})] = Fraction(r)
            terms[ctx.key({rho: -m})] = Fraction(-r)
        return const + LaurentCoeff(ctx, terms)

    return PartitionFn(ctx, value, f"s({rho})")


def shat_constant(ctx: ParamContext, rho: str, xi: str, order: int) -> LaurentCoeff:
    """``1/(1-rho) + xi/(1-xi)`` expanded for ``|rho|, |xi| < 1``."""
    return (expand_rational_param("geom", ctx, rho, order)
            + ctx.var(xi) * expand_rational_param("geom", ctx, xi, order - 1))


def shat_fn(ctx: ParamContext, rho: str = "rho", xi: str = "xi", order: int = 12) -> PartitionFn:
    const = shat_constant(ctx, rho, xi, order)

    def value(lam: Partition):
        terms = {}
        for m, r in lam.mult:
            for j in range(1, r + 1):
                terms[ctx.key({rho: m, xi: j})] = Fraction(1)
                terms[ctx.key({rho: -m, xi: -j})] = Fraction(-1)
        return const + LaurentCoeff(ctx, terms)

    return PartitionFn(ctx, value, f"shat({rho},{xi})")


def sgenser_check(lam: Partition, order: int) -> EqualityReport:
    """Compare ``s(e^z; lam)`` with ``-1/z + 2 sum_k S_k(lam) z^(k-1)/(k-1)!`` through ``z^order``."""
    if order > 12:
        raise DomainError("order must be <= 12")
    ctx = ParamContext(("rho",), (1,))
    rho = ctx.var("rho")
    pole = w_expand_rational(rho, 1 - rho, xi="rho", w="z", order_w=order)
    poly = ctx.zero()
    for m, r in lam.mult:
        poly = poly + (ctx.var("rho", m) - ctx.var("rho", -m)).scale(r)
    lhs = pole + w_expand_coeff(poly, xi="rho", w="z", order_w=order) + Fraction(1, 2)
    zc = lhs.ctx
    rhs_terms = {(-1,): Fraction(-1)}
    for k in range(2, order + 2, 2):
        v = S_k(k)(lam).constant_term()
        rhs_terms[(k - 1,)] = 2 * v / factorial(k - 1)
    rhs = LaurentCoeff(zc, rhs_terms, ((-float("inf"), order),))
    return series_equal(lhs, rhs)


# ---------------------------------------------------------------------------
# sequences on N_0


@dataclass(frozen=True)
class NatSeq:
    """Values ``g(0..length)`` in a common parameter context."""

    ctx: ParamContext
    values: tuple[LaurentCoeff, ...]
    tag: str = field(default="g", compare=False)

    @classmethod
    def from_fn(cls, ctx: ParamContext, fn: Callable[[int], object], length: int,
                tag: str = "g") -> "NatSeq":
        vals = []
        for r in range(length + 1):
            v = fn(r)
            vals.append(v if isinstance(v, LaurentCoeff) else ctx.const(v))
        return cls(ctx, tuple(vals), tag)

    @property
    def length(self) -> int:
        return len(self.values) - 1

    def __call__(self, r: int) -> LaurentCoeff:
        if not 0 <= r <= self.length:
            raise IndexError(f"{self.tag} is only known on 0..{self.length}")
        return self.values[r]

    def __mul__(self, other: "NatSeq") -> "NatSeq":
        n = min(self.length, other.length)
        return NatSeq(self.ctx, tuple(self.values[r] * other.values[r] for r in range(n + 1)),
                      f"{self.tag}{other.tag}")

    def __sub__(self, other: "NatSeq") -> "NatSeq":
        n = min(self.length, other.length)
        return NatSeq(self.ctx, tuple(self.values[r] - other.values[r] for r in range(n + 1)),
                      f"({self.tag}-{other.tag})")

    def shift_to_zero(self) -> "NatSeq":
        """``g - g(0)``; connected brackets do not see constants."""
        c = self.values[0]
        return NatSeq(self.ctx, tuple(v - c for v in self.values), self.tag)


def identity_seq(ctx: ParamContext, length: int) -> NatSeq:
    return NatSeq.from_fn(ctx, lambda r: r, length, "id")


def kernel_D(N: int, m: int, length: int, ctx: ParamContext | None = None) -> NatSeq:
    """``D_{N,m}(r) = [r >= N m]``."""
    if N < 1 or m < 1:
        raise DomainError("N and m must be positive")
    ctx = ctx or ParamContext(())
    return NatSeq.from_fn(ctx, lambda r: int(r >= N * m), length, f"D{N},{m}")


def kernel_X(ctx: ParamContext, xi: str, length: int) -> NatSeq:
    """``X_xi(r) = xi + ... + xi^r``, ``X_xi(0) = 0``."""
    vals = [ctx.zero()]
    for r in range(1, length + 1):
        vals.append(vals[-1] + ctx.var(xi, r))
    return NatSeq(ctx, tuple(vals), f"X{xi}")


def discrete_derivative(g: NatSeq) -> NatSeq:
    """``dg(1) = g(1)``, ``dg(n) = g(n) - g(n-1)`` for ``n >= 2``; ``dg(0) := 0``."""
    vals = [g.ctx.zero()]
    for n in range(1, g.length + 1):
        vals.append(g.values[1] if n == 1 else g.values[n] - g.values[n - 1])
    return NatSeq(g.ctx, tuple(vals), f"d{g.tag}")


def discrete_convolution(g: NatSeq, h: NatSeq) -> NatSeq:
    """``(g*h)(n) = sum_{j=1}^{n-1} g(j) h(n-j)``; value 0 at ``n = 0, 1``."""
    if g.ctx != h.ctx:
        raise ValueError("contexts differ")
    n_max = min(g.length, h.length)
    vals = []
    for n in range(n_max + 1):
        acc = g.ctx.zero()
        for j in range(1, n):
            a, b = g.values[j], h.values[n - j]
            if a.terms and b.terms:
                acc = acc + a * b
        vals.append(acc)
    return NatSeq(g.ctx, tuple(vals), f"({g.tag}*{h.tag})")


def connected_kernel(gs: Sequence[NatSeq]) -> NatSeq:
    """``g_[n] = sum_alpha mu(alpha, 1^) conv_{A in alpha} d(g_A)``."""
    n = len(gs)
    if not 1 <= n <= 7:
        raise DomainError("connected_kernel handles 1 <= n <= 7 sequences")
    ctx = gs[0].ctx
    length = min(g.length for g in gs)
    deriv_cache: dict[tuple[int, ...], NatSeq] = {}

    def d_block(block):
        if block not in deriv_cache:
            prod = gs[block[0] - 1]
            for i in block[1:]:
                prod = prod * gs[i - 1]
            deriv_cache[block] = discrete_derivative(prod)
        return deriv_cache[block]

    total = [ctx.zero()] * (length + 1)
    for alpha in gen_set_partitions(n):
        mu = moebius_top(alpha)
        conv = d_block(alpha.blocks[0])
        for block in alpha.blocks[1:]:
            conv = discrete_convolution(conv, d_block(block))
        for r in range(length + 1):
            if conv.values[r].terms:
                total[r] = total[r] + conv.values[r].scale(mu)
    return NatSeq(ctx, tuple(total), f"g[{n}]")


def of_multiplicity(g: NatSeq, m: int) -> PartitionFn:
    """``lambda -> g(r_m(lambda))``."""
    return PartitionFn(g.ctx, lambda lam: g(lam.r(m)), f"{g.tag}(r_{m})")
