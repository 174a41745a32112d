"""Exact truncated series arithmetic over the rationals.

Three domains are provided:

* :class:`LaurentCoeff` -- Laurent polynomials in named parameters (zeta, rho,
  xi, W, ...) with rational exponents of bounded denominator.  Expansions of
  rational functions such as ``1/(1-rho)`` are stored truncated, together with
  a per-parameter *window* of exponents on which the stored coefficients are
  guaranteed to agree with the true series.
* :class:`QSeries` -- series in ``q`` with exponents in ``(1/24)Z``, truncated
  at an order, with :class:`LaurentCoeff` coefficients.
* :class:`USeries` -- series in the monomials ``u_lambda`` indexed by
  partitions, truncated at a maximal partition size.

Window rule
-----------
Truncation error in a parameter ``p`` is assumed to sit strictly beyond the
window in ``p`` on the truncated side, while the other side of a truncated
expansion is bounded by its stored support.  Addition intersects windows.
For a product ``a*b`` the guaranteed upper end in ``p`` is

    min(hi_a + low_b, hi_b + low_a),   low_x = min(min stored exponent, hi_x + 1)

and symmetrically for the lower end.  If one factor is truncated from above
and the other from below in the same parameter the cross error terms can land
anywhere, so the window in that parameter becomes empty.  This is the
``q``-order rule ``min(order_a + minexp_b, order_b + minexp_a)`` applied per
parameter; it is conservative but never certifies a wrong coefficient.

Exponents are stored as integers scaled by the parameter's denominator (and by
24 for ``q``).  All values are immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Mapping, Sequence

from .partitions import EMPTY, Partition, partitions_upto, moebius_partition

INF = math.inf
Q_DEN = 24


class ContextError(ValueError):
    """Operands live over different parameter contexts."""


class RepresentationError(ValueError):
    """An exponent does not fit the fixed denominator lattice."""


class TruncationError(ArithmeticError):
    """A requested operation needs more of a series than is known."""


class InconclusiveComparison(Exception):
    """Two series share no window on which they can be compared."""


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def _scale(x, den: int) -> int:
    v = _frac(x) * den
    if v.denominator != 1:
        raise RepresentationError(f"exponent {x} is not a multiple of 1/{den}")
    return v.numerator


def _unscale(v, den: int):
    if v in (INF, -INF):
        return v
    return Fraction(v, den)


def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class ParamContext:
    """Ordered set of formal parameters with their exponent denominators."""

    names: tuple[str, ...]
    dens: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.dens:
            object.__setattr__(self, "dens", (2,) * len(self.names))
        if len(set(self.names)) != len(self.names):
            raise ContextError(f"duplicate parameter names in {self.names}")
        if len(self.dens) != len(self.names) or any(d < 1 for d in self.dens):
            raise ContextError("one positive denominator per parameter is required")

    @classmethod
    def of(cls, *names: str, den: int = 2) -> "ParamContext":
        return cls(tuple(names), (den,) * len(names))

    def __len__(self):
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise ContextError(f"unknown parameter {name!r} in {self.names}") from None

    def den(self, name: str) -> int:
        return self.dens[self.index(name)]

    def extend(self, *names: str, den: int = 2) -> "ParamContext":
        return ParamContext(self.names + names, self.dens + (den,) * len(names))

    def without(self, name: str) -> "ParamContext":
        i = self.index(name)
        return ParamContext(self.names[:i] + self.names[i + 1:], self.dens[:i] + self.dens[i + 1:])

    def key(self, exps: Mapping[str, Any]) -> tuple[int, ...]:
        out = [0] * len(self.names)
        for name, e in exps.items():
            i = self.index(name)
            out[i] = _scale(e, self.dens[i])
        return tuple(out)

    # constructors
    def zero(self) -> "LaurentCoeff":
        return LaurentCoeff(self, {})

    def one(self) -> "LaurentCoeff":
        return self.const(1)

    def const(self, c) -> "LaurentCoeff":
        return LaurentCoeff(self, {(0,) * len(self.names): _frac(c)})

    def mono(self, coef=1, **exps) -> "LaurentCoeff":
        return LaurentCoeff(self, {self.key(exps): _frac(coef)})

    def var(self, name: str, power=1) -> "LaurentCoeff":
        return self.mono(1, **{name: power})


Window = tuple[tuple[float, float], ...]


def _full_window(n: int) -> Window:
    return ((-INF, INF),) * n


class LaurentCoeff:
    """Truncated Laurent polynomial over :class:`ParamContext` with rational coefficients."""

    __slots__ = ("ctx", "terms", "window")

    def __init__(self, ctx: ParamContext, terms: Mapping[tuple[int, ...], Any] | None = None,
                 window: Window | None = None):
        n = len(ctx.names)
        window = _full_window(n) if window is None else tuple(window)
        if len(window) != n:
            raise ContextError("window arity does not match the context")
        bounded = any(lo != -INF or hi != INF for lo, hi in window)
        clean = {}
        for k, c in (terms or {}).items():
            if c == 0:
                continue
            if bounded and not all(lo <= e <= hi for e, (lo, hi) in zip(k, window)):
                continue
            clean[k] = c if isinstance(c, Fraction) else Fraction(c)
        self.ctx = ctx
        self.terms = clean
        self.window = window

    # -- inspection -------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_exact(self) -> bool:
        return all(lo == -INF and hi == INF for lo, hi in self.window)

    def is_constant(self) -> bool:
        zero = (0,) * len(self.ctx.names)
        return all(k == zero for k in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.ctx.names), Fraction(0))

    def window_of(self, name: str) -> tuple:
        i = self.ctx.index(name)
        lo, hi = self.window[i]
        d = self.ctx.dens[i]
        return _unscale(lo, d), _unscale(hi, d)

    def window_empty(self) -> bool:
        return any(lo > hi for lo, hi in self.window)

    def coefficient(self, **exps) -> Fraction:
        return self.terms.get(self.ctx.key(exps), Fraction(0))

    def items(self) -> Iterator[tuple[dict[str, Fraction], Fraction]]:
        for k in sorted(self.terms, reverse=True):
            yield ({n: Fraction(e, d) for n, e, d in zip(self.ctx.names, k, self.ctx.dens) if e},
                   self.terms[k])

    def support_bounds(self, i: int) -> tuple[float, float]:
        if not self.terms:
            return INF, -INF
        vals = [k[i] for k in self.terms]
        return min(vals), max(vals)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "LaurentCoeff":
        if isinstance(other, LaurentCoeff):
            if other.ctx != self.ctx:
                raise ContextError(f"contexts differ: {self.ctx.names} vs {other.ctx.names}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ctx.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms.get(k, 0) + c
        window = tuple((max(a[0], b[0]), min(a[1], b[1])) for a, b in zip(self.window, other.window))
        return LaurentCoeff(self.ctx, terms, window)

    __radd__ = __add__

    def __neg__(self):
        return LaurentCoeff(self.ctx, {k: -c for k, c in self.terms.items()}, self.window)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "LaurentCoeff":
        c = _frac(c)
        if c == 0:
            return LaurentCoeff(self.ctx, {}, self.window)
        return LaurentCoeff(self.ctx, {k: v * c for k, v in self.terms.items()}, self.window)

    def _product_window(self, other: "LaurentCoeff") -> Window:
        out = []
        for i, ((alo, ahi), (blo, bhi)) in enumerate(zip(self.window, other.window)):
            if (ahi != INF and blo != -INF) or (alo != -INF and bhi != INF):
                out.append((INF, -INF))
                continue
            amin, amax = self.support_bounds(i)
            bmin, bmax = other.support_bounds(i)
            low_a, low_b = min(amin, ahi + 1), min(bmin, bhi + 1)
            high_a, high_b = max(amax, alo - 1), max(bmax, blo - 1)
            hi = min(ahi + low_b, bhi + low_a)
            lo = max(alo + high_b, blo + high_a)
            out.append((lo, hi))
        return tuple(out)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_exact() and other.is_constant():
            return self.scale(other.constant_term())
        if self.is_exact() and self.is_constant():
            return other.scale(self.constant_term())
        window = self._product_window(other)
        bounded = any(lo != -INF or hi != INF for lo, hi in window)
        terms: dict[tuple[int, ...], Fraction] = {}
        for ka, ca in self.terms.items():
            for kb, cb in other.terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                if bounded and not all(lo <= e <= hi for e, (lo, hi) in zip(k, window)):
                    continue
                terms[k] = terms.get(k, 0) + ca * cb
        return LaurentCoeff(self.ctx, terms, window)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            if len(self.terms) != 1 or not self.is_exact():
                raise TruncationError("only exact monomials can be inverted")
            (key, c), = self.terms.items()
            return LaurentCoeff(self.ctx, {tuple(-e * -k for e in key): c ** k})
        result = self.ctx.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def restrict(self, **bounds) -> "LaurentCoeff":
        """Intersect the window with ``name=(lo, hi)`` bounds given in real exponents."""
        window = list(self.window)
        for name, (lo, hi) in bounds.items():
            i = self.ctx.index(name)
            d = self.ctx.dens[i]
            slo = -INF if lo == -INF else math.ceil(_frac(lo) * d)
            shi = INF if hi == INF else math.floor(_frac(hi) * d)
            window[i] = (max(window[i][0], slo), min(window[i][1], shi))
        return LaurentCoeff(self.ctx, self.terms, tuple(window))

    def substitute(self, target: ParamContext,
                   images: Mapping[str, Mapping[str, Any]]) -> "LaurentCoeff":
        """Replace each parameter by a monomial in ``target``'s parameters.

        Parameters missing from ``images`` keep their name and must exist in
        ``target``.  A parameter with a finite window may only be sent to a
        non-zero power of a single target parameter that nothing else maps to;
        anything else would smear the truncation error.
        """
        maps = []
        for name in self.ctx.names:
            img = images.get(name, {name: 1})
            maps.append({n: _frac(e) for n, e in img.items() if e != 0})
        hits: dict[str, int] = {}
        for img in maps:
            for n in img:
                hits[n] = hits.get(n, 0) + 1
        window = [(-INF, INF)] * len(target.names)
        for i, (name, img) in enumerate(zip(self.ctx.names, maps)):
            lo, hi = self.window[i]
            if lo == -INF and hi == INF:
                continue
            if len(img) != 1 or hits[next(iter(img))] != 1:
                raise TruncationError(f"cannot transport the truncated window of {name!r}")
            (tname, k), = img.items()
            j = target.index(tname)
            d, td = self.ctx.dens[i], target.dens[j]
            ends = [x * (1 if k > 0 else -1) if x in (INF, -INF) else Fraction(x, d) * k * td
                    for x in (lo, hi)]
            if k < 0:
                ends.reverse()
            new_lo = ends[0] if ends[0] == -INF else math.ceil(ends[0])
            new_hi = ends[1] if ends[1] == INF else math.floor(ends[1])
            window[j] = (max(window[j][0], new_lo), min(window[j][1], new_hi))
        rows = [[(target.index(n), e) for n, e in img.items()] for img in maps]
        terms: dict[tuple[int, ...], Fraction] = {}
        for key, c in self.terms.items():
            acc = [Fraction(0)] * len(target.names)
            for i, e in enumerate(key):
                if e:
                    ee = Fraction(e, self.ctx.dens[i])
                    for j, k in rows[i]:
                        acc[j] += ee * k
            nk = tuple(_scale(a, d) for a, d in zip(acc, target.dens))
            terms[nk] = terms.get(nk, 0) + c
        return LaurentCoeff(target, terms, tuple(window))

    def evaluate_param(self, name: str, value: Fraction) -> "LaurentCoeff":
        """Set an (exactly known) parameter to a rational value."""
        i = self.ctx.index(name)
        if self.window[i] != (-INF, INF):
            raise TruncationError(f"{name!r} is truncated; cannot evaluate")
        target = self.ctx.without(name)
        terms: dict[tuple[int, ...], Fraction] = {}
        for key, c in self.terms.items():
            e = Fraction(key[i], self.ctx.dens[i])
            if e.denominator != 1 and value < 0:
                raise RepresentationError("fractional power of a negative value")
            v = _frac(value) ** e
            if not isinstance(v, Fraction):
                raise RepresentationError("evaluation left the rationals")
            nk = key[:i] + key[i + 1:]
            terms[nk] = terms.get(nk, 0) + c * v
        return LaurentCoeff(target, terms, self.window[:i] + self.window[i + 1:])

    # -- comparison and printing -----------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.is_exact() and self.terms == ({} if other == 0 else
                                                      {(0,) * len(self.ctx.names): Fraction(other)})
        if not isinstance(other, LaurentCoeff):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms and self.window == other.window

    def __hash__(self):
        return hash((self.ctx, frozenset(self.terms.items()), self.window))

    def format(self) -> str:
        if not self.terms:
            return "0"
        out = []
        for exps, c in self.items():
            pieces = [_fmt_frac(c)]
            for n in self.ctx.names:
                if n in exps:
                    pieces.append(f"{n}^{_fmt_frac(exps[n])}")
            out.append(" ".join(pieces))
        return " + ".join(out)

    def __repr__(self):
        w = "" if self.is_exact() else f", window={self.window}"
        return f"LaurentCoeff({self.format()}{w})"


# ---------------------------------------------------------------------------
# q-series


def _qkey(e) -> int:
    return _scale(e, Q_DEN)


class QSeries:
    """Series in ``q`` with exponents in ``(1/24)Z``, known for exponents ``<= order``."""

    __slots__ = ("ctx", "terms", "order")

    def __init__(self, ctx: ParamContext, terms: Mapping[int, LaurentCoeff] | None = None,
                 order=INF):
        self.ctx = ctx
        self.order = order
        clean = {}
        for k, c in (terms or {}).items():
            if k > order:
                continue
            if c.ctx != ctx:
                raise ContextError("coefficient context differs from series context")
            if c.terms or not c.is_exact():
                if c.terms:
                    clean[k] = c
        self.terms = clean

    @classmethod
    def from_terms(cls, ctx: ParamContext, terms: Mapping[Any, LaurentCoeff | int | Fraction],
                   order=INF) -> "QSeries":
        scaled = {}
        for e, c in terms.items():
            c = c if isinstance(c, LaurentCoeff) else ctx.const(c)
            k = _qkey(e)
            scaled[k] = scaled[k] + c if k in scaled else c
        return cls(ctx, scaled, INF if order == INF else _qkey(order))

    @classmethod
    def one(cls, ctx: ParamContext, order=INF) -> "QSeries":
        return cls.from_terms(ctx, {0: 1}, order)

    @property
    def order_q(self):
        return _unscale(self.order, Q_DEN)

    def coefficient(self, e) -> LaurentCoeff:
        k = _qkey(e)
        if k > self.order:
            raise TruncationError(f"q^{e} lies beyond the truncation order {self.order_q}")
        return self.terms.get(k, self.ctx.zero())

    def items(self) -> Iterator[tuple[Fraction, LaurentCoeff]]:
        for k in sorted(self.terms):
            yield Fraction(k, Q_DEN), self.terms[k]

    def min_exponent(self):
        return min(self.terms) if self.terms else INF

    def _coerce(self, other) -> "QSeries":
        if isinstance(other, QSeries):
            if other.ctx != self.ctx:
                raise ContextError(f"contexts differ: {self.ctx.names} vs {other.ctx.names}")
            return other
        if isinstance(other, (int, Fraction, LaurentCoeff)):
            c = other if isinstance(other, LaurentCoeff) else self.ctx.const(other)
            return QSeries(self.ctx, {0: c})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        order = min(self.order, other.order)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return QSeries(self.ctx, terms, order)

    __radd__ = __add__

    def __neg__(self):
        return QSeries(self.ctx, {k: -c for k, c in self.terms.items()}, self.order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        if isinstance(c, LaurentCoeff):
            return QSeries(self.ctx, {k: v * c for k, v in self.terms.items()}, self.order)
        return QSeries(self.ctx, {k: v.scale(c) for k, v in self.terms.items()}, self.order)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, LaurentCoeff)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        low_a = min(self.min_exponent(), self.order + 1)
        low_b = min(other.min_exponent(), other.order + 1)
        order = min(self.order + low_b, other.order + low_a)
        terms: dict[int, LaurentCoeff] = {}
        bk = sorted(other.terms)
        for ka, ca in self.terms.items():
            for kb_ in bk:
                k = ka + kb_
                if k > order:
                    break
                p = ca * other.terms[kb_]
                terms[k] = terms[k] + p if k in terms else p
        return QSeries(self.ctx, terms, order)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = QSeries.one(self.ctx)
        for _ in range(k):
            result = result * self
        return result

    def truncate(self, order) -> "QSeries":
        k = _qkey(order)
        return QSeries(self.ctx, self.terms, min(self.order, k))

    def shift(self, e) -> "QSeries":
        """Multiply by ``q^e``."""
        s = _qkey(e)
        return QSeries(self.ctx, {k + s: c for k, c in self.terms.items()}, self.order + s)

    def dilate(self, n: int) -> "QSeries":
        """Substitute ``q -> q^n`` (exact exponent scaling)."""
        if n < 1:
            raise ValueError("dilation factor must be positive")
        return QSeries(self.ctx, {k * n: c for k, c in self.terms.items()}, self.order * n)

    def map_coeffs(self, fn: Callable[[LaurentCoeff], LaurentCoeff],
                   ctx: ParamContext | None = None) -> "QSeries":
        ctx = ctx or self.ctx
        return QSeries(ctx, {k: fn(c) for k, c in self.terms.items()}, self.order)

    def substitute(self, target: ParamContext, images: Mapping[str, Mapping[str, Any]]) -> "QSeries":
        return self.map_coeffs(lambda c: c.substitute(target, images), target)

    def restrict(self, **bounds) -> "QSeries":
        return self.map_coeffs(lambda c: c.restrict(**bounds))

    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self.ctx == other.ctx and self.order == other.order and self.terms == other.terms

    __hash__ = None

    def dump(self) -> str:
        return dump_qseries(self)

    def __repr__(self):
        body = " + ".join(f"({c.format()})q^{_fmt_frac(e)}" for e, c in self.items()) or "0"
        return f"QSeries({body}, order={self.order_q})"


def dump_qseries(series: QSeries) -> str:
    """Line-oriented dump: ``<q_num>/<q_den> | <term list>``, ascending in ``q``."""
    lines = []
    for e, c in series.items():
        lines.append(f"{e.numerator}/{e.denominator} | {c.format()}")
    return "\n".join(lines) + ("\n" if lines else "")


# ---------------------------------------------------------------------------
# u-series


class USeries:
    """Series in ``u_lambda`` (multiset-union multiplication), sizes ``<= cutoff``."""

    __slots__ = ("ctx", "terms", "cutoff")

    def __init__(self, ctx: ParamContext, terms: Mapping[Partition, LaurentCoeff] | None = None,
                 cutoff: int = 0):
        self.ctx = ctx
        self.cutoff = cutoff
        clean = {}
        for lam, c in (terms or {}).items():
            if lam.size > cutoff:
                continue
            if c.ctx != ctx:
                raise ContextError("coefficient context differs from series context")
            if c.terms:
                clean[lam] = c
        self.terms = clean

    @classmethod
    def one(cls, ctx: ParamContext, cutoff: int) -> "USeries":
        return cls(ctx, {EMPTY: ctx.one()}, cutoff)

    @classmethod
    def monomial(cls, ctx: ParamContext, lam: Partition, coeff=1, cutoff: int = 0) -> "USeries":
        c = coeff if isinstance(coeff, LaurentCoeff) else ctx.const(coeff)
        return cls(ctx, {lam: c}, cutoff)

    def coefficient(self, lam: Partition) -> LaurentCoeff:
        if lam.size > self.cutoff:
            raise TruncationError(f"{lam} exceeds the cutoff {self.cutoff}")
        return self.terms.get(lam, self.ctx.zero())

    def items(self) -> Iterator[tuple[Partition, LaurentCoeff]]:
        for lam in sorted(self.terms):
            yield lam, self.terms[lam]

    def _coerce(self, other) -> "USeries":
        if isinstance(other, USeries):
            if other.ctx != self.ctx:
                raise ContextError("contexts differ")
            return other
        if isinstance(other, (int, Fraction, LaurentCoeff)):
            c = other if isinstance(other, LaurentCoeff) else self.ctx.const(other)
            return USeries(self.ctx, {EMPTY: c}, self.cutoff)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for lam, c in other.terms.items():
            terms[lam] = terms[lam] + c if lam in terms else c
        return USeries(self.ctx, terms, min(self.cutoff, other.cutoff))

    __radd__ = __add__

    def __neg__(self):
        return USeries(self.ctx, {k: -c for k, c in self.terms.items()}, self.cutoff)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "USeries":
        if isinstance(c, LaurentCoeff):
            return USeries(self.ctx, {k: v * c for k, v in self.terms.items()}, self.cutoff)
        return USeries(self.ctx, {k: v.scale(c) for k, v in self.terms.items()}, self.cutoff)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, LaurentCoeff)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return useries_mul(self, other)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, USeries):
            return NotImplemented
        return self.ctx == other.ctx and self.cutoff == other.cutoff and self.terms == other.terms

    __hash__ = None

    def to_q(self) -> QSeries:
        return substitute_u_to_q(self)

    def __repr__(self):
        body = " + ".join(f"({c.format()})u{lam}" for lam, c in self.items()) or "0"
        return f"USeries({body}, cutoff={self.cutoff})"


def useries_mul(a: USeries, b: USeries) -> USeries:
    """Product with ``u_lambda * u_mu = u_(lambda union mu)``; sizes beyond the cutoff are dropped."""
    if a.ctx != b.ctx:
        raise ContextError("contexts differ")
    cutoff = min(a.cutoff, b.cutoff)
    by_size: dict[int, list[tuple[Partition, LaurentCoeff]]] = {}
    for lam, c in b.terms.items():
        by_size.setdefault(lam.size, []).append((lam, c))
    sizes = sorted(by_size)
    terms: dict[Partition, LaurentCoeff] = {}
    for lam, ca in a.terms.items():
        room = cutoff - lam.size
        for s in sizes:
            if s > room:
                break
            for mu, cb in by_size[s]:
                key = lam.union(mu)
                p = ca * cb
                terms[key] = terms[key] + p if key in terms else p
    return USeries(a.ctx, terms, cutoff)


def substitute_u_to_q(a: USeries) -> QSeries:
    """Specialise ``u_j = q^j``: ``u_lambda -> q^|lambda|``."""
    terms: dict[int, LaurentCoeff] = {}
    for lam, c in a.terms.items():
        k = lam.size * Q_DEN
        terms[k] = terms[k] + c if k in terms else c
    return QSeries(a.ctx, terms, a.cutoff * Q_DEN)


def partition_sum(ctx: ParamContext, cutoff: int,
                  weight: Callable[[Partition], Any] = lambda lam: 1) -> USeries:
    """``sum_lambda weight(lambda) u_lambda`` over ``|lambda| <= cutoff``."""
    terms = {}
    for lam in partitions_upto(cutoff):
        w = weight(lam)
        if not isinstance(w, LaurentCoeff):
            if w == 0:
                continue
            w = ctx.const(w)
        terms[lam] = w
    return USeries(ctx, terms, cutoff)


def moebius_series(ctx: ParamContext, cutoff: int) -> USeries:
    """``sum_lambda mu(lambda) u_lambda``, the inverse of ``sum_lambda u_lambda``."""
    return partition_sum(ctx, cutoff, moebius_partition)


# ---------------------------------------------------------------------------
# expansions of rational functions and of exponentials


def expand_rational_param(kind: str, ctx: ParamContext, name: str, order: int) -> LaurentCoeff:
    """One-sided expansion of a geometric factor in parameter ``name``.

    ``geom``      : ``1/(1-p)   = sum_{k=0..order} p^k``   valid for exponents ``<= order``
    ``geom_neg``  : ``1/(1-1/p) = sum_{k=0..order} p^-k``  valid for exponents ``>= -order``
    """
    if order < 0:
        raise ValueError("order must be non-negative")
    i = ctx.index(name)
    d = ctx.dens[i]
    window = list(_full_window(len(ctx.names)))
    if kind == "geom":
        sign = 1
        window[i] = (-INF, order * d)
    elif kind == "geom_neg":
        sign = -1
        window[i] = (-order * d, INF)
    else:
        raise ValueError(f"unknown expansion kind {kind!r}")
    zero = [0] * len(ctx.names)
    terms = {}
    for k in range(order + 1):
        key = list(zero)
        key[i] = sign * k * d
        terms[tuple(key)] = Fraction(1)
    return LaurentCoeff(ctx, terms, tuple(window))


def geometric_over(ctx: ParamContext, name: str, order: int, region: str = "lt1") -> LaurentCoeff:
    """``1/(1-p)`` expanded for ``|p| < 1`` (``lt1``) or ``|p| > 1`` (``gt1``)."""
    if region == "lt1":
        return expand_rational_param("geom", ctx, name, order)
    if region == "gt1":
        # 1/(1-p) = -p^-1 / (1 - p^-1)
        return -(ctx.var(name, -1) * expand_rational_param("geom_neg", ctx, name, order))
    raise ValueError(f"unknown region {region!r}")


def _w_series(poly: LaurentCoeff, xi: str, nterms: int) -> list[LaurentCoeff]:
    """Coefficients of ``W^0..W^(nterms-1)`` after ``xi -> exp(W)``; over ctx without ``xi``."""
    ctx = poly.ctx
    i = ctx.index(xi)
    if poly.window[i] != (-INF, INF):
        raise TruncationError(f"{xi!r} is truncated; exp-substitution would not converge")
    rest = ctx.without(xi)
    wrest = poly.window[:i] + poly.window[i + 1:]
    d = ctx.dens[i]
    out = [dict() for _ in range(nterms)]
    for key, c in poly.terms.items():
        r = Fraction(key[i], d)
        nk = key[:i] + key[i + 1:]
        term = c
        for k in range(nterms):
            if k:
                term = term * r / k
            if term == 0:
                break
            out[k][nk] = out[k].get(nk, 0) + term
    return [LaurentCoeff(rest, t, wrest) for t in out]


def _assemble_w(coeffs: Mapping[int, LaurentCoeff], ctx_rest: ParamContext, w: str,
                order_w: int) -> LaurentCoeff:
    target = ctx_rest.extend(w, den=1)
    terms = {}
    window = None
    for k, c in coeffs.items():
        if k > order_w:
            continue
        wdw = c.window
        window = wdw if window is None else tuple(
            (max(a[0], b[0]), min(a[1], b[1])) for a, b in zip(window, wdw))
        for key, v in c.terms.items():
            terms[key + (k,)] = v
    if window is None:
        window = _full_window(len(ctx_rest.names))
    return LaurentCoeff(target, terms, window + ((-INF, order_w),))


def w_expand_coeff(poly: LaurentCoeff, xi: str = "xi", w: str = "W", order_w: int = 4) -> LaurentCoeff:
    """``xi^r -> sum_k (rW)^k/k!`` up to ``W^order_w``; result over ctx with ``xi`` replaced by ``w``."""
    if order_w < 0:
        raise ValueError("order_w must be non-negative")
    series = _w_series(poly, xi, order_w + 1)
    return _assemble_w(dict(enumerate(series)), poly.ctx.without(xi), w, order_w)


def w_expand_rational(num: LaurentCoeff, den: LaurentCoeff, xi: str = "xi", w: str = "W",
                      order_w: int = 4) -> LaurentCoeff:
    """Laurent expansion in ``W`` of ``num(e^W)/den(e^W)`` by exact series division.

    ``num`` and ``den`` are exact in ``xi``.  The lowest non-vanishing
    ``W``-coefficient of ``den`` must be an exact monomial so it can be
    inverted; otherwise :class:`TruncationError` is raised.
    """
    den.ctx.index(xi)
    nterms = order_w + 2
    dser = []
    val = None
    # find the valuation of den: grow until a non-zero coefficient shows up
    limit = 4 * (order_w + 4) + 16
    for n in range(1, limit):
        dser = _w_series(den, xi, n)
        nz = [k for k, c in enumerate(dser) if not c.is_zero()]
        if nz:
            val = nz[0]
            break
    if val is None:
        raise TruncationError("denominator vanishes to every computed order in W")
    lead = dser[val]
    if len(lead.terms) != 1 or not lead.is_exact():
        raise TruncationError("leading W-coefficient of the denominator is not an exact monomial")
    inv = lead ** -1
    total = order_w + val + 1
    dser = _w_series(den, xi, val + total + 1)
    nser = _w_series(num, xi, total + 1)
    quot: list[LaurentCoeff] = []
    for k in range(total):
        acc = nser[k] if k < len(nser) else nser[0].ctx.zero()
        for j in range(1, k + 1):
            if val + j < len(dser) and not dser[val + j].is_zero():
                acc = acc - dser[val + j] * quot[k - j]
        quot.append(acc * inv)
    coeffs = {k - val: c for k, c in enumerate(quot)}
    return _assemble_w(coeffs, num.ctx.without(xi), w, order_w)


def w_expand(series: QSeries, xi: str = "xi", w: str = "W", order_w: int = 4) -> QSeries:
    """Apply :func:`w_expand_coeff` to every coefficient of a ``q``-series."""
    target = series.ctx.without(xi).extend(w, den=1)
    return QSeries(target, {k: w_expand_coeff(c, xi, w, order_w) for k, c in series.terms.items()},
                   series.order)


# ---------------------------------------------------------------------------
# comparison


@dataclass
class EqualityReport:
    equal: bool
    order: Any = None
    window: dict[str, tuple] | None = None
    mismatch: dict[str, Any] | None = None
    compared: int = 0

    def __bool__(self):
        return self.equal

    def as_dict(self) -> dict:
        def enc(x):
            if isinstance(x, Fraction):
                return _fmt_frac(x)
            if x in (INF, -INF):
                return "inf" if x > 0 else "-inf"
            return x
        d = {"equal": self.equal, "compared": self.compared,
             "order": enc(self.order) if self.order is not None else None}
        if self.window is not None:
            d["window"] = {k: [enc(lo), enc(hi)] for k, (lo, hi) in self.window.items()}
        if self.mismatch is not None:
            d["mismatch"] = {k: (enc(v) if not isinstance(v, dict) else
                                 {kk: enc(vv) for kk, vv in v.items()})
                             for k, v in self.mismatch.items()}
        return d


def _common_window(a: LaurentCoeff, b: LaurentCoeff, user: Mapping[str, tuple] | None):
    window = []
    for i, (wa, wb) in enumerate(zip(a.window, b.window)):
        lo, hi = max(wa[0], wb[0]), min(wa[1], wb[1])
        name, d = a.ctx.names[i], a.ctx.dens[i]
        if user and name in user:
            ulo, uhi = user[name]
            if ulo != -INF:
                lo = max(lo, math.ceil(_frac(ulo) * d))
            if uhi != INF:
                hi = min(hi, math.floor(_frac(uhi) * d))
        window.append((lo, hi))
    return tuple(window)


def _laurent_mismatch(a: LaurentCoeff, b: LaurentCoeff, window) -> tuple | None:
    keys = set(a.terms) | set(b.terms)
    bad = []
    for k in keys:
        if all(lo <= e <= hi for e, (lo, hi) in zip(k, window)):
            va, vb = a.terms.get(k, Fraction(0)), b.terms.get(k, Fraction(0))
            if va != vb:
                bad.append((k, va, vb))
    if not bad:
        return None
    bad.sort()
    return bad[0]


def series_equal(a, b, window: Mapping[str, tuple] | None = None, order=None) -> EqualityReport:
    """Compare two values of the same domain on their common validity region.

    ``window`` optionally narrows the parameter box (real exponents) and
    ``order`` the ``q``-order or ``u``-cutoff.  Raises
    :class:`InconclusiveComparison` when the region is empty.
    """
    if type(a) is not type(b):
        raise TypeError("series_equal needs two values of the same domain")
    if a.ctx != b.ctx:
        raise ContextError("contexts differ")
    ctx = a.ctx

    def report_window(w):
        return {n: (_unscale(lo, d), _unscale(hi, d)) for n, d, (lo, hi) in zip(ctx.names, ctx.dens, w)}

    def mono(k):
        return {n: Fraction(e, d) for n, e, d in zip(ctx.names, k, ctx.dens) if e}

    if isinstance(a, LaurentCoeff):
        w = _common_window(a, b, window)
        if any(lo > hi for lo, hi in w):
            raise InconclusiveComparison(f"empty parameter window {report_window(w)}")
        bad = _laurent_mismatch(a, b, w)
        if bad:
            return EqualityReport(False, None, report_window(w),
                                  {"monomial": mono(bad[0]), "left": bad[1], "right": bad[2]}, 1)
        return EqualityReport(True, None, report_window(w), None, 1)

    if isinstance(a, QSeries):
        top = min(a.order, b.order)
        if order is not None:
            top = min(top, _qkey(order))
        keys = sorted(k for k in set(a.terms) | set(b.terms) if k <= top)
        if top < 0 and not keys:
            raise InconclusiveComparison("no q-exponents below the common order")
        union_window = None
        for k in keys:
            ca, cb = a.terms.get(k, ctx.zero()), b.terms.get(k, ctx.zero())
            w = _common_window(ca, cb, window)
            if any(lo > hi for lo, hi in w):
                raise InconclusiveComparison(
                    f"empty parameter window at q^{Fraction(k, Q_DEN)}: {report_window(w)}")
            union_window = w if union_window is None else tuple(
                (max(x[0], y[0]), min(x[1], y[1])) for x, y in zip(union_window, w))
            bad = _laurent_mismatch(ca, cb, w)
            if bad:
                return EqualityReport(False, Fraction(top, Q_DEN) if top != INF else INF,
                                      report_window(w),
                                      {"q": Fraction(k, Q_DEN), "monomial": mono(bad[0]),
                                       "left": bad[1], "right": bad[2]}, len(keys))
        if union_window is None:
            union_window = _common_window(ctx.zero(), ctx.zero(), window)
        return EqualityReport(True, Fraction(top, Q_DEN) if top != INF else INF,
                              report_window(union_window), None, len(keys))

    if isinstance(a, USeries):
        top = min(a.cutoff, b.cutoff)
        if order is not None:
            top = min(top, order)
        keys = sorted(k for k in set(a.terms) | set(b.terms) if k.size <= top)
        for lam in keys:
            ca, cb = a.terms.get(lam, ctx.zero()), b.terms.get(lam, ctx.zero())
            w = _common_window(ca, cb, window)
            if any(lo > hi for lo, hi in w):
                raise InconclusiveComparison(f"empty parameter window at u{lam}")
            bad = _laurent_mismatch(ca, cb, w)
            if bad:
                return EqualityReport(False, top, report_window(w),
                                      {"u": str(lam), "monomial": mono(bad[0]),
                                       "left": bad[1], "right": bad[2]}, len(keys))
        return EqualityReport(True, top, None, None, len(keys))

    raise TypeError(f"unsupported domain {type(a).__name__}")


def twist(series: QSeries, name: str, target: str, q_per_unit, order) -> QSeries:
    """Substitute ``name^e -> target^e q^(e * q_per_unit)`` (a shift of the elliptic variable by a
    multiple of ``tau``).

    Shifting moves terms across the truncation order, so the caller supplies the
    order up to which the result is complete.  It may not exceed what the input
    order guarantees; callers document the bound they rely on.
    """
    ctx = series.ctx
    i = ctx.index(name)
    j = ctx.index(target)
    d_src, d_tgt = ctx.dens[i], ctx.dens[j]
    per = _frac(q_per_unit)
    top = _qkey(order)
    terms: dict[int, dict] = {}
    windows: dict[int, tuple] = {}
    for k, c in series.terms.items():
        if c.window[i] != (-INF, INF):
            raise TruncationError(f"{name!r} is truncated; it cannot be twisted")
        for key, v in c.terms.items():
            e = Fraction(key[i], d_src)
            nk = k + _qkey(e * per)
            if nk > top:
                continue
            new_key = list(key)
            new_key[i] = 0
            new_key[j] += _scale(e, d_tgt)
            new_key = tuple(new_key)
            bucket = terms.setdefault(nk, {})
            bucket[new_key] = bucket.get(new_key, 0) + v
            w = windows.get(nk)
            windows[nk] = c.window if w is None else tuple(
                (max(a[0], b[0]), min(a[1], b[1])) for a, b in zip(w, c.window))
    return QSeries(ctx, {k: LaurentCoeff(ctx, t, windows[k]) for k, t in terms.items()}, top)


def coefficient_in(coeff: LaurentCoeff, name: str, exponent) -> LaurentCoeff:
    """Coefficient of ``name^exponent`` as a value over the context without ``name``."""
    ctx = coeff.ctx
    i = ctx.index(name)
    e = _scale(exponent, ctx.dens[i])
    lo, hi = coeff.window[i]
    if not lo <= e <= hi:
        raise TruncationError(f"{name}^{exponent} lies outside the known window")
    rest = ctx.without(name)
    terms = {k[:i] + k[i + 1:]: v for k, v in coeff.terms.items() if k[i] == e}
    return LaurentCoeff(rest, terms, coeff.window[:i] + coeff.window[i + 1:])
