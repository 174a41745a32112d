"""High-precision evaluation of theta-like functions, their completions and transformation laws.

All evaluators take an explicit ``prec`` (bits).  Every bilateral sum is cut
from an a-priori Gaussian envelope ``exp(-a n^2 + b |n| + c)`` so the number of
terms depends only on the input and the precision, never on observed decay.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import mpmath

DEFAULT_PREC = 53
EXTENDED_PREC = 160
POLE_TOL = 1e-6
BRANCH_TOL = 1e-8


class DomainError(ValueError):
    pass


class PoleError(ValueError):
    def __init__(self, msg: str, distance: float):
        super().__init__(f"{msg} (distance {distance:.3e})")
        self.distance = distance


class BranchWarning(UserWarning):
    pass


def default_prec() -> int:
    env = os.environ.get("QBRACKET_PREC")
    return int(env) if env else DEFAULT_PREC


@lru_cache(maxsize=None)
def _mp(prec: int) -> mpmath.ctx_mp.MPContext:
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


def _prec(prec):
    return default_prec() if prec is None else int(prec)


# ---------------------------------------------------------------------------
# small helpers


def _tail_radius(a: float, b: float, c: float, prec: int) -> int:
    """Smallest ``N`` such that ``sum_{|n| > N} exp(-a n^2 + b|n| + c)`` is below ``2^-prec``."""
    if a <= 0:
        raise DomainError("non-decaying series")
    target = -(prec + 20) * math.log(2)
    n = max(0, math.ceil(b / (2 * a)))
    # past the peak consecutive ratios are <= exp(-a(2n+1) + b) < 1/e after this point
    n = max(n, math.ceil((b + 1) / (2 * a)))
    while -a * n * n + b * n + c > target - math.log(1 + 1 / (1 - math.exp(-1))):
        n += 1
    return n + 1


def _imag(x) -> float:
    return float(mpmath.im(x))


def _check_tau(tau):
    if _imag(tau) <= 0:
        raise DomainError("tau must lie in the upper half-plane")


def _e(mp, x):
    """``e^(2 pi i x)``."""
    return mp.expjpi(2 * x)


# ---------------------------------------------------------------------------
# error function and R


def eval_E(x, prec: int | None = None):
    """``E(x) = 2 int_0^x exp(-pi t^2) dt = erf(sqrt(pi) x)``; complex ``x`` allowed."""
    mp = _mp(_prec(prec))
    return mp.erf(mp.sqrt(mp.pi) * mp.mpmathify(x))


def _sgn_minus_E(mp, s: int, x):
    # sgn(n) - erf(y) = s * erfc(s * y) avoids cancellation for large |y|
    y = mp.sqrt(mp.pi) * x
    return s * mp.erfc(s * y)


def eval_R(z, tau, prec: int | None = None, return_terms: bool = False):
    """``R(z; tau) = sum_{n in Z+1/2} (sgn n - E((n + z2/tau2) sqrt(2 tau2))) (-1)^(n-1/2) q^(-n^2/2) e^(-2 pi i n z)``."""
    _check_tau(tau)
    p = _prec(prec)
    mp = _mp(p + 20)
    z, tau = mp.mpc(z), mp.mpc(tau)
    t2 = float(tau.imag)
    c = float(z.imag) / t2
    # |term| <= exp(-2 pi t2 (n + c)^2) exp(pi t2 n^2 + 2 pi n z2) = exp(-pi t2 (n + 2c)^2 + 2 pi t2 c^2)
    shift = round(2 * c)
    a = math.pi * t2
    N = _tail_radius(a, 2 * a * abs(2 * c - shift) + 1, 2 * math.pi * t2 * c * c, p)
    total = mp.mpc(0)
    count = 0
    sq = mp.sqrt(2 * tau.imag)
    for k in range(-shift - N - 1, -shift + N + 1):
        n = mp.mpf(k) + mp.mpf(1) / 2
        s = 1 if n > 0 else -1
        sign = -1 if (k % 2) else 1  # (-1)^(n - 1/2) = (-1)^k
        term = _sgn_minus_E(mp, s, (n + z.imag / tau.imag) * sq) * sign \
            * _e(mp, -n * n * tau / 2 - n * z)
        total += term
        count += 1
    out = _mp(p).mpc(total)
    return (out, count) if return_terms else out


# ---------------------------------------------------------------------------
# theta functions and eta


def eval_theta(kind: str, z, tau, prec: int | None = None):
    """``vartheta`` (sum over ``Z + 1/2`` with ``e^(2 pi i n (z + 1/2))``) or ``big_theta`` (``sum zeta^n q^(n^2/2)``)."""
    _check_tau(tau)
    p = _prec(prec)
    mp = _mp(p + 20)
    z, tau = mp.mpc(z), mp.mpc(tau)
    t2 = float(tau.imag)
    z2 = float(z.imag)
    a = math.pi * t2
    b = 2 * math.pi * abs(z2) + 1
    N = _tail_radius(a, b, 0, p)
    total = mp.mpc(0)
    if kind == "vartheta":
        for k in range(-N - 1, N + 1):
            n = mp.mpf(k) + mp.mpf(1) / 2
            total += _e(mp, n * (z + mp.mpf(1) / 2) + n * n * tau / 2)
    elif kind == "big_theta":
        for n in range(-N, N + 1):
            total += _e(mp, n * z + mp.mpf(n * n) * tau / 2)
    else:
        raise DomainError(f"unknown theta kind {kind!r}")
    return _mp(p).mpc(total)


def eval_eta(tau, prec: int | None = None):
    """``q^(1/24) prod (1 - q^n)`` through the pentagonal sum ``sum (-1)^n q^((6n+1)^2/24)``."""
    _check_tau(tau)
    p = _prec(prec)
    mp = _mp(p + 20)
    tau = mp.mpc(tau)
    a = 2 * math.pi * float(tau.imag) * 36 / 24
    N = _tail_radius(a, 2 * math.pi * float(tau.imag) * 12 / 24 + 1, 0, p)
    total = mp.mpc(0)
    for n in range(-N, N + 1):
        total += (-1) ** n * _e(mp, mp.mpf((6 * n + 1) ** 2) / 24 * tau)
    return _mp(p).mpc(total)


# ---------------------------------------------------------------------------
# modular group data


@dataclass(frozen=True)
class GammaMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise DomainError(f"determinant of {self.as_tuple()} is not 1")

    @classmethod
    def parse(cls, text: str) -> "GammaMatrix":
        parts = [int(x) for x in text.split(",")]
        if len(parts) != 4:
            raise DomainError("gamma needs four comma-separated integers")
        return cls(*parts)

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def in_gamma2(self) -> bool:
        return self.b % 2 == 0 and self.c % 2 == 0

    def in_gamma0_2(self) -> bool:
        return self.c % 2 == 0

    def in_gamma0_4(self) -> bool:
        return self.c % 4 == 0

    def act(self, tau):
        return (self.a * tau + self.b) / (self.c * tau + self.d)

    def j(self, tau):
        return self.c * tau + self.d

    def __neg__(self):
        return GammaMatrix(-self.a, -self.b, -self.c, -self.d)


S = GammaMatrix(0, -1, 1, 0)
T = GammaMatrix(1, 1, 0, 1)


def kronecker(a: int, b: int) -> int:
    """Kronecker symbol ``(a/b)`` for all integers."""
    if b == 0:
        return 1 if abs(a) == 1 else 0
    if a % 2 == 0 and b % 2 == 0:
        return 0
    result = 1
    if b < 0:
        b = -b
        if a < 0:
            result = -result
    v = 0
    while b % 2 == 0:
        b //= 2
        v += 1
    if v % 2 and a % 8 in (3, 5):
        result = -result
    # b odd positive: Jacobi symbol
    a %= b
    while a:
        while a % 2 == 0:
            a //= 2
            if b % 8 in (3, 5):
                result = -result
        a, b = b, a
        if a % 4 == 3 and b % 4 == 3:
            result = -result
        a %= b
    return result if b == 1 else 0


def epsilon_d(d: int) -> complex:
    """``1`` if ``d = 1 (mod 4)`` and ``i`` if ``d = 3 (mod 4)``; negative ``d`` by the same residue."""
    if d % 2 == 0:
        raise DomainError("epsilon_d needs odd d")
    return 1 if d % 4 == 1 else 1j


def eta_multiplier(g: GammaMatrix, prec: int | None = None):
    """``nu_eta(gamma)`` with ``eta(gamma tau) = nu_eta(gamma) sqrt(c tau + d) eta(tau)``."""
    mp = _mp(_prec(prec))
    a, b, c, d = g.as_tuple()
    if c % 2:
        return kronecker(d, abs(c)) * mp.expjpi(mp.mpf((a + d) * c - b * d * (c * c - 1) - 3 * c) / 12)
    return kronecker(c, d) * mp.expjpi(mp.mpf(a * c * (1 - d * d) + d * (b - c + 3) - 3) / 12)


def _sqrt(mp, x):
    x = mp.mpc(x)
    if abs(x.imag) < BRANCH_TOL * max(1, abs(x)) and x.real < 0:
        import warnings
        warnings.warn(f"argument {complex(x)} is close to the branch cut", BranchWarning)
    return mp.sqrt(x)


def chi(g: GammaMatrix, tau, omega, prec: int | None = None):
    """``sqrt(i(w-t)/((ct+d)(cw+d))) sqrt(ct+d) sqrt(cw+d) / sqrt(i(w-t))`` with principal roots."""
    mp = _mp(_prec(prec))
    tau, omega = mp.mpc(tau), mp.mpc(omega)
    jt, jw = g.j(tau), g.j(omega)
    x = 1j * (omega - tau)
    return _sqrt(mp, x / (jt * jw)) * _sqrt(mp, jt) * _sqrt(mp, jw) / _sqrt(mp, x)


# ---------------------------------------------------------------------------
# Appell functions


def eval_appell(ell: int, z, w, tau, prec: int | None = None):
    """``zeta^(ell/2) sum_m (-1)^(ell m) q^(ell m(m+1)/2) xi^m / (1 - zeta q^m)``."""
    _check_tau(tau)
    if ell < 1:
        raise DomainError("ell must be positive")
    p = _prec(prec)
    mp = _mp(p + 20)
    z, w, tau = mp.mpc(z), mp.mpc(w), mp.mpc(tau)
    t2, z2, w2 = float(tau.imag), float(z.imag), float(w.imag)
    a = math.pi * ell * t2
    # |1 - zeta q^m| >= |zeta q^m| / 2 once that exceeds 2, and >= 1/2 once it is below 1/2
    b = 2 * math.pi * (abs(w2) + abs(z2) + t2 * (ell + 2)) + 1
    N = _tail_radius(a, b, math.log(2) + 2 * math.pi * abs(z2), p)
    zeta = _e(mp, z)
    total = mp.mpc(0)
    for m in range(-N, N + 1):
        den = 1 - zeta * _e(mp, m * tau)
        if abs(den) < POLE_TOL:
            raise PoleError(f"zeta q^{m} is at the pole 1", float(abs(den)))
        total += (-1) ** (ell * m) * _e(mp, mp.mpf(ell * m * (m + 1)) / 2 * tau + m * w) / den
    return _mp(p).mpc(_e(mp, mp.mpf(ell) / 2 * z) * total)


def eval_appell_hat(ell: int, z, w, tau, prec: int | None = None):
    """``A_ell + i/2 sum_{k<ell} zeta^k vartheta(w + k tau + (ell-1)/2; ell tau) R(ell z - w - k tau - (ell-1)/2; ell tau)``."""
    p = _prec(prec)
    mp = _mp(p + 20)
    z, w, tau = mp.mpc(z), mp.mpc(w), mp.mpc(tau)
    h = mp.mpf(ell - 1) / 2
    corr = mp.mpc(0)
    for k in range(ell):
        corr += (_e(mp, k * z) * eval_theta("vartheta", w + k * tau + h, ell * tau, p + 20)
                 * eval_R(ell * z - w - k * tau - h, ell * tau, p + 20))
    return _mp(p).mpc(eval_appell(ell, z, w, tau, p + 20) + 1j * corr / 2)


# ---------------------------------------------------------------------------
# false theta functions


def eval_psi(z, tau, prec: int | None = None):
    """``sum_{n in Z+1/2} sgn(n) e^(2 pi i n (z + 1/2)) q^(n^2/2)``."""
    _check_tau(tau)
    p = _prec(prec)
    mp = _mp(p + 20)
    z, tau = mp.mpc(z), mp.mpc(tau)
    N = _tail_radius(math.pi * float(tau.imag), 2 * math.pi * abs(float(z.imag)) + 1, 0, p)
    total = mp.mpc(0)
    for k in range(-N - 1, N + 1):
        n = mp.mpf(k) + mp.mpf(1) / 2
        total += (1 if k >= 0 else -1) * _e(mp, n * (z + mp.mpf(1) / 2) + n * n * tau / 2)
    return _mp(p).mpc(total)


COMPLETION_NORMS = ("corrected", "pi-scaled")


def _completed_sum(z, tau, omega, prec, index: int, norm: str):
    """``sum_n E(beta (n + z2/(index tau2))) e^(2 pi i n z') q^(index n^2/2)``.

    ``index = 1`` runs over ``Z + 1/2`` with ``z' = z + 1/2`` (the false theta
    completion); ``index = 2`` runs over ``Z`` with ``z' = z``.  With
    ``norm="corrected"`` ``beta = -i sqrt(index i (omega - tau))``, the value that
    makes ``E(beta x) = erf(sqrt(pi) beta x)`` the incomplete Gaussian produced by
    the Eichler integral; ``"pi-scaled"`` puts an extra ``pi`` under the root.
    """
    if norm not in COMPLETION_NORMS:
        raise DomainError(f"norm must be one of {COMPLETION_NORMS}")
    _check_tau(tau)
    if _imag(omega) <= 0:
        raise DomainError("omega must lie in the upper half-plane")
    p = _prec(prec)
    mp = _mp(p + 20)
    z, tau, omega = mp.mpc(z), mp.mpc(tau), mp.mpc(omega)
    t2 = float(tau.imag)
    c = float(z.imag) / (index * t2)
    beta_sq = index * 1j * (omega - tau) * (mp.pi if norm == "pi-scaled" else 1)
    beta = -1j * _sqrt(mp, beta_sq)
    # |erf(y)| <= 1 + 2|y|/sqrt(pi) exp(max(0, -Re y^2)) with y = sqrt(pi) beta (n + c)
    grow = max(0.0, float(mp.re(mp.pi * beta * beta)) * -1)
    a = math.pi * index * t2 - grow
    if a <= 0:
        raise DomainError("the completed sum diverges at this (tau, omega)")
    bb = 2 * grow * abs(c) + 2 * math.pi * abs(float(z.imag)) + 2 * float(abs(beta)) + 1
    N = _tail_radius(a, bb, grow * c * c + math.log(3) + 2 * float(abs(beta)) * abs(c), p)
    half = mp.mpf(1) / 2
    total = mp.mpc(0)
    sp = mp.sqrt(mp.pi)
    cm = z.imag / (index * tau.imag)
    for k in range(-N - 1, N + 2):
        if index == 1:
            n = mp.mpf(k) + half
            phase = _e(mp, n * (z + half) + n * n * tau / 2)
        else:
            n = mp.mpf(k)
            phase = _e(mp, n * z + n * n * tau)
        total += mp.erf(sp * beta * (n + cm)) * phase
    return _mp(p).mpc(total)


def eval_psi_hat(z, tau, omega, prec: int | None = None, norm: str = "corrected"):
    """``sum_{n in Z+1/2} E(-i sqrt(i (omega - tau)) (n + z2/tau2)) e^(2 pi i n (z+1/2)) q^(n^2/2)``.

    The sum converges for all ``omega`` in the upper half-plane.  See
    :func:`_completed_sum` for ``norm``.
    """
    return _completed_sum(z, tau, omega, prec, 1, norm)


def eval_T(z, tau, prec: int | None = None):
    """``sum_n sgn(n + 1/2) zeta^n q^(n^2)``."""
    _check_tau(tau)
    p = _prec(prec)
    mp = _mp(p + 20)
    z, tau = mp.mpc(z), mp.mpc(tau)
    N = _tail_radius(2 * math.pi * float(tau.imag), 2 * math.pi * abs(float(z.imag)) + 1, 0, p)
    total = mp.mpc(0)
    for n in range(-N, N + 1):
        total += (1 if n >= 0 else -1) * _e(mp, n * z + n * n * tau)
    return _mp(p).mpc(total)


def eval_T_hat(z, tau, omega, prec: int | None = None, norm: str = "corrected"):
    """``sum_n E(-i sqrt(2 i (omega - tau)) (n + z2/(2 tau2))) zeta^n q^(n^2)``."""
    return _completed_sum(z, tau, omega, prec, 2, norm)


# ---------------------------------------------------------------------------
# f_N and its completion


def eval_fN(N: int, z, w, tau, prec: int | None = None):
    """``sum_m zeta^m q^(N m^2) / (1 - xi q^m)``, the meromorphic continuation of the sign sum."""
    _check_tau(tau)
    p = _prec(prec)
    mp = _mp(p + 20)
    z, w, tau = mp.mpc(z), mp.mpc(w), mp.mpc(tau)
    t2 = float(tau.imag)
    a = 2 * math.pi * N * t2
    b = 2 * math.pi * (abs(float(z.imag)) + abs(float(w.imag)) + t2) + 1
    M = _tail_radius(a, b, math.log(2) + 2 * math.pi * abs(float(w.imag)), p)
    xi = _e(mp, w)
    total = mp.mpc(0)
    for m in range(-M, M + 1):
        den = 1 - xi * _e(mp, m * tau)
        if abs(den) < POLE_TOL:
            raise PoleError(f"xi q^{m} is at the pole 1", float(abs(den)))
        total += _e(mp, m * z + N * m * m * tau) / den
    return _mp(p).mpc(total)


def eval_fN_hat(N: int, z, w, tau, prec: int | None = None):
    """Completion ``xi^-N A_{2N}^(w, z - N tau)`` of ``f_N``."""
    p = _prec(prec)
    mp = _mp(p + 20)
    z, w, tau = mp.mpc(z), mp.mpc(w), mp.mpc(tau)
    return _mp(p).mpc(_e(mp, -N * w) * eval_appell_hat(2 * N, w, z - N * tau, tau, p + 20))


def eval_fN_hat_zeta_prefactor(N: int, z, w, tau, prec: int | None = None):
    """``f_N + i/2 zeta^-N sum_k xi^k vartheta(z - N tau + k tau + N - 1/2; 2N tau) R(2Nw - z + N tau - k tau - N + 1/2; 2N tau)``.

    Identical to :func:`eval_fN_hat` except the prefactor reads ``zeta^-N`` in
    place of ``xi^-N``.
    """
    p = _prec(prec)
    mp = _mp(p + 20)
    z, w, tau = mp.mpc(z), mp.mpc(w), mp.mpc(tau)
    half = mp.mpf(1) / 2
    corr = mp.mpc(0)
    for k in range(2 * N):
        corr += (_e(mp, k * w)
                 * eval_theta("vartheta", z - N * tau + k * tau + N - half, 2 * N * tau, p + 20)
                 * eval_R(2 * N * w - z + N * tau - k * tau - N + half, 2 * N * tau, p + 20))
    return _mp(p).mpc(eval_fN(N, z, w, tau, p + 20) + 1j / 2 * _e(mp, -N * z) * corr)


# ---------------------------------------------------------------------------
# transformation-law harness


@dataclass
class Point:
    z: complex = 0j
    w: complex = 0j
    tau: complex = 1j
    omega: complex = 2j

    def as_dict(self) -> dict:
        return {k: [float(mpmath.re(v)), float(mpmath.im(v))] for k, v in vars(self).items()
                if v is not None}


@dataclass
class Action:
    gamma: GammaMatrix | None = None
    m: int = 0
    l: int = 0
    m2: int = 0
    l2: int = 0
    ell: int = 1
    N: int = 1

    def as_dict(self) -> dict:
        d = {k: v for k, v in vars(self).items() if k != "gamma"}
        d["gamma"] = list(self.gamma.as_tuple()) if self.gamma else None
        return d


@dataclass
class ResidualReport:
    law: str
    point: dict
    action: dict
    residual: float
    relative: float
    lhs: complex
    rhs: complex
    factors: dict[str, complex]
    prec: int

    def passed(self, tol: float = 1e-9) -> bool:
        return self.relative < tol

    def as_dict(self) -> dict:
        c = lambda x: [float(x.real), float(x.imag)]
        return {"law": self.law, "point": self.point, "action": self.action,
                "residual": self.residual, "relative": self.relative,
                "lhs": c(self.lhs), "rhs": c(self.rhs),
                "factors": {k: c(v) for k, v in self.factors.items()},
                "precision_bits": self.prec}


@dataclass(frozen=True)
class Law:
    law_id: str
    kind: str  # "elliptic" or "modular"
    evaluate: Callable
    requires: Callable[[Action], bool] = field(default=lambda act: True)
    description: str = ""


LAWS: dict[str, Law] = {}


def register(law_id: str, kind: str, requires=None, description: str = ""):
    def deco(fn):
        LAWS[law_id] = Law(law_id, kind, fn, requires or (lambda act: True), description)
        return fn
    return deco


def _need_gamma(pred=None):
    def check(act: Action) -> bool:
        return act.gamma is not None and (pred is None or pred(act.gamma))
    return check


_shift = lambda act: act.gamma is None


def _mods(mp, g: GammaMatrix, pt: Point):
    jt = g.j(mp.mpc(pt.tau))
    return jt, g.act(mp.mpc(pt.tau)), g.act(mp.mpc(pt.omega)) if pt.omega is not None else None


@register("theta-elliptic", "elliptic", _shift)
def _theta_ell(pt, act, p, mp):
    z, tau = mp.mpc(pt.z), mp.mpc(pt.tau)
    lhs = eval_theta("vartheta", z + act.m * tau + act.l, tau, p)
    rhs = eval_theta("vartheta", z, tau, p)
    return lhs, rhs, {"sign": (-1) ** (act.m + act.l), "exponential": _e(mp, -act.m * z - act.m ** 2 * tau / 2)}


@register("theta-modular", "modular", _need_gamma())
def _theta_mod(pt, act, p, mp):
    g = act.gamma
    z, tau = mp.mpc(pt.z), mp.mpc(pt.tau)
    jt = g.j(tau)
    lhs = eval_theta("vartheta", z / jt, g.act(tau), p)
    rhs = eval_theta("vartheta", z, tau, p)
    return lhs, rhs, {"character": eta_multiplier(g, p) ** 3, "automorphy": mp.sqrt(jt),
                      "exponential": mp.expjpi(g.c * z * z / jt)}


def _big_theta_ell(qpow):
    def law(pt, act, p, mp):
        z, tau = mp.mpc(pt.z), mp.mpc(pt.tau)
        lhs = eval_theta("big_theta", z + act.m * tau + act.l, tau, p)
        rhs = eval_theta("big_theta", z, tau, p)
        return lhs, rhs, {"exponential": _e(mp, -act.m * z - qpow * act.m ** 2 * tau)}
    return law


register("big-theta-elliptic", "elliptic", _shift,
         "factor zeta^-m q^(-m^2/2)")(_big_theta_ell(mpmath.mpf(1) / 2))
register("big-theta-elliptic-variant", "elliptic", _shift,
         "factor zeta^-m q^(-m^2) (variant)")(_big_theta_ell(1))


def _big_theta_mod(sign):
    def law(pt, act, p, mp):
        g = act.gamma
        z, tau = mp.mpc(pt.z), mp.mpc(pt.tau)
        jt = g.j(tau)
        lhs = eval_theta("big_theta", z / jt, g.act(tau), p)
        rhs = eval_theta("big_theta", z, tau, p)
        return lhs, rhs, {"character": kronecker(sign * 2 * g.c, g.d) / mp.mpc(epsilon_d(g.d)),
                          "automorphy": mp.sqrt(jt), "exponential": mp.expjpi(g.c * z * z / jt)}
    return law


register("big-theta-modular", "modular", _need_gamma(GammaMatrix.in_gamma2),
         "character (2c/d) eps_d^-1")(_big_theta_mod(1))
register("big-theta-modular-variant", "modular", _need_gamma(GammaMatrix.in_gamma2),
         "character (-2c/d) eps_d^-1 (variant)")(_big_theta_mod(-1))


@register("appell-elliptic", "elliptic", _shift)
def _appell_ell(pt, act, p, mp):
    z, w, tau = mp.mpc(pt.z), mp.mpc(pt.w), mp.mpc(pt.tau)
    L, m1, l1, m2, l2 = act.ell, act.m, act.l, act.m2, act.l2
    lhs = eval_appell_hat(L, z + m1 * tau + l1, w + m2 * tau + l2, tau, p)
    rhs = eval_appell_hat(L, z, w, tau, p)
    return lhs, rhs, {"sign": (-1) ** (L * (m1 + l1)),
                      "exponential": _e(mp, (L * m1 - m2) * z - m1 * w
                                        + (mp.mpf(L * m1 * m1) / 2 - m1 * m2) * tau)}


@register("appell-modular", "modular", _need_gamma())
def _appell_mod(pt, act, p, mp):
    g = act.gamma
    z, w, tau = mp.mpc(pt.z), mp.mpc(pt.w), mp.mpc(pt.tau)
    jt = g.j(tau)
    lhs = eval_appell_hat(act.ell, z / jt, w / jt, g.act(tau), p)
    rhs = eval_appell_hat(act.ell, z, w, tau, p)
    return lhs, rhs, {"automorphy": jt,
                      "exponential": mp.expjpi(g.c / jt * (-act.ell * z * z + 2 * z * w))}


def _psi_ell(norm):
    def law(pt, act, p, mp):
        z, tau, om = mp.mpc(pt.z), mp.mpc(pt.tau), mp.mpc(pt.omega)
        lhs = eval_psi_hat(z + act.m * tau + act.l, tau, om, p, norm)
        rhs = eval_psi_hat(z, tau, om, p, norm)
        return lhs, rhs, {"sign": (-1) ** (act.m + act.l),
                          "exponential": _e(mp, -act.m * z - act.m ** 2 * tau / 2)}
    return law


def _psi_mod(norm):
    def law(pt, act, p, mp):
        g = act.gamma
        z, tau, om = mp.mpc(pt.z), mp.mpc(pt.tau), mp.mpc(pt.omega)
        jt = g.j(tau)
        lhs = eval_psi_hat(z / jt, g.act(tau), g.act(om), p, norm)
        rhs = eval_psi_hat(z, tau, om, p, norm)
        return lhs, rhs, {"chi": chi(g, tau, om, p), "character": eta_multiplier(g, p) ** 3,
                          "automorphy": mp.sqrt(jt), "exponential": mp.expjpi(g.c * z * z / jt)}
    return law


register("psi-hat-elliptic", "elliptic", _shift)(_psi_ell("corrected"))
register("psi-hat-modular", "modular", _need_gamma())(_psi_mod("corrected"))
register("psi-hat-elliptic-variant", "elliptic", _shift,
         "completion with pi under the root (variant)")(_psi_ell("pi-scaled"))
register("psi-hat-modular-variant", "modular", _need_gamma(),
         "completion with pi under the root (variant)")(_psi_mod("pi-scaled"))


def _T_ell(qpow):
    def law(pt, act, p, mp):
        z, tau, om = mp.mpc(pt.z), mp.mpc(pt.tau), mp.mpc(pt.omega)
        lhs = eval_T_hat(z + 2 * act.m * tau + act.l, tau, om, p)
        rhs = eval_T_hat(z, tau, om, p)
        return lhs, rhs, {"exponential": _e(mp, -act.m * z - qpow * act.m ** 2 * tau)}
    return law


register("T-hat-elliptic", "elliptic", _shift, "factor zeta^-m q^(-m^2)")(_T_ell(1))
register("T-hat-elliptic-variant", "elliptic", _shift,
         "factor zeta^-m q^(-m^2/2) (variant)")(_T_ell(mpmath.mpf(1) / 2))


def _T_mod_common(pt, act, p, mp):
    g = act.gamma
    z, tau, om = mp.mpc(pt.z), mp.mpc(pt.tau), mp.mpc(pt.omega)
    jt = g.j(tau)
    lhs = eval_T_hat(z / jt, g.act(tau), g.act(om), p)
    rhs = eval_T_hat(z, tau, om, p)
    return g, z, tau, om, jt, lhs, rhs


@register("T-hat-modular", "modular", _need_gamma(GammaMatrix.in_gamma0_4),
          "factor assembled from the false-theta law at level 2")
def _T_mod(pt, act, p, mp):
    g, z, tau, om, jt, lhs, rhs = _T_mod_common(pt, act, p, mp)
    a, b, c, d = g.as_tuple()
    g2 = GammaMatrix(a, 2 * b, c // 2, d)
    sign = (-1) ** (((1 - d) // 2 + b) % 2)
    return lhs, rhs, {"sign": sign, "chi": chi(g, tau, om, p),
                      "character": eta_multiplier(g2, p) ** 3 * _e(mp, mp.mpf(a * b) / 4
                                                                   + mp.mpf(c * d) / 16),
                      "automorphy": mp.sqrt(jt), "exponential": mp.expjpi(c * z * z / (2 * jt))}


@register("T-hat-modular-variant", "modular", _need_gamma(GammaMatrix.in_gamma0_4),
          "factor (-1/d) chi j(gamma, tau) e^(pi i c z^2 / (2(c tau + d))) (variant)")
def _T_mod_disp(pt, act, p, mp):
    g, z, tau, om, jt, lhs, rhs = _T_mod_common(pt, act, p, mp)
    j = kronecker(g.c, g.d) / mp.mpc(epsilon_d(g.d)) * mp.sqrt(jt)
    return lhs, rhs, {"sign": kronecker(-1, g.d), "chi": chi(g, tau, om, p), "automorphy": j,
                      "exponential": mp.expjpi(g.c * z * z / (2 * jt))}


def _fN_ell(evaluator):
    def law(pt, act, p, mp):
        z, w, tau = mp.mpc(pt.z), mp.mpc(pt.w), mp.mpc(pt.tau)
        N, m1, l1, m2, l2 = act.N, act.m, act.l, act.m2, act.l2
        lhs = evaluator(N, z + m1 * tau + l1, w + m2 * tau + l2, tau, p)
        rhs = evaluator(N, z, w, tau, p)
        return lhs, rhs, {"exponential": _e(mp, -m2 * z + (2 * N * m2 - m1) * w
                                            + (N * m2 * m2 - m1 * m2) * tau)}
    return law


def _fN_mod(evaluator):
    def law(pt, act, p, mp):
        g = act.gamma
        z, w, tau = mp.mpc(pt.z), mp.mpc(pt.w), mp.mpc(pt.tau)
        jt = g.j(tau)
        lhs = evaluator(act.N, z / jt, w / jt, g.act(tau), p)
        rhs = evaluator(act.N, z, w, tau, p)
        return lhs, rhs, {"automorphy": jt,
                          "exponential": _e(mp, g.c / jt * (-act.N * w * w + z * w))}
    return law


register("fN-hat-elliptic", "elliptic", _shift)(_fN_ell(eval_fN_hat))
register("fN-hat-modular", "modular", _need_gamma())(_fN_mod(eval_fN_hat))
register("fN-hat-variant-elliptic", "elliptic", _shift,
         "completion with the zeta^-N prefactor (variant)")(_fN_ell(eval_fN_hat_zeta_prefactor))
register("fN-hat-variant-modular", "modular", _need_gamma(),
         "completion with the zeta^-N prefactor (variant)")(_fN_mod(eval_fN_hat_zeta_prefactor))


@register("fN-zero-elliptic", "elliptic", _shift)
def _fN0_ell(pt, act, p, mp):
    z, tau = mp.mpc(pt.z), mp.mpc(pt.tau)
    lhs = eval_fN_hat(act.N, 0, z + act.m * tau + act.l, tau, p)
    rhs = eval_fN_hat(act.N, 0, z, tau, p)
    return lhs, rhs, {"exponential": _e(mp, 2 * act.N * act.m * z + act.N * act.m ** 2 * tau)}


@register("fN-diag-elliptic", "elliptic", _shift)
def _fNd_ell(pt, act, p, mp):
    z, tau = mp.mpc(pt.z), mp.mpc(pt.tau)
    zz = z + act.m * tau + act.l
    lhs = eval_fN_hat(act.N, act.N * zz, zz, tau, p)
    rhs = eval_fN_hat(act.N, act.N * z, z, tau, p)
    return lhs, rhs, {}


@register("fN-zero-modular", "modular", _need_gamma())
def _fN0_mod(pt, act, p, mp):
    g = act.gamma
    z, tau = mp.mpc(pt.z), mp.mpc(pt.tau)
    jt = g.j(tau)
    lhs = eval_fN_hat(act.N, 0, z / jt, g.act(tau), p)
    rhs = eval_fN_hat(act.N, 0, z, tau, p)
    return lhs, rhs, {"automorphy": jt, "exponential": _e(mp, -g.c * act.N * z * z / jt)}


@register("fN-diag-modular", "modular", _need_gamma())
def _fNd_mod(pt, act, p, mp):
    g = act.gamma
    z, tau = mp.mpc(pt.z), mp.mpc(pt.tau)
    jt = g.j(tau)
    lhs = eval_fN_hat(act.N, act.N * z / jt, z / jt, g.act(tau), p)
    rhs = eval_fN_hat(act.N, act.N * z, z, tau, p)
    return lhs, rhs, {"automorphy": jt}


@register("eta-modular", "modular", _need_gamma())
def _eta_mod(pt, act, p, mp):
    g = act.gamma
    tau = mp.mpc(pt.tau)
    jt = g.j(tau)
    return (eval_eta(g.act(tau), p), eval_eta(tau, p),
            {"character": eta_multiplier(g, p), "automorphy": mp.sqrt(jt)})


@register("theta-big-theta-bridge", "elliptic", _shift)
def _bridge(pt, act, p, mp):
    z, tau = mp.mpc(pt.z), mp.mpc(pt.tau)
    lhs = eval_theta("big_theta", z, tau, p)
    rhs = eval_theta("vartheta", z - mp.mpf(1) / 2 + tau / 2, tau, p)
    return lhs, rhs, {"exponential": _e(mp, z / 2 + tau / 8)}


def check_transformation(law_id: str, point: Point, action: Action,
                         prec: int | None = None) -> ResidualReport:
    """``|LHS - factor * RHS|`` for a registered law; ``relative`` divides by ``max(1, |LHS|)``."""
    if law_id not in LAWS:
        raise DomainError(f"unknown law {law_id!r}; known: {sorted(LAWS)}")
    law = LAWS[law_id]
    if not law.requires(action):
        raise DomainError(f"law {law_id} does not accept {action.as_dict()}")
    p = _prec(prec)
    mp = _mp(p)
    lhs, rhs, factors = law.evaluate(point, action, p, mp)
    factor = mp.mpc(1)
    for v in factors.values():
        factor *= v
    diff = abs(lhs - factor * rhs)
    return ResidualReport(law_id, point.as_dict(), action.as_dict(), float(diff),
                          float(diff / max(1, abs(lhs))), complex(lhs), complex(factor * rhs),
                          {k: complex(v) for k, v in factors.items()}, p)


def sample_points(n: int = 5, seed: int = 0, with_omega: bool = True) -> list[Point]:
    """Deterministic grid with ``tau2`` in ``[0.4, 2]`` and ``|z|, |w| <= 1``."""
    import random
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        tau = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.4, 2.0))
        z = complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.3, 0.3) * tau.imag)
        w = complex(rng.uniform(-0.6, 0.6), rng.uniform(-0.3, 0.3) * tau.imag)
        omega = tau + complex(rng.uniform(-0.5, 0.5), rng.uniform(0.3, 1.5)) if with_omega else None
        out.append(Point(z, w, tau, omega))
    return out
