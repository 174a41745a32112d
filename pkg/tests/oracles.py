"""Independent brute-force oracles for frozen test values.

Nothing here imports the package: partitions, series division and set
partitions are re-derived from scratch so that the frozen numbers do not
inherit bugs from the code under test.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb


def partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def partition_counts(n_max):
    """``p(0..n_max)`` from the pentagonal recurrence."""
    p = [1] + [0] * n_max
    for n in range(1, n_max + 1):
        k, total = 1, 0
        while True:
            g1, g2 = k * (3 * k - 1) // 2, k * (3 * k + 1) // 2
            if g1 > n:
                break
            sign = 1 if k % 2 else -1
            total += sign * p[n - g1]
            if g2 <= n:
                total += sign * p[n - g2]
            k += 1
        p[n] = total
    return p


def bell_numbers(n_max):
    """Bell numbers via ``B(n+1) = sum_k C(n,k) B(k)``."""
    b = [1]
    for n in range(n_max):
        b.append(sum(comb(n, k) * b[k] for k in range(n + 1)))
    return b


def restricted_growth(l):
    """Set partitions of ``{1..l}`` as restricted growth strings."""
    def rec(prefix, mx):
        if len(prefix) == l:
            yield tuple(prefix)
            return
        for v in range(mx + 2):
            yield from rec(prefix + [v], max(mx, v))
    yield from rec([0], 0)


def q_bracket(f, order):
    """``sum f(lambda) q^|lambda| / sum q^|lambda|`` by power-series division; ``f`` is scalar."""
    num = [sum(Fraction(f(lam)) for lam in partitions(n)) for n in range(order + 1)]
    den = partition_counts(order)
    out = []
    for n in range(order + 1):
        out.append(num[n] - sum(out[k] * den[n - k] for k in range(n)))
    return out


def sigma(n, k=1):
    return sum(d ** k for d in range(1, n + 1) if n % d == 0)


def t1_at_one(lam):
    counts = {}
    for p in lam:
        counts[p] = counts.get(p, 0) + 1
    return 1 + 2 * sum(1 for m, r in counts.items() if r >= m)


def bernoulli_exp_over(order):
    """Coefficients of ``W^-1..W^order`` in ``e^W/(1-e^W)`` via ``x/(e^x-1) = sum B_k x^k/k!``."""
    # e^W/(1-e^W) = -1 - 1/(e^W - 1) = -1 - (1/W) sum B_k W^k / k!
    B = [Fraction(1)]
    for m in range(1, order + 3):
        B.append(-sum(comb(m + 1, k) * B[k] for k in range(m)) / (m + 1))
    fact = [1]
    for k in range(1, order + 3):
        fact.append(fact[-1] * k)
    coeffs = {k - 1: -B[k] / fact[k] for k in range(order + 2)}
    coeffs[0] -= 1
    return coeffs


def connected_g_1_1(r, xi_poly_len=None):
    """``g(r)`` for kernels ``(D_{1,1}, X_xi)`` as a dict exponent -> coefficient.

    Brute force: ``d(D X)(r) - (dD * dX)(r)`` with explicit sequences.
    """
    def D(k):
        return 1 if k >= 1 else 0

    def X(k):
        return {e: 1 for e in range(1, k + 1)}

    def d(seq, n):
        if n == 0:
            return {}
        if n == 1:
            return seq(1)
        a, b = seq(n), seq(n - 1)
        out = dict(a)
        for e, c in b.items():
            out[e] = out.get(e, 0) - c
        return {e: c for e, c in out.items() if c}

    def DX(k):
        return {e: c * D(k) for e, c in X(k).items() if D(k)}

    def Dd(k):
        return {0: 1} if D(k) else {}

    left = d(DX, r)
    conv = {}
    for j in range(1, r):
        a, b = d(Dd, j), d(X, r - j)
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                conv[e1 + e2] = conv.get(e1 + e2, 0) + c1 * c2
    out = dict(left)
    for e, c in conv.items():
        out[e] = out.get(e, 0) - c
    return {e: c for e, c in out.items() if c}


def generate():
    """Every frozen value, keyed by name; fractions as strings."""
    s = lambda xs: [str(x) for x in xs]
    return {
        "partition_counts_0_30": partition_counts(30),
        "bell_1_8": bell_numbers(8)[1:],
        "bracket_length_8": s(q_bracket(len, 8)),
        "bracket_S2_10": s(q_bracket(lambda lam: Fraction(-1, 24) + sum(lam), 10)),
        "bracket_t1_at_one_16": s(q_bracket(t1_at_one, 16)),
        "bracket_r1_8": s(q_bracket(lambda lam: lam.count(1), 8)),
        "divisor_counts_1_8": [sigma(n, 0) for n in range(1, 9)],
        "exp_over_one_minus_exp_W3": {str(k): str(v) for k, v in bernoulli_exp_over(3).items()},
        "kernel_D11_X_1_10": [{str(e): c for e, c in sorted(connected_g_1_1(r).items())}
                              for r in range(1, 11)],
    }
