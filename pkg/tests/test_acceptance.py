"""The ten acceptance criteria, one test each.

Every test records a single PASS/FAIL line that the terminal summary prints
under "acceptance criteria".
"""

import json
import pathlib
import time
import warnings
from itertools import product

from hypothesis import given, settings, strategies as st

from qbrackets.algebra import ParamContext, USeries, series_equal, substitute_u_to_q
from qbrackets.brackets import (BracketContext, connected_u_bracket, connected_via_moebius,
                                phi_inverse, products_via_connected, q_bracket_direct, u_bracket)
from qbrackets.checks import (ACCEPTANCE_LAWS, check_bridge_t_psi, check_bridge_theta,
                              check_connected_fastpath, check_falsemock, check_fn_appell, check_law,
                              check_s_bracket, check_shat_f, check_t_bracket, check_thm1,
                              check_thm2, law_points)
from qbrackets.invariants import PartitionFn
from qbrackets.partitions import partitions_upto
from qbrackets.setpartitions import SetPartition, gen_set_partitions, moebius_top

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_A1_t_bracket(acceptance):
    reps, dt = timed(lambda: [check_t_bracket(N, 24) for N in (1, 2, 3)])
    ok = all(r.passed for r in reps) and dt < 10
    acceptance("A1", ok, f"<t_N>_u = A_N for N=1,2,3 at cutoff 24 ({dt:.1f}s)")
    assert ok, [r.as_dict() for r in reps]


def test_A2_s_bracket(acceptance):
    rep, dt = timed(lambda: check_s_bracket(20, 10))
    ok = rep.passed and dt < 10
    acceptance("A2", ok, f"<s>_u = B on rho^[-10,10] at cutoff 20 ({dt:.1f}s)")
    assert ok, rep.as_dict()


def test_A3_shat_f(acceptance):
    rep, dt = timed(lambda: check_shat_f(20, 12))
    ok = rep.passed and dt < 30
    acceptance("A3", ok, f"<shat>_q = F to q^20 on windows [-12,12] ({dt:.1f}s)")
    assert ok, rep.as_dict()


def test_A4_thm1(acceptance):
    cases = [Ns for l in (1, 2, 3) for Ns in product((1, 2, 3), repeat=l)]
    reps, dt = timed(lambda: [check_thm1(Ns, 12) for Ns in cases])
    ok = all(r.passed for r in reps) and dt < 60
    acceptance("A4", ok, f"connected u-bracket of t's, {len(cases)} index vectors, cutoff 12 ({dt:.1f}s)")
    assert ok, [r.as_dict() for r in reps if not r.passed]


def test_A5_fastpath(acceptance):
    def run():
        out = []
        for n in (1, 2, 3, 4):
            out += check_connected_fastpath(n, 12)
            if n >= 2:
                out += check_connected_fastpath(n, 12, shortcut=True)
        out += check_connected_fastpath(2, 12, m=2)
        return out
    reps, dt = timed(run)
    ok = all(r.passed for r in reps) and dt < 60
    acceptance("A5", ok, f"fast path = direct connected bracket, {len(reps)} kernel tuples, n<=4 ({dt:.1f}s)")
    assert ok, [r.as_dict() for r in reps if not r.passed]


def test_A6_thm2(acceptance):
    fixture = json.loads((FIXTURES / "thm2_norm.json").read_text())
    norm = fixture["resolved"]
    cases = [((1,), 1), ((1,), 2), ((1, 1), 1)]
    reps, dt = timed(lambda: [check_thm2(Ns, n, 10, "auto") for Ns, n in cases])
    resolved = [set(r.details["matching_norms"]) for r in reps]
    pinned = [check_thm2(Ns, n, 10, norm) for Ns, n in cases]
    ok = all(r.passed for r in pinned) and all(norm in s for s in resolved) and dt < 60
    acceptance("A6", ok, f"t/s closed form to q^10 for (l,n) in (1,1),(1,2),(2,1); norm={norm} ({dt:.1f}s)")
    assert ok, [r.as_dict() for r in reps]


def test_A7_falsemock(acceptance):
    reps, dt = timed(lambda: [check_falsemock(N, 8, "auto") for N in (1, 2)])
    corrected = all(r.passed for r in reps)
    literal = [r.details["direct_form_resolved"] for r in reps]
    # no direct assignment matches; every candidate reports its first failing monomial
    isolated = all(c["first_mismatch"] for r in reps for c in r.details["direct_form_candidates"]
                   if not c["equal"])
    ok = corrected and isolated and dt < 120
    acceptance("A7", ok, f"<t_N, shat> closed form for N=1,2 to q^8 (corrected form); "
                         f"direct candidates matching: {literal} ({dt:.1f}s)")
    assert ok, [r.as_dict() for r in reps]


def test_A8_bridges(acceptance):
    def run():
        return ([check_bridge_t_psi(25)] + [check_fn_appell(N, 16) for N in (1, 2)]
                + [check_bridge_theta(20)])
    reps, dt = timed(run)
    ok = all(r.passed for r in reps) and dt < 60
    acceptance("A8", ok, f"T-psi to q^25, f_N-Appell N=1,2 to q^16, Theta-vartheta to q^20 ({dt:.1f}s)")
    assert ok, [r.as_dict() for r in reps if not r.passed]


def test_A9_transformation_laws(acceptance):
    pts = law_points(5)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        reps, dt = timed(lambda: [check_law(law, acts, pts, 160, 1e-9, doubling=True)
                                  for law, acts in ACCEPTANCE_LAWS.items()])
    worst = max(r.details["max_relative_residual"] for r in reps)
    ok = all(r.passed for r in reps) and all(r.details["points"] >= 5 for r in reps) and dt < 120
    acceptance("A9", ok, f"{len(reps)} laws at 160 bits, max residual {worst:.1e}, doubling ok ({dt:.1f}s)")
    assert ok, [r.as_dict() for r in reps if not r.passed]


# A10: property suites, counted

E = ParamContext(())
COUNTS = {"moebius": 0, "phi": 0, "specialise": 0, "mu_sum": 0}
tables = st.lists(st.integers(-3, 3), min_size=5, max_size=5)


def fn_from(table):
    return PartitionFn(E, lambda lam: E.const(sum(table[(p * 3 + i) % 5] for i, p in enumerate(lam.parts))
                                              + table[lam.length % 5]), "rand")


@settings(max_examples=70, derandomize=True)
@given(st.lists(tables, min_size=4, max_size=4), st.sampled_from(gen_set_partitions(4)))
def _moebius(tabs, alpha):
    bc = BracketContext(E, 6)
    fs = [fn_from(t) for t in tabs]
    lhs, rhs = products_via_connected(fs, alpha, bc)
    assert series_equal(lhs, rhs)
    assert series_equal(connected_via_moebius(fs, SetPartition.top(4), bc), connected_u_bracket(fs, bc))
    COUNTS["moebius"] += 1


@settings(max_examples=70, derandomize=True)
@given(st.dictionaries(st.sampled_from(list(partitions_upto(8))), st.integers(-4, 4), max_size=8))
def _phi(d):
    G = USeries(E, {k: E.const(v) for k, v in d.items()}, 8)
    bc = BracketContext(E, 8)
    assert series_equal(u_bracket(phi_inverse(G), bc), G)
    f = fn_from([v for v in list(d.values())[:5]] + [0] * (5 - min(5, len(d))))
    assert all(phi_inverse(u_bracket(f, bc))(lam) == f(lam) for lam in partitions_upto(8))
    COUNTS["phi"] += 1


@settings(max_examples=70, derandomize=True)
@given(tables)
def _specialise(t):
    bc = BracketContext(E, 10)
    f = fn_from(t)
    assert series_equal(q_bracket_direct(f, bc), substitute_u_to_q(u_bracket(f, bc)))
    COUNTS["specialise"] += 1


@settings(max_examples=30, derandomize=True)
@given(st.integers(2, 7))
def _mu_sum(l):
    assert sum(moebius_top(a) for a in gen_set_partitions(l)) == 0
    COUNTS["mu_sum"] += 1


def test_A10_properties(acceptance):
    t0 = time.perf_counter()
    failure = None
    for prop in (_moebius, _phi, _specialise, _mu_sum):
        try:
            prop()
        except AssertionError as exc:
            failure = exc
            break
    dt = time.perf_counter() - t0
    total = sum(COUNTS.values())
    ok = failure is None and total >= 200 and dt < 60
    acceptance("A10", ok, f"{total} property cases {COUNTS} ({dt:.1f}s)")
    assert ok, failure


if __name__ == "__main__":
    import sys

    import pytest
    sys.exit(pytest.main([__file__, "-q"]))
