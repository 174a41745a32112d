from qbrackets.algebra import ParamContext
from qbrackets.checks import (CheckReport, check_distinct_parts, check_fn_product, check_s_bracket,
                              check_thm2, falsemock_argmap_search, overall)


def test_overall_ordering():
    p, f, i = (CheckReport("x", {}, s) for s in ("pass", "fail", "inconclusive"))
    assert overall([p, p]) == "pass"
    assert overall([p, i]) == "inconclusive"
    assert overall([i, f]) == "fail"


def test_fail_has_witness():
    rep = check_thm2((1,), 1, 4, "half")
    assert rep.status == "fail" and rep.witness


def test_half_normalization_rejected_in_auto():
    rep = check_thm2((1,), 1, 4, "auto")
    assert rep.passed and "half" not in rep.details["matching_norms"]


def test_timing_only_on_request():
    rep = check_s_bracket(6, 4)
    assert "runtime_ms" not in rep.as_dict() and "runtime_ms" in rep.as_dict(timing=True)


def test_distinct_parts_and_products():
    assert check_distinct_parts(8).passed
    assert check_fn_product(1, 4, 4).passed


def test_argmap_search_reports_every_candidate():
    rows = falsemock_argmap_search(1, 3, porder=16)
    assert len(rows) == 12
    assert all(not r["equal"] and r["first_mismatch"] for r in rows)
