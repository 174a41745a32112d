"""Resolve the normalization of the connected t/s closed form against brute-force brackets.

Writes tests/fixtures/thm2_norm.json with the matching normalizations per case.
"""

import argparse
import json
import pathlib

from qbrackets.checks import check_thm2

CASES = [((1,), 1), ((1,), 2), ((1, 1), 1), ((2,), 1)]


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--order", type=int, default=10)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[1]
                                         / "tests" / "fixtures" / "thm2_norm.json"))
    a = ap.parse_args()
    rows = []
    for Ns, n in CASES:
        rep = check_thm2(Ns, n, a.order, "auto")
        rows.append({"Ns": list(Ns), "n": n, "order": a.order,
                     "matching": rep.details["matching_norms"],
                     "rejected": sorted(rep.details["rejected"])})
        print(f"Ns={list(Ns)} n={n}: matching={rep.details['matching_norms']}")
    common = sorted(set.intersection(*(set(r["matching"]) for r in rows)))
    doc = {"resolved": "plain" if "plain" in common else (common[0] if common else None),
           "all_matching": common, "cases": rows}
    pathlib.Path(a.out).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")
    print(f"resolved normalization: {doc['resolved']}")


if __name__ == "__main__":
    main()
