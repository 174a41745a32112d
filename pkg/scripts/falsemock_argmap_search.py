"""Search argument assignments for the direct t/shat closed form.

Every candidate pair of monomials is compared with the brute-force connected
bracket; the corrected combination is checked alongside.
"""

import argparse
import json

from qbrackets.checks import check_falsemock


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--N", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--order", type=int, default=8)
    ap.add_argument("--json", action="store_true", help="print the full reports")
    a = ap.parse_args()
    for N in a.N:
        rep = check_falsemock(N, a.order, "auto")
        if a.json:
            print(json.dumps(rep.as_dict(), indent=1, sort_keys=True))
            continue
        print(f"N={N} order={a.order}: corrected form {rep.status}")
        for c in rep.details["direct_form_candidates"]:
            m = c["first_mismatch"]
            where = "" if c["equal"] else f"  first mismatch q^{m['q']} {m['monomial']}: {m['left']} vs {m['right']}"
            print(f"  {' ; '.join(c['arg_map']):<28} {'match' if c['equal'] else 'fail'}{where}")


if __name__ == "__main__":
    main()
