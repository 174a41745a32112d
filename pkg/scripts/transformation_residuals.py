"""Residual table for every registered transformation law and its variant."""

import argparse
import warnings

from qbrackets.checks import ACCEPTANCE_LAWS, ALT_VARIANTS, check_law, law_points
from qbrackets.numerics import DomainError


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--prec", type=int, default=160)
    ap.add_argument("--points", type=int, default=5)
    a = ap.parse_args()
    pts = law_points(a.points)
    warnings.simplefilter("ignore")
    print(f"{'law':<34} {'status':<7} {'max residual':>13} {'doubled':>13}")
    for law, actions in ACCEPTANCE_LAWS.items():
        for name in (law, ALT_VARIANTS.get(law)):
            if name is None:
                continue
            try:
                rep = check_law(name, actions, pts, a.prec)
            except DomainError as exc:
                print(f"{name:<34} {'error':<7} {str(exc)[:40]}")
                continue
            d = rep.details
            dbl = d.get("doubling", {}).get("residual", float("nan"))
            print(f"{name:<34} {rep.status:<7} {d['max_relative_residual']:>13.3e} {dbl:>13.3e}")


if __name__ == "__main__":
    main()
