"""Command-line entry point: ``qbrackets verify|expand|bracket ...``.

Every invocation prints one JSON document on stdout and exits 0 when all
checks pass, 1 when any fails (or is inconclusive) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

from . import checks
from .algebra import ParamContext, dump_qseries
from .brackets import BracketContext, q_bracket
from .invariants import Q_k, S_k, length_fn, s_fn, shat_fn, t_N
from .numerics import LAWS, Action, GammaMatrix, Point, check_transformation, default_prec
from .qforms import NORMALIZATIONS, FormSpec, build

SCHEMA = 1


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad complex number {text!r}")


def _gamma(text: str) -> GammaMatrix:
    vals = _ints(text)
    if len(vals) != 4:
        raise argparse.ArgumentTypeError("gamma needs four integers a,b,c,d")
    try:
        return GammaMatrix(*vals)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


# ---------------------------------------------------------------------------
# verify


def _verify_transform(a) -> list[checks.CheckReport]:
    if a.law not in LAWS:
        raise UsageError(f"unknown law {a.law!r}; known laws: {', '.join(sorted(LAWS))}")
    omega = a.omega if a.omega is not None else a.tau + 1j
    pt = Point(a.z, a.w, a.tau, omega)
    act = Action(a.gamma, a.m, a.l, a.m2, a.l2, a.ell, a.N)
    prec = a.prec or default_prec()
    try:
        r = check_transformation(a.law, pt, act, prec)
    except ValueError as exc:
        raise UsageError(str(exc))
    ok = r.relative < a.tol
    return [checks.CheckReport(f"transform:{a.law}", {"prec": prec, "tol": a.tol}, "pass" if ok else "fail",
                               None if ok else {"max_residual": r.relative}, None, r.as_dict())]


VERIFY: dict[str, Callable] = {
    "thm1": lambda a: [checks.check_thm1(a.Ns, a.cutoff)],
    "t-bracket": lambda a: [lambda N=N: checks.check_t_bracket(N, a.cutoff) for N in a.Ns],
    "s-bracket": lambda a: [checks.check_s_bracket(a.cutoff, a.pwindow)],
    "shat-f": lambda a: [checks.check_shat_f(a.order, a.pwindow)],
    "thm2": lambda a: [checks.check_thm2(a.Ns, a.n, a.order, a.norm)],
    "falsemock": lambda a: [checks.check_falsemock(a.N, a.order, a.argmap)],
    "bridge-t-psi": lambda a: [checks.check_bridge_t_psi(a.order)],
    "bridge-theta": lambda a: [checks.check_bridge_theta(a.order)],
    "fn-appell": lambda a: [checks.check_fn_appell(a.N, a.order)],
    "fn-product": lambda a: [checks.check_fn_product(a.n, a.order)],
    "fastpath": lambda a: checks.check_connected_fastpath(a.n, a.cutoff),
    "transform": _verify_transform,
}


def _add_verify(sub):
    p = sub.add_parser("verify", help="run an identity or transformation check")
    vs = p.add_subparsers(dest="check", required=True)

    def mk(name, **defaults):
        q = vs.add_parser(name)
        for flag, (typ, val) in defaults.items():
            q.add_argument(f"--{flag}", type=typ, default=val)
        return q

    mk("thm1", Ns=(_ints, [1]), cutoff=(int, 12))
    mk("t-bracket", Ns=(_ints, [1, 2, 3]), cutoff=(int, 24))
    mk("s-bracket", cutoff=(int, 20), pwindow=(int, 10))
    mk("shat-f", order=(int, 20), pwindow=(int, 12))
    q = mk("thm2", Ns=(_ints, [1]), n=(int, 1), order=(int, 10))
    q.add_argument("--norm", choices=("auto",) + NORMALIZATIONS, default="auto")
    q = mk("falsemock", N=(int, 1), order=(int, 8))
    q.add_argument("--argmap", default="auto",
                   help="auto, corrected, or 'first;second' monomials of the direct f_N form")
    mk("bridge-t-psi", order=(int, 25))
    mk("bridge-theta", order=(int, 20))
    mk("fn-appell", N=(int, 1), order=(int, 16))
    mk("fn-product", n=(int, 1), order=(int, 5))
    mk("fastpath", n=(int, 2), cutoff=(int, 12))
    q = vs.add_parser("transform")
    q.add_argument("--law", required=True)
    q.add_argument("--gamma", type=_gamma, default=None)
    for flag in ("z", "tau"):
        q.add_argument(f"--{flag}", type=_complex, required=True)
    q.add_argument("--w", type=_complex, default=0j)
    q.add_argument("--omega", type=_complex, default=None)
    for flag in ("m", "l", "m2", "l2"):
        q.add_argument(f"--{flag}", type=int, default=0)
    q.add_argument("--ell", type=int, default=1)
    q.add_argument("--N", type=int, default=1)
    q.add_argument("--prec", type=int, default=None)
    q.add_argument("--tol", type=float, default=1e-9)


# ---------------------------------------------------------------------------
# expand and bracket


def _expand(a) -> tuple[list[checks.CheckReport], dict]:
    try:
        spec = FormSpec.from_json(a.form, order=a.order)
        series = build(spec)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad form: {exc}")
    text = dump_qseries(series)
    if a.dump:
        with open(a.dump, "w") as fh:
            fh.write(text)
    rep = checks.CheckReport("expand", {"form": json.loads(spec.to_json()), "order": a.order}, "pass")
    return [rep], {"dump": text.splitlines()}


def _builtin(name: str, porder: int):
    """Named partition functions for ``bracket --f``."""
    if name == "length":
        return length_fn(ParamContext(()))
    if name in ("s", "shat"):
        ctx = ParamContext(("rho", "xi"), (1, 1)) if name == "shat" else ParamContext(("rho",), (1,))
        return s_fn(ctx, "rho", porder) if name == "s" else shat_fn(ctx, "rho", "xi", porder)
    kind, num = name[:1], name[1:]
    if not num.isdigit():
        raise UsageError(f"unknown builtin {name!r}; use S<k>, Q<k>, t<N>, s, shat or length")
    k = int(num)
    try:
        if kind == "S":
            return S_k(k)
        if kind == "Q":
            return Q_k(k)
        if kind == "t":
            return t_N(k, ParamContext(("zeta",), (1,)))
    except ValueError as exc:
        raise UsageError(str(exc))
    raise UsageError(f"unknown builtin {name!r}")


def _bracket(a) -> tuple[list[checks.CheckReport], dict]:
    f = _builtin(a.f, a.porder)
    try:
        bc = BracketContext(f.ctx, a.order)
    except ValueError as exc:
        raise UsageError(str(exc))
    params = {"f": a.f, "order": a.order}
    try:
        series = q_bracket(f, bc, cross_check=True)
    except AssertionError as exc:
        return [checks.CheckReport("bracket", params, "fail", {"reason": str(exc)})], {}
    rep = checks.CheckReport("bracket", params, "pass",
                             details={"routes": ["partition-sum", "u-bracket"]})
    return [rep], {"dump": dump_qseries(series).splitlines()}


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qbrackets", description="identity and transformation checks for q-brackets")
    p.add_argument("--timing", action="store_true", help="include runtime_ms in reports")
    sub = p.add_subparsers(dest="command", required=True)
    _add_verify(sub)
    e = sub.add_parser("expand", help="expand a named series and dump it")
    e.add_argument("--form", required=True, help="FormSpec as JSON")
    e.add_argument("--order", type=int, required=True)
    e.add_argument("--dump", default=None)
    b = sub.add_parser("bracket", help="q-bracket of a builtin partition function")
    b.add_argument("--f", required=True)
    b.add_argument("--order", type=int, required=True)
    b.add_argument("--porder", type=int, default=12)
    return p


def _verify(a) -> list[checks.CheckReport]:
    # a verify entry returns reports, or thunks for independent checks run concurrently
    items = VERIFY[a.check](a)
    thunks = [x for x in items if callable(x)]
    done = [x for x in items if not callable(x)]
    if thunks:
        with ThreadPoolExecutor() as pool:
            done += list(pool.map(lambda f: f(), thunks))
    return done


def run(argv: Sequence[str] | None = None) -> tuple[int, dict]:
    """Parse ``argv`` and return ``(exit code, JSON document)``."""
    argv = list(sys.argv[1:] if argv is None else argv)
    timing = "--timing" in argv
    argv = [x for x in argv if x != "--timing"]
    try:
        a = build_parser().parse_args(argv)
        extra: dict = {}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if a.command == "verify":
                reports = _verify(a)
            elif a.command == "expand":
                reports, extra = _expand(a)
            else:
                reports, extra = _bracket(a)
    except UsageError as exc:
        return 2, {"schema": SCHEMA, "status": "usage-error", "error": str(exc)}
    reports = sorted(reports, key=lambda r: (r.check_id, json.dumps(r.parameters, sort_keys=True)))
    status = checks.overall(reports)
    doc = {"schema": SCHEMA, "status": status,
           "checks": [r.as_dict(timing=timing) for r in reports], **extra}
    return (0 if status == "pass" else 1), doc


def main(argv: Sequence[str] | None = None) -> int:
    code, doc = run(argv)
    print(json.dumps(doc, indent=2, sort_keys=True, default=str))
    return code


if __name__ == "__main__":
    sys.exit(main())
