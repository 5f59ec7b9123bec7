"""Command-line front end: ``hadfrac {eval,identity,suite,replay}``.

Exit codes: 0 success, 1 check failure, 2 input error, 3 domain error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import special
from .harness import ASSERTED, ERROR, VIOLATED, THEOREMS, SuiteConfig, replay, run_suite
from .identities import run_identity_checks
from .numcore import E2, DomainError, constant, function_from_json
from .operators import (
    FracParams,
    PowerImageSpec,
    closed_form_power_image,
    hadamard_left,
    hadamard_right,
    power_image_input,
    rl_proportional_left,
    rl_proportional_right,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_DOMAIN = 0, 1, 2, 3

OPS = ("hadamard-left", "hadamard-right", "rl-left", "rl-right", "closed-form")


class InputError(Exception):
    pass


def parse_function(src: str, beta: float, X: float):
    """``const:c``, ``power:lambda``, ``spline:<file>`` or inline JSON."""
    try:
        if src.startswith("const:"):
            return constant(float(src[6:]), X)
        if src.startswith("power:"):
            return power_image_input(PowerImageSpec(float(src[6:])), beta, X)
        if src.startswith("spline:"):
            return function_from_json(json.loads(Path(src[7:]).read_text()))
        if src.lstrip().startswith("{"):
            return function_from_json(json.loads(src))
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"cannot read function {src!r}: {exc}") from exc
    raise InputError(f"unrecognised function source {src!r}")


def cmd_eval(args) -> int:
    p = FracParams(args.alpha, args.beta)
    if args.op == "closed-form":
        if args.lam is None:
            raise InputError("closed-form needs --lambda")
        value = closed_form_power_image(args.x, p, PowerImageSpec(args.lam))
        out = {"op": args.op, "value": value, "err_est": 0.0, "n_used": 0}
    else:
        if args.fn is None:
            raise InputError(f"{args.op} needs --fn")
        z = parse_function(args.fn, args.beta, args.X)
        if args.op == "hadamard-left":
            res = hadamard_left(z, args.x, p, a=args.a if args.a is not None else 1.0, rtol=args.rtol)
        elif args.op == "hadamard-right":
            if args.b is None:
                raise InputError("hadamard-right needs --b")
            res = hadamard_right(z, args.x, args.b, p, rtol=args.rtol)
        elif args.op == "rl-left":
            res = rl_proportional_left(z, args.x, p, a=args.a if args.a is not None else 0.0,
                                       rtol=args.rtol)
        else:
            if args.b is None:
                raise InputError("rl-right needs --b")
            res = rl_proportional_right(z, args.x, p, args.b, rtol=args.rtol)
        out = {"op": args.op, "value": res.value, "err_est": res.err_est, "n_used": res.n_used,
               "converged": res.converged}
    print(json.dumps(out))
    return EXIT_OK


def cmd_identity(args) -> int:
    def run():
        return run_identity_checks(args.semigroup_trials, args.reduction_funcs, args.seed)

    if args.corrupt_gamma is not None:
        with special.perturbed_gamma(args.corrupt_gamma):
            checks = run()
    else:
        checks = run()
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name:<20} rel_err={c.rel_err:.3e} tol={c.tol:.0e}  {c.detail}")
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} identity checks passed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


def _write(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_suite(args) -> int:
    kw = {}
    if args.alphas:
        kw["alphas"] = tuple(args.alphas)
    if args.betas:
        kw["betas"] = tuple(args.betas)
    if args.ps:
        kw["ps"] = tuple(args.ps)
    if args.xs:
        kw["xs"] = tuple(args.xs)
    if args.corridor:
        kw["corridors"] = tuple(tuple(c) for c in args.corridor)
    config = SuiteConfig(
        trials=args.trials, seed=args.seed, tol_rel=args.tol_rel,
        theorems=tuple(args.theorem) if args.theorem else THEOREMS,
        degenerate=args.degenerate, workers=args.workers, **kw,
    )
    result = run_suite(config)
    fmt = args.format or "csv"
    _write(result.to_csv() if fmt == "csv" else result.to_json(), args.out)
    if args.json:
        Path(args.json).write_text(result.to_json())
    if args.variants:
        Path(args.variants).write_text(result.to_csv(variants=True))
    for tid, s in result.summary.items():
        print(
            f"{tid}: trials={s['trials']} min_margin={s['min_margin']:.3e} "
            f"mean_margin={s['mean_margin']:.3e} violated={s['violations']} "
            f"inconclusive={s['inconclusive']} errors={s['errors']}",
            file=sys.stderr,
        )
        for seed, idx in s["violation_seeds"]:
            print(f"  violation: seed={seed} trial={idx}", file=sys.stderr)
    bad = [r for r in result.reports if r.theorem_id in ASSERTED and r.verdict in (VIOLATED, ERROR)]
    return EXIT_FAIL if bad else EXIT_OK


def cmd_replay(args) -> int:
    try:
        doc = json.loads(Path(args.report).read_text())
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read report {args.report!r}: {exc}") from exc
    records = doc.get("variants" if args.variant else "reports", [])
    matches = [r for r in records if r.get("trial_index") == args.trial
               and (args.theorem is None or r.get("theorem_id") == args.theorem)]
    if not matches:
        raise InputError(f"no trial {args.trial} in {args.report}")
    if len(matches) > 1:
        raise InputError(f"trial {args.trial} is ambiguous; pass --theorem")
    rec = matches[0]
    cfg = doc.get("config", {})
    rep = replay(rec, rtol=cfg.get("rtol", 1e-10), tol_rel=cfg.get("tol_rel", 1e-9))

    def rel(a, b):
        return abs(a - b) / max(abs(b), 1e-300)

    dl, dr = rel(rep.lhs, rec["lhs"]), rel(rep.rhs, rec["rhs"])
    ok = dl <= 1e-12 and dr <= 1e-12
    print(json.dumps({
        "theorem_id": rec["theorem_id"], "trial_index": rec["trial_index"], "seed": rec["seed"],
        "recorded": {"lhs": rec["lhs"], "rhs": rec["rhs"], "margin": rec["margin"]},
        "replayed": {"lhs": rep.lhs, "rhs": rep.rhs, "margin": rep.margin, "verdict": rep.verdict},
        "rel_diff": {"lhs": dl, "rhs": dr}, "match": ok,
    }))
    return EXIT_OK if ok else EXIT_FAIL


def build_parser():
    ap = argparse.ArgumentParser(prog="hadfrac", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="cmd", required=True)

    ev = sub.add_parser("eval", help="evaluate one operator")
    ev.add_argument("--op", choices=OPS, default="hadamard-left")
    ev.add_argument("--alpha", type=float, required=True)
    ev.add_argument("--beta", type=float, default=1.0)
    ev.add_argument("--x", type=float, default=math.e)
    ev.add_argument("--a", type=float, default=None, help="lower limit (default 1 for hadamard-left, 0 for rl-left)")
    ev.add_argument("--b", type=float, default=None, help="upper limit (right operators)")
    ev.add_argument("--lambda", dest="lam", type=float, default=None)
    ev.add_argument("--fn", default=None, help="const:c | power:lambda | spline:FILE | inline JSON")
    ev.add_argument("--X", type=float, default=E2, help="right end of the working interval")
    ev.add_argument("--rtol", type=float, default=1e-10)
    ev.set_defaults(func=cmd_eval)

    idt = sub.add_parser("identity", help="closed-form, semigroup and beta=1 reduction checks")
    idt.add_argument("--semigroup-trials", type=int, default=100)
    idt.add_argument("--reduction-funcs", type=int, default=50)
    idt.add_argument("--seed", type=int, default=2024)
    idt.add_argument("--corrupt-gamma", type=float, default=None, help=argparse.SUPPRESS)
    idt.set_defaults(func=cmd_identity)

    st = sub.add_parser("suite", help="random-trial inequality suite")
    st.add_argument("--trials", type=int, default=1000)
    st.add_argument("--seed", type=int, default=12345)
    st.add_argument("--theorem", action="append", choices=THEOREMS)
    st.add_argument("--tol-rel", type=float, default=1e-9)
    st.add_argument("--alphas", type=float, nargs="+")
    st.add_argument("--betas", type=float, nargs="+")
    st.add_argument("--ps", type=float, nargs="+")
    st.add_argument("--xs", type=float, nargs="+")
    st.add_argument("--corridor", type=float, nargs=2, action="append", metavar=("m", "M"))
    st.add_argument("--degenerate", action="store_true",
                    help="equality configurations (m=M=1, f=h, sigma=1)")
    st.add_argument("--workers", type=int, default=None,
                    help="worker processes (default: $HADFRAC_THREADS or 1)")
    st.add_argument("--out", default=None, help="report path (default stdout)")
    st.add_argument("--format", choices=("csv", "json"), default=None)
    st.add_argument("--json", default=None, help="also write the replayable JSON report here")
    st.add_argument("--variants", default=None, help="write the literal-reading T3_1 variant CSV here")
    st.set_defaults(func=cmd_suite)

    rp = sub.add_parser("replay", help="re-evaluate one recorded trial")
    rp.add_argument("report")
    rp.add_argument("--trial", type=int, required=True)
    rp.add_argument("--theorem", choices=THEOREMS, default=None)
    rp.add_argument("--variant", action="store_true", help="look in the variant records")
    rp.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (InputError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
