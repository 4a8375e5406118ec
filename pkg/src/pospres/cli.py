"""``pospres`` command line.

Every command prints one JSON verdict ``{"command", "status", "payload"}`` on
stdout.  Exit codes: 0 success / no violation, 1 malformed input or other
error, 2 budget exceeded, 3 violation found.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import serialize as js
from .constgroup import ConstOperator, exp_dc, log_dc
from .diagonal import c_to_t, diagonal_to_canonical, t_to_c
from .errors import MalformedInput, PospresError
from .levy import DEFAULT_T_GRID, evolve, refute_generator, refute_poly_generator, synth_generator
from .membership import (
    DEFAULT_DEGREE_BUDGET,
    DEFAULT_ITERATIONS,
    DEFAULT_SEED_DEGREE,
    check_in_g,
    limit_formula_check,
)
from .moment import DEFAULT_TOL, NoViolationFound, ViolationCertificate, preserver_test, verify_certificate
from .operator import DiffOperator, apply, as_diff_operator, canonical_from_action
from .poly import evaluate

EXIT_OK, EXIT_ERROR, EXIT_BUDGET, EXIT_VIOLATION = 0, 1, 2, 3
STATUS_EXIT = {"ok": EXIT_OK, "error": EXIT_ERROR, "budget-exceeded": EXIT_BUDGET, "violation": EXIT_VIOLATION}


def _load(path: str):
    """Read a JSON artifact; a full verdict printed by another command is unwrapped to its payload."""
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise MalformedInput(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{path} is not valid JSON: {exc}") from None
    if isinstance(obj, dict) and {"command", "status", "payload"} <= obj.keys():
        if obj["status"] == "error":
            raise MalformedInput(f"{path} holds an error verdict")
        obj = obj["payload"]
    return obj


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise MalformedInput(f"not an exact rational: {text!r}") from None


def _rationals(text: str) -> list[Fraction]:
    return [_rational(t) for t in text.split(",") if t.strip()]


def _grid(text: str | None):
    if text is None or text == "auto":
        return None
    obj = _load(text)
    pts = obj["grid"] if isinstance(obj, dict) else obj
    return [tuple(js.scalar_from_json(v) for v in p) for p in pts]


def _const(obj) -> ConstOperator:
    A = js.operator_from_json(obj)
    if isinstance(A, DiffOperator):
        if any(q.degree > 0 for _, q in A.items()):
            raise MalformedInput("expected constant coefficients")
        A = ConstOperator(A.n, A.D, {a: q.coeff((0,) * A.n) for a, q in A.items()})
    return A


def _violation_payload(cert: ViolationCertificate, t=None) -> dict:
    out = js.certificate_to_json(cert)
    if t is not None:
        out = {"t": js.scalar_to_json(t), "certificate": out}
    return out


# -- commands ----------------------------------------------------------------

def cmd_canon(args):
    n, D, action = js.action_from_json(_load(args.action))
    return "ok", js.operator_to_json(canonical_from_action(action, n, D))


def cmd_apply(args):
    T = js.operator_from_json(_load(args.operator))
    f = js.poly_from_json(_load(args.poly))
    return "ok", js.poly_to_json(apply(as_diff_operator(T), f))


def cmd_diag(args):
    s = js.diagonal_from_json(_load(args.sequence))
    target = args.to or ("c" if s.kind == "t" else "t")
    if target == "canonical":
        c = t_to_c(s) if s.kind == "t" else s
        return "ok", js.operator_to_json(diagonal_to_canonical(c))
    if target == s.kind:
        return "ok", js.diagonal_to_json(s)
    return "ok", js.diagonal_to_json(t_to_c(s) if target == "c" else c_to_t(s))


def cmd_exp(args):
    A = _const(_load(args.algebra))
    if args.t is not None:
        A = A * _rational(args.t)
    return "ok", js.const_to_json(exp_dc(A, args.order))


def cmd_log(args):
    return "ok", js.const_to_json(log_dc(_const(_load(args.group)), args.order))


def cmd_member(args):
    A = as_diff_operator(js.operator_from_json(_load(args.operator)))
    verdict = check_in_g(A, args.seed_degree, args.degree_budget, args.iterations)
    payload = js.membership_to_json(verdict)
    if not verdict.member:
        return "budget-exceeded", payload
    if args.limit:
        f = js.poly_from_json(_load(args.limit))
        cert = next((c for c in verdict.filtration if c.dim and f.degree <= max(b.degree for b in c.basis)), None)
        cert = verdict.filtration[-1] if cert is None else cert
        payload["limit"] = js.limit_rows_to_json(limit_formula_check(A, cert, f, [int(k) for k in args.k.split(",")]))
    return "ok", payload


def cmd_check(args):
    T = as_diff_operator(js.operator_from_json(_load(args.operator)))
    K = js.kspec_from_text(args.K)
    res = preserver_test(T, K, _grid(args.grid), args.order, args.tol)
    if isinstance(res, ViolationCertificate):
        return "violation", _violation_payload(res)
    return "ok", js.no_violation_to_json(res)


def cmd_verify(args):
    T = as_diff_operator(js.operator_from_json(_load(args.operator)))
    obj = _load(args.certificate)
    # a sweep payload nests the certificate next to its time
    if "certificate" in obj:
        obj = obj["certificate"]
    cert = js.certificate_from_json(obj)
    K = js.kspec_from_text(args.K)
    ok = verify_certificate(T, cert, K)
    payload = {"verified": ok}
    if args.samples:
        rng = np.random.default_rng(args.seed)
        pts = K.sample(args.samples, rng, cert.witness.n)
        wf = cert.witness.map_coefficients(float)
        worst = min(float(evaluate(wf, tuple(p))) for p in pts)
        payload["sampled_min"] = worst
        payload["samples"] = args.samples
    return ("ok" if ok else "error"), payload


def cmd_synth(args):
    trip = js.triplet_from_json(_load(args.triplet))
    return "ok", js.const_to_json(synth_generator(trip, args.order))


def cmd_evolve(args):
    trip = js.triplet_from_json(_load(args.triplet))
    f = js.poly_from_json(_load(args.poly))
    ts = _rationals(args.t)
    results = [(t, evolve(trip, t, f, args.order)) for t in ts]
    if args.csv:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "alpha", "coeff"])
        for t, g in results:
            for alpha, c in g.items():
                w.writerow([str(t), " ".join(map(str, alpha)), js.scalar_to_json(c)])
        return "ok", {"csv": buf.getvalue()}
    if len(results) == 1:
        return "ok", js.poly_to_json(results[0][1])
    return "ok", {"trajectory": [{"t": str(t), "poly": js.poly_to_json(g)} for t, g in results]}


def cmd_sweep(args):
    gen = js.operator_from_json(_load(args.gen))
    K = js.kspec_from_text(args.K)
    tgrid = _rationals(args.tgrid) if args.tgrid else list(DEFAULT_T_GRID)
    ygrid = _grid(args.ygrid)
    if isinstance(gen, ConstOperator):
        res = refute_generator(gen, K, tgrid, ygrid, args.order, args.tol)
    elif all(q.degree <= 0 for _, q in gen.items()):
        res = refute_generator(_const(_load(args.gen)), K, tgrid, ygrid, args.order, args.tol)
    else:
        res = refute_poly_generator(gen, K, tgrid, ygrid, args.order, args.tol)
    if isinstance(res, NoViolationFound):
        return "ok", js.no_violation_to_json(res)
    t, cert = res
    return "violation", _violation_payload(cert, t)


# -- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # usage errors become error verdicts (exit 1) instead of argparse's exit 2
    def error(self, message):
        raise MalformedInput(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="pospres",
        description="Operator calculus on polynomial rings and positivity-preserver refutation.",
        epilog="Exit codes: 0 ok/no violation, 1 error, 2 budget exceeded, 3 violation.",
    )
    p.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("canon", help="canonical table of a linear map given on monomials")
    s.add_argument("--action", required=True, help='JSON {"n","D","images":[{"alpha","image"}]}')
    s.set_defaults(func=cmd_canon)

    s = sub.add_parser("apply", help="apply an operator to a polynomial")
    s.add_argument("--operator", required=True, help="operator JSON")
    s.add_argument("--poly", required=True, help="polynomial JSON")
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("diag", help="binomial transforms of a diagonal sequence")
    s.add_argument("--sequence", required=True, help="diagonal sequence JSON (kind t or c)")
    s.add_argument("--to", choices=["t", "c", "canonical"], help="target representation (default: the other kind)")
    s.set_defaults(func=cmd_diag)

    s = sub.add_parser("exp", help="exponential of a constant-coefficient algebra element")
    s.add_argument("--algebra", required=True, help="constant operator JSON with a_0 = 0")
    s.add_argument("--order", type=int, help="truncation order (default: operator order)")
    s.add_argument("--t", help="exact rational time factor")
    s.set_defaults(func=cmd_exp)

    s = sub.add_parser("log", help="logarithm of a constant-coefficient group element")
    s.add_argument("--group", required=True, help="constant operator JSON with a_0 = 1")
    s.add_argument("--order", type=int, help="truncation order (default: operator order)")
    s.set_defaults(func=cmd_log)

    s = sub.add_parser("member", help="certify finite-dimensional invariant subspaces")
    s.add_argument("--operator", required=True)
    s.add_argument("--seed-degree", type=int, default=DEFAULT_SEED_DEGREE)
    s.add_argument("--degree-budget", type=int, default=DEFAULT_DEGREE_BUDGET)
    s.add_argument("--iterations", type=int, default=DEFAULT_ITERATIONS)
    s.add_argument("--limit", help="polynomial JSON; also report limit-formula deviations for it")
    s.add_argument("--k", default="2,8,32,128,512", help="comma-separated k values for --limit")
    s.set_defaults(func=cmd_member)

    def moment_flags(s, opname):
        s.add_argument(opname, required=True)
        s.add_argument("--K", default="R", help="R | halfline[:a] | interval:a,b")
        s.add_argument("--order", type=int, default=2, help="half order d of the moment matrices")
        s.add_argument("--tol", type=float, default=DEFAULT_TOL)

    s = sub.add_parser("check", help="look for a positivity violation of an operator")
    moment_flags(s, "--operator")
    s.add_argument("--grid", default="auto", help="auto or JSON list of base points")
    s.set_defaults(func=cmd_check)

    s = sub.add_parser("verify", help="re-verify a violation certificate")
    s.add_argument("--certificate", required=True)
    s.add_argument("--operator", required=True)
    s.add_argument("--K", default="R")
    s.add_argument("--samples", type=int, default=1000, help="random K points to evaluate the witness at")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("synth", help="generator from a Lévy triplet")
    s.add_argument("--triplet", required=True)
    s.add_argument("--order", type=int, default=4)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("evolve", help="exp(tA) f for a Lévy generator")
    s.add_argument("--triplet", required=True)
    s.add_argument("--t", required=True, help="exact rational time, or comma-separated list")
    s.add_argument("--poly", required=True)
    s.add_argument("--order", type=int, help="truncation order (default deg f)")
    s.add_argument("--csv", action="store_true", help="emit coefficient trajectories as CSV")
    s.set_defaults(func=cmd_evolve)

    s = sub.add_parser("sweep", help="refutation sweep over times and base points for a generator")
    moment_flags(s, "--gen")
    s.add_argument("--tgrid", help="comma-separated positive rationals (default 1/4,1,4)")
    s.add_argument("--ygrid", default="auto")
    s.set_defaults(func=cmd_sweep)
    return p


def run(argv: list[str] | None = None) -> tuple[dict, int]:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
        status, payload = args.func(args)
    except (PospresError, KeyError, TypeError, ValueError) as exc:
        status, payload = "error", {"error": type(exc).__name__, "message": str(exc)}
    return {"command": argv, "status": status, "payload": payload}, STATUS_EXIT[status]


def main(argv: list[str] | None = None) -> int:
    verdict, code = run(argv)
    json.dump(verdict, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
