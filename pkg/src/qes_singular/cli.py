"""Command-line front end.

Subcommands: solve, scan, verify, map, export.  JSON goes to stdout, CSV to
``--out``.  Exit codes:

    0  success
    1  verification ran but did not pass
    2  invalid flags or parameters
    3  parameters are not quasi-exact (residuals are still printed)
    4  degenerate denominator in a closed form
    5  numerical solver failure (bracket, grid or resolution)
    6  output path not writable
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Optional

from . import closed_form, confined, scan, verify
from .errors import (
    BracketFailure,
    DegenerateParametersError,
    DomainError,
    GridFailure,
    NotMappableError,
    ResolutionError,
)
from .model import Channel, PotentialParams, SolverConfig, dumps

EXIT_OK = 0
EXIT_NOT_PASSED = 1
EXIT_USAGE = 2
EXIT_NOT_QES = 3
EXIT_DEGENERATE = 4
EXIT_SOLVER = 5
EXIT_UNWRITABLE = 6

RESIDUAL_TOL = 1e-9
CROSS_TOL = 1e-4


class _Usage(Exception):
    pass


def _sign(text: str):
    t = text.strip().lower()
    if t == "both":
        return "both"
    if t in ("+1", "1", "+"):
        return 1
    if t in ("-1", "-"):
        return -1
    raise argparse.ArgumentTypeError(f"alpha sign must be +1, -1 or both, got {text!r}")


def _int_list(text: str) -> list:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    # global flags work before or after the subcommand; the subcommand copies
    # default to SUPPRESS so they do not overwrite a value given up front
    def global_flags(default):
        p = argparse.ArgumentParser(add_help=False)
        p.add_argument("--config", default=default(None), help="JSON file with solver settings")
        p.add_argument("--quiet", action="store_true", default=default(False), help="suppress JSON output")
        return p

    common = global_flags(lambda _: argparse.SUPPRESS)

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--a", type=float, required=True)
    params.add_argument("--b", type=float, required=True)
    params.add_argument("--c", type=float, required=True)
    params.add_argument("--dim", type=int, default=3)
    params.add_argument("--l", type=int, default=0)
    params.add_argument("--k", type=int, default=0)
    params.add_argument("--confined", action="store_true")
    params.add_argument("--alpha-sign", type=_sign, default=-1)
    params.add_argument(
        "--refine", action="store_true", help="snap b to the nearest exact root within 1e-3"
    )

    parser = argparse.ArgumentParser(prog="qes-singular", description=__doc__.split("\n")[0], parents=[global_flags(lambda d: d)])
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("solve", parents=[common, params], help="closed-form solution and its constraint residuals")

    p_scan = sub.add_parser("scan", parents=[common], help="find all b admitting a quasi-exact solution")
    p_scan.add_argument("--a", type=float, required=True)
    p_scan.add_argument("--c", type=float, required=True)
    p_scan.add_argument("--dim", type=int, default=3)
    p_scan.add_argument("--l", type=_int_list, default=[0])
    p_scan.add_argument("--k", type=int, default=0)
    p_scan.add_argument("--confined", action="store_true")
    p_scan.add_argument("--alpha-sign", type=_sign, default=-1)

    p_ver = sub.add_parser("verify", parents=[common, params], help="compare with numerical eigenvalues")
    p_ver.add_argument("--method", choices=["shooting", "fd", "both"], default="shooting")
    p_ver.add_argument("--expect-energy", type=float)
    p_ver.add_argument("--radius", type=float, help="box radius for non-quasi-exact confined runs")

    sub.add_parser("map", parents=[common, params], help="confined k solution to unconfined k+1")

    p_exp = sub.add_parser("export", parents=[common, params], help="write wavefunction samples as CSV")
    p_exp.add_argument("--out", required=True)
    p_exp.add_argument("--points", type=int, default=1000)
    return parser


# --------------------------------------------------------------------------


def _config(args) -> SolverConfig:
    if not args.config:
        return SolverConfig()
    try:
        with open(args.config) as fh:
            return SolverConfig.from_dict(json.load(fh))
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        raise _Usage(f"cannot read config {args.config}: {exc}") from exc


def _emit(args, payload) -> None:
    if not args.quiet:
        sys.stdout.write(dumps(payload) + "\n")


def _refined_b(args) -> float:
    if not args.refine:
        return args.b
    sign = args.alpha_sign if args.alpha_sign != "both" else -1
    sol = scan.refine_b(args.a, args.b, args.c, args.dim, args.l, args.k, args.confined, sign)
    return args.b if sol is None else sol.params.b


def _closed_form(args) -> tuple:
    """(solution or None, payload dict) for the parameter flags."""
    b = _refined_b(args)
    params = PotentialParams(args.a, b, args.c)
    channel = Channel(args.dim, args.l, args.k)
    L = channel.L
    payload = {"params": params, "channel": channel, "confined": args.confined}
    if not args.confined:
        if args.k > 2:
            raise DomainError("closed forms exist for k <= 2")
        sol = closed_form.build_solution(params, channel)
        res = closed_form.constraint_residual(params, L, args.k)
        payload.update(solution=sol, residuals={f"k{args.k}_constraint": res})
        ok = abs(res) <= RESIDUAL_TOL
        nodes = len(sol.prefactor.positive_nodes())
        payload["nodes"] = nodes
        return (sol if ok and nodes == args.k else None), payload
    sign = args.alpha_sign
    if sign == "both":
        raise DomainError("solve/verify/map/export need a single alpha sign")
    alpha = sign * math.sqrt(args.a)
    if args.k == 0:
        R2 = confined.k0_box_radius(params, L, alpha)
        res = confined.k0_alpha_constraint_residual(params, L, R2, alpha)
        payload.update(R2=R2, residuals={"k0_alpha_constraint": res})
        if R2 > 0.0:
            sol = confined.build_confined_solution(params, channel, sign, R2)
            payload["solution"] = sol
            if abs(res) <= RESIDUAL_TOL:
                return sol, payload
        else:
            payload["solution"] = None
        return None, payload
    if args.k != 1:
        raise DomainError("confined closed forms exist for k <= 1")
    candidates = []
    chosen = None
    for R2, a1 in confined.k1_radius_candidates(params, L, alpha):
        r = confined.k1_confined_residuals(params, L, alpha, a1, R2)
        entry = {"R2": R2, "a1": a1, "residuals": {"a1": r[0], "R2": r[1], "alpha": r[2]}}
        if R2 > 0.0:
            sol = confined.build_confined_solution(params, channel, sign, R2, a1)
            entry["interior_nodes"] = len(confined.interior_nodes(sol))
            entry["solution"] = sol
            if chosen is None and entry["interior_nodes"] == 1 and max(map(abs, r)) <= RESIDUAL_TOL:
                chosen = sol
        candidates.append(entry)
    payload["candidates"] = candidates
    payload["solution"] = chosen
    return chosen, payload


def cmd_solve(args) -> int:
    sol, payload = _closed_form(args)
    payload["quasi_exact"] = sol is not None
    _emit(args, payload)
    return EXIT_OK if sol is not None else EXIT_NOT_QES


def cmd_scan(args) -> int:
    cfg = _config(args)
    req = scan.ScanRequest(args.a, args.c, args.dim, tuple(args.l), args.k, args.confined, args.alpha_sign, cfg)
    _emit(args, scan.scan_b(req))
    return EXIT_OK


def cmd_verify(args) -> int:
    cfg = _config(args)
    methods = ["shooting", "fd_matrix"] if args.method == "both" else [
        "fd_matrix" if args.method == "fd" else "shooting"
    ]
    sol, _ = _closed_form(args)
    if sol is not None:
        reports = [verify.verify_solution(sol, cfg, m) for m in methods]
    else:
        box = args.radius if args.confined else None
        if args.confined and box is None:
            raise DomainError("no closed-form box radius; pass --radius")
        params = PotentialParams(args.a, _refined_b(args), args.c)
        channel = Channel(args.dim, args.l, args.k)
        reports = [verify.numeric_report(params, channel, box, cfg, m, args.expect_energy) for m in methods]
    payload = {"reports": reports}
    if len(reports) == 2:
        rel = verify.relative_error(reports[0].e_numeric, reports[1].e_numeric)
        payload["cross_agreement"] = {"rel_difference": rel, "within_tolerance": rel <= CROSS_TOL}
    _emit(args, payload)
    statuses = {r.status for r in reports}
    if statuses == {"pass"} and payload.get("cross_agreement", {}).get("within_tolerance", True):
        return EXIT_OK
    if "skipped" in statuses:
        return EXIT_NOT_QES
    return EXIT_NOT_PASSED


def cmd_map(args) -> int:
    args.confined = True
    sol, payload = _closed_form(args)
    if sol is None:
        _emit(args, payload)
        return EXIT_NOT_QES
    try:
        mapped = confined.map_confined_to_unconfined(sol)
    except NotMappableError as exc:
        payload["error"] = str(exc)
        _emit(args, payload)
        return EXIT_NOT_QES
    res = closed_form.constraint_residual(mapped.params, mapped.L, mapped.channel.k)
    _emit(args, {"confined": sol, "unconfined": mapped, "unconfined_residual": res})
    return EXIT_OK


def cmd_export(args) -> int:
    if args.points < 1:
        raise _Usage("--points must be >= 1")
    cfg = _config(args)
    sol, payload = _closed_form(args)
    if sol is None:
        sol = payload.get("solution")
    if sol is None:
        _emit(args, payload)
        return EXIT_NOT_QES
    samples = verify.sample_wavefunction(sol, args.points, cfg)
    try:
        verify.write_samples_csv(samples, args.out)
    except OSError as exc:
        sys.stderr.write(f"cannot write {args.out}: {exc}\n")
        return EXIT_UNWRITABLE
    _emit(args, {"out": args.out, "rows": len(samples), "solution": sol})
    return EXIT_OK


_COMMANDS = {"solve": cmd_solve, "scan": cmd_scan, "verify": cmd_verify, "map": cmd_map, "export": cmd_export}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (_Usage, DomainError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except DegenerateParametersError as exc:
        sys.stderr.write(f"degenerate parameters: {exc}\n")
        return EXIT_DEGENERATE
    except (BracketFailure, GridFailure, ResolutionError) as exc:
        sys.stderr.write(f"solver failure: {exc}\n")
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
