"""Command-line front end.

Exit codes: 0 success, 2 input or validation error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import sys
import time
from pathlib import Path

import numpy as np

from .closedform import validate
from .errors import FourBesselError, ValidationError
from .evaluate import METHODS, evaluate, method_available
from .grid import GridError, bundled_grid_text, in_resonance_band, parse_grid
from .harness import run_grid
from .params import EvalRequest, EvalResult, Parameters
from .selftest import run_selftest

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3
SWEEP_COLUMNS = ["tau", "value", "abs_err_est", "method", "branch", "terms_used", "slow_convergence", "error"]
REPORT_COLUMNS = ["mu", "alpha", "beta", "gamma", "delta", "tau", "status",
                  *METHODS, "max_deviation", "tolerance", "detail"]


def fmt(x: float) -> str:
    """17 significant digits: round-trips every double."""
    return format(float(x), ".17g")


def write_csv(rows, columns, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([row.get(c, "") for c in columns])


def _terms_used(res: EvalResult) -> str:
    d = res.diagnostics
    if "terms_used" in d:
        t = d["terms_used"]
        return ";".join(str(v) for v in t) if isinstance(t, (list, tuple)) else str(t)
    if "nodes" in d:
        return str(d["nodes"])
    if "tail_panels" in d:
        return str(d["tail_panels"])
    return ""


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    return obj


def _params(args) -> Parameters:
    return Parameters(args.mu, args.alpha, args.beta, args.gamma, args.delta)


def _fail(msg: str, code: int) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def _methods(choice: str) -> list[str]:
    return list(METHODS) if choice == "all" else [choice]


def cmd_eval(args) -> int:
    try:
        params = _params(args)
        a = args.a
        b = args.b if args.tau is None else args.tau * a
        req = EvalRequest(params, a, b)
    except ValueError as exc:
        return _fail(str(exc), EXIT_INPUT)
    violations = validate(req)
    if violations:
        return _fail("; ".join(str(v) for v in violations), EXIT_INPUT)
    results, skipped = [], []
    for m in _methods(args.method):
        if not method_available(req, m):
            skipped.append(m)
            continue
        try:
            results.append(evaluate(req, m, args.rel_tol))
        except ValidationError as exc:
            return _fail(str(exc), EXIT_INPUT)
        except FourBesselError as exc:
            return _fail(f"{m}: {type(exc).__name__}: {exc}", EXIT_NUMERIC)
    dev = max((abs(x.value - y.value) for x, y in itertools.combinations(results, 2)), default=0.0)
    if args.json:
        if args.method == "all":
            out = {"request": req.as_dict(), "results": [r.as_dict() for r in results],
                   "max_pairwise_deviation": dev, "skipped": skipped}
        else:
            out = {"request": req.as_dict(), **results[0].as_dict()}
        print(json.dumps(_jsonable(out)))
        return EXIT_OK
    for r in results:
        print(f"value={fmt(r.value)} abs_err_est={fmt(r.abs_err_est)} method={r.method.value} branch={r.branch.value}")
    for m in skipped:
        print(f"method={m} skipped: mu above the oracle limit")
    if args.method == "all":
        print(f"max_pairwise_deviation={fmt(dev)}")
    return EXIT_OK


def parse_tau_list(text: str) -> list[float]:
    """``0.1,0.2,0.5`` or ``lo:hi:n`` (n evenly spaced values, ends included)."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"tau range must be lo:hi:n, got {text!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise ValueError("tau range needs n >= 1")
        vals = list(np.linspace(lo, hi, n)) if n > 1 else [lo]
    else:
        vals = [float(s) for s in text.split(",") if s.strip()]
    if not vals:
        raise ValueError("no tau values given")
    if any(not v > 0 for v in vals):
        raise ValueError("tau values must be positive")
    return sorted(float(v) for v in vals)


def _sweep_row(params, tau, method):
    row = {"tau": fmt(tau), "method": method}
    if in_resonance_band(tau):
        row["error"] = "resonance-band"
        return row, None
    req = EvalRequest(params, 1.0, tau)
    try:
        res = evaluate(req, method)
    except FourBesselError as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row, None
    row.update(value=fmt(res.value), abs_err_est=fmt(res.abs_err_est), method=res.method.value,
               branch=res.branch.value, terms_used=_terms_used(res),
               slow_convergence="true" if res.diagnostics.get("slow_convergence") else "false")
    return row, res


def cmd_sweep(args) -> int:
    try:
        params = _params(args)
        taus = parse_tau_list(args.tau)
    except ValueError as exc:
        return _fail(str(exc), EXIT_INPUT)
    # resonance aside, convergence and degeneracy do not depend on tau
    probe = [v for v in validate(EvalRequest(params, 1.0, 0.5)) if v.kind != "Resonance"]
    if probe:
        return _fail("; ".join(str(v) for v in probe), EXIT_INPUT)
    methods = [m for m in _methods(args.method) if method_available(EvalRequest(params, 1.0, 0.5), m)]
    columns = SWEEP_COLUMNS + (["max_deviation"] if args.method == "all" else [])
    rows, failures = [], 0
    for tau in taus:
        group = [_sweep_row(params, tau, m) for m in methods]
        good = [r for _, r in group if r is not None]
        failures += sum(r is None for _, r in group)
        if args.method == "all":
            dev = max((abs(x.value - y.value) for x, y in itertools.combinations(good, 2)), default=0.0)
            for row, _ in group:
                row["max_deviation"] = fmt(dev) if len(good) > 1 else ""
        rows.extend(row for row, _ in group)
    write_csv(rows, columns, sys.stdout)
    return EXIT_NUMERIC if failures == len(rows) else EXIT_OK


def _report_row(rep) -> dict:
    p = rep.params
    row = {"mu": fmt(p.mu), "alpha": fmt(p.alpha), "beta": fmt(p.beta), "gamma": fmt(p.gamma_),
           "delta": fmt(p.delta), "tau": fmt(rep.tau), "status": rep.status, "detail": rep.detail}
    for m, v in rep.values.items():
        row[m] = fmt(v)
    if rep.values:
        row["max_deviation"] = fmt(rep.max_deviation)
        row["tolerance"] = fmt(rep.tolerance)
    return row


def cmd_crosscheck(args) -> int:
    try:
        text = Path(args.grid_file).read_text() if args.grid_file else bundled_grid_text()
        blocks = parse_grid(text)
    except OSError as exc:
        return _fail(f"cannot read grid file: {exc}", EXIT_INPUT)
    except (GridError, ValueError) as exc:
        return _fail(f"malformed grid: {exc}", EXIT_INPUT)
    t0 = time.perf_counter()
    reports = run_grid(blocks, jobs=args.jobs)
    elapsed = time.perf_counter() - t0
    rows = [_report_row(r) for r in reports]
    n_pass = sum(r.passed for r in reports)
    n_fail = sum(r.status == "fail" for r in reports)
    n_deg = sum(r.status == "skipped: degenerate" for r in reports)
    n_inv = sum(r.status == "skipped: invalid" for r in reports)
    summary = (f"crosscheck: {len(reports)} points, pass {n_pass}, fail {n_fail}, "
               f"skipped-degenerate {n_deg}, skipped-invalid {n_inv} ({elapsed:.1f} s)")
    if args.report:
        with open(args.report, "w", newline="") as fh:
            write_csv(rows, REPORT_COLUMNS, fh)
        print(summary)
    else:
        write_csv(rows, REPORT_COLUMNS, sys.stdout)
        print(summary, file=sys.stderr)
    return EXIT_OK if n_fail == 0 else EXIT_NUMERIC


def cmd_selftest(args) -> int:
    t0 = time.perf_counter()
    results = run_selftest()
    for r in results:
        print(r.line())
    ok = all(r.passed for r in results)
    print(f"selftest: {sum(r.passed for r in results)}/{len(results)} passed in {time.perf_counter() - t0:.1f} s")
    return EXIT_OK if ok else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fourbessel",
        description="Evaluate int_0^inf x^mu J_alpha(ax) J_beta(ax) J_gamma(bx) J_delta(bx) dx.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    params = argparse.ArgumentParser(add_help=False)
    params.add_argument("--mu", type=float, required=True, help="power of x")
    params.add_argument("--alpha", type=float, required=True)
    params.add_argument("--beta", type=float, required=True)
    params.add_argument("--gamma", type=float, required=True)
    params.add_argument("--delta", type=float, required=True)
    params.add_argument("--method", choices=[*METHODS, "all"], default="closed")
    params.add_argument("--rel-tol", type=float, default=None, help="series / quadrature tolerance")

    p_eval = sub.add_parser("eval", parents=[params], help="evaluate one integral")
    p_eval.add_argument("--a", type=float, default=1.0, help="scale of the alpha, beta pair")
    p_eval.add_argument("--b", type=float, default=1.0, help="scale of the gamma, delta pair")
    p_eval.add_argument("--tau", type=float, default=None, help="set b = tau * a instead of --b")
    p_eval.add_argument("--json", action="store_true", help="print one JSON object")
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", parents=[params], help="CSV over tau = b/a with a = 1")
    p_sweep.add_argument("--tau", required=True, help="comma list or lo:hi:n")
    p_sweep.set_defaults(func=cmd_sweep)

    p_cross = sub.add_parser("crosscheck", help="compare methods on a grid file")
    p_cross.add_argument("grid_file", nargs="?", default=None, help="defaults to the bundled acceptance grid")
    p_cross.add_argument("--jobs", type=int, default=1)
    p_cross.add_argument("--report", default=None, help="write the CSV report here instead of stdout")
    p_cross.set_defaults(func=cmd_crosscheck)

    p_self = sub.add_parser("selftest", help="quick internal consistency checks")
    p_self.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on bad usage, matching the input-error code
        return int(exc.code or 0)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
