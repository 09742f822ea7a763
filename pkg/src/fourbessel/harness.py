"""Cross-method checks over parameter grids."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .closedform import validate
from .errors import FourBesselError
from .evaluate import METHODS, evaluate, method_available
from .grid import GridSpec
from .params import EvalRequest, Parameters

AGREEMENT_REL = 1e-7


@dataclass
class PointReport:
    params: Parameters
    tau: float
    status: str
    values: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)
    max_deviation: float = 0.0
    tolerance: float = 0.0
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    @property
    def skipped(self) -> bool:
        return self.status.startswith("skipped")


def check_point(params: Parameters, tau: float, methods=METHODS) -> PointReport:
    """Evaluate one (params, tau) with a = 1, b = tau and compare every pair of methods.

    A pair fails when |v_i - v_j| > err_i + err_j + 1e-7 |v|.
    """
    req = EvalRequest(params, 1.0, tau)
    violations = validate(req)
    if violations:
        kinds = sorted({v.kind for v in violations})
        status = "skipped: degenerate" if "Degenerate" in kinds else "skipped: invalid"
        return PointReport(params, tau, status, detail="; ".join(str(v) for v in violations))
    report = PointReport(params, tau, "pass")
    for m in methods:
        if not method_available(req, m):
            continue
        try:
            res = evaluate(req, m)
        except FourBesselError as exc:
            report.status = "fail"
            report.detail += f"{m}: {exc}; "
            continue
        report.values[m] = res.value
        report.errors[m] = res.abs_err_est
    names = list(report.values)
    scale = max(abs(v) for v in report.values.values()) if names else 0.0
    worst = 0.0
    for x, y in itertools.combinations(names, 2):
        dev = abs(report.values[x] - report.values[y])
        tol = report.errors[x] + report.errors[y] + AGREEMENT_REL * scale
        if dev > report.max_deviation:
            report.max_deviation = dev
        if tol > 0 and dev / tol > worst:
            worst = dev / tol
            report.tolerance = tol
        if dev > tol:
            report.status = "fail"
            report.detail += f"{x} vs {y}: deviation {dev:.3g} > {tol:.3g}; "
    report.detail = report.detail.rstrip("; ")
    return report


def _check_args(args):
    return check_point(*args)


def run_grid(blocks: list[GridSpec], jobs: int = 1) -> list[PointReport]:
    """All points of all blocks, in grid order whatever ``jobs`` is."""
    tasks = [(p, t, b.methods) for b in blocks for p, t in b.points()]
    if jobs <= 1:
        return [check_point(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_check_args, tasks, chunksize=8))
