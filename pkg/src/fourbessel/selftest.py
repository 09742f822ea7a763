"""Fast internal consistency checks run by ``fourbessel selftest``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closedform import eval_integral, validate
from .errors import InvalidPattern
from .grid import bundled_grid_text, parse_grid
from .hypergeom import direct_pattern_sum, pattern_to_pfq, sum_pfq
from .mellin import build_integrand, choose_contour, enumerate_pole_families, residue_pattern_list
from .oracle import oscillatory_integral
from .params import EvalRequest, Parameters
from .specfun import bessel_j, gamma_real

GOLDEN_SCALES = ((2.0, 1.0), (1.0, 2.0), (1.0, 3.0), (5.0, 4.0), (4.0, 5.0))
FAMILY_STRINGS = {
    "left": ["u = mu/2 - k", "u = (mu-1)/2 - k", "u = -(gamma+delta)/2 - k"],
    "right": ["u = (mu+alpha+beta+1)/2 + k", "u = 1 + k", "u = 1/2 + k"],
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.name}: {self.detail}"


def check_golden() -> CheckResult:
    """mu = 0, all orders 1/2: the integral equals 1/(pi max(a, b))."""
    params = Parameters(0.0, 0.5, 0.5, 0.5, 0.5)
    worst_closed = worst_oracle = 0.0
    for a, b in GOLDEN_SCALES:
        req = EvalRequest(params, a, b)
        exact = 1.0 / (math.pi * max(a, b))
        worst_closed = max(worst_closed, abs(eval_integral(req).value / exact - 1.0))
        worst_oracle = max(worst_oracle, abs(oscillatory_integral(req).value / exact - 1.0))
    ok = worst_closed <= 1e-8 and worst_oracle <= 1e-6
    return CheckResult("golden half-order law", ok,
                       f"closed rel err {worst_closed:.2e} (<= 1e-8), oracle rel err {worst_oracle:.2e} (<= 1e-6)")


def random_pattern_cases(n: int = 20, seed: int = 20240611):
    """``n`` random valid parameter sets, each with one tau per branch."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        mu = rng.uniform(-1.0, 0.9)
        orders = rng.uniform(0.0, 2.5, size=4)
        params = Parameters(mu, *orders)
        tau = rng.uniform(0.2, 0.9)
        if validate(EvalRequest(params, 1.0, tau)):
            continue
        out.append((params, tau, 1.0 / rng.uniform(0.2, 0.9)))
    return out


def check_conversion(n: int = 20) -> CheckResult:
    """Raw gamma-product sums against prefactor x pFq, all six residue patterns."""
    worst = 0.0
    count = 0
    for params, tau_lo, tau_hi in random_pattern_cases(n):
        for tau in (tau_lo, tau_hi):
            for _, pat in residue_pattern_list(params, tau):
                try:
                    pref, spec = pattern_to_pfq(pat)
                except InvalidPattern:
                    continue
                via_pfq = pref * sum_pfq(spec).value
                direct = direct_pattern_sum(pat, 200)
                worst = max(worst, abs(direct - via_pfq) / max(abs(direct), 1e-300))
                count += 1
    return CheckResult("gamma-pattern to pFq conversion", worst <= 1e-9 and count >= 6 * n,
                       f"{count} patterns, worst rel diff {worst:.2e} (<= 1e-9)")


def check_specfun(seed: int = 7) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst_dup = 0.0
    for z in rng.uniform(0.01, 20.0, size=200):
        lhs = gamma_real(z) * gamma_real(z + 0.5)
        rhs = 2.0 ** (1 - 2 * z) * math.sqrt(math.pi) * gamma_real(2 * z)
        worst_dup = max(worst_dup, abs(lhs - rhs) / abs(rhs))
    worst_rec = 0.0
    xs = np.linspace(0.1, 100.0, 400)
    for nu in np.linspace(-5.0, 5.0, 21):
        jm, j0, jp = bessel_j(nu - 1, xs), bessel_j(nu, xs), bessel_j(nu + 1, xs)
        resid = np.abs(jm + jp - 2 * nu / xs * j0) / np.maximum(1.0, np.abs(j0))
        worst_rec = max(worst_rec, float(resid.max()))
    half = abs(gamma_real(0.5) / math.sqrt(math.pi) - 1.0)
    mhalf = abs(gamma_real(-0.5) / (-2.0 * math.sqrt(math.pi)) - 1.0)
    ok = worst_dup <= 1e-12 and worst_rec <= 1e-10 and half <= 1e-15 and mhalf <= 1e-15
    return CheckResult("special-function identities", ok,
                       f"duplication {worst_dup:.2e}, Bessel recurrence {worst_rec:.2e}, "
                       f"Gamma(1/2) {half:.1e}, Gamma(-1/2) {mhalf:.1e}")


def check_pole_bookkeeping() -> CheckResult:
    probe = build_integrand(Parameters(0.3, 1.1, 0.7, 0.4, 1.9))
    fams = enumerate_pole_families(probe)
    strings = {d: [f.describe() for f in fams if f.direction == d] for d in ("left", "right")}
    ok_strings = strings == FAMILY_STRINGS
    checked = 0
    bad = 0
    for block in parse_grid(bundled_grid_text()):
        for params, tau in block.points():
            if validate(EvalRequest(params, 1.0, tau)):
                continue
            fams = enumerate_pole_families(build_integrand(params))
            c = choose_contour(fams).c
            checked += 1
            for f in fams:
                for k in range(51):
                    p = f.pole(k)
                    if (f.direction == "left" and not p < c) or (f.direction == "right" and not p > c):
                        bad += 1
    return CheckResult("pole families and contour placement", ok_strings and bad == 0 and checked > 0,
                       f"family strings {'match' if ok_strings else 'differ: ' + repr(strings)}, "
                       f"{checked} grid points, {bad} misplaced poles")


def run_selftest() -> list[CheckResult]:
    return [check_golden(), check_conversion(), check_specfun(), check_pole_bookkeeping()]
