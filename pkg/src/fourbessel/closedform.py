"""Closed-form evaluation as three gamma-prefactor x 6F5 terms per branch.

Notation: A = alpha+beta, B = gamma+delta, d1 = alpha-beta, d2 = gamma-delta.
The derivation and the cancellations used are recorded in FORMULA_NOTES.md.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import DegenerateParameters, FourBesselError, ValidationError
from .hypergeom import DEFAULT_REL_TOL, EPS, PFQSpec, sum_pfq
from .mellin import build_integrand, enumerate_pole_families, family_collisions, pole_gap, PoleCollision
from .params import Branch, EvalRequest, EvalResult, Method, Parameters
from .specfun import POLE_TOL, is_pole, log_abs_gamma_real

SLOW_ARGUMENT = 0.95
# per-gamma relative accuracy of the Lanczos evaluation, used in abs_err_est
GAMMA_REL_ERR = 4e-15
PERTURBATION = 1e-5


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str

    def __str__(self) -> str:
        return f"{self.kind}: {self.message}"


@dataclass(frozen=True)
class ClosedFormTerm:
    """scale * tau^power_of_tau * prod Gamma(numer) / prod Gamma(denom) * 6F5(upper; lower; tau^(+-2))."""

    power_of_tau: float
    scale: float
    numer: tuple[float, ...]
    denom: tuple[float, ...]
    upper: tuple[float, ...]
    lower: tuple[float, ...]
    z_power: int


def detect_degeneracy(params: Parameters) -> list[PoleCollision]:
    """All pairs of same-side pole families that coincide.

    Each record carries the worst net pole order over the shared points;
    ``removable`` collisions (order <= 0) leave no pole behind and are
    evaluated normally.
    """
    return family_collisions(build_integrand(params))


def validate(req: EvalRequest) -> list[Violation]:
    p = req.params
    out = []
    if not p.mu < 2:
        out.append(Violation("ConvergenceAtInfinity", f"requires mu < 2, got mu = {p.mu:g}"))
    s = p.mu + p.alpha + p.beta + p.gamma_ + p.delta + 1
    if not s > 0:
        out.append(Violation("ConvergenceAtZero", f"requires mu+alpha+beta+gamma+delta+1 > 0, got {s:g}"))
    if req.a == req.b:
        out.append(Violation("Resonance", "a = b (tau = 1) is excluded"))
    for col in detect_degeneracy(p):
        if not col.removable:
            out.append(Violation(
                "Degenerate",
                f"{col.direction} pole families collide at u = {col.first_point:g} "
                f"(order {col.max_order}): {col.condition}",
            ))
    left, right = pole_gap(enumerate_pole_families(build_integrand(p)))
    if not left < right:
        out.append(Violation(
            "ContourInfeasible",
            f"left poles reach {left:g} but right poles start at {right:g}",
        ))
    return out


def build_terms(params: Parameters, branch: Branch) -> list[ClosedFormTerm]:
    mu, al, be, ga, de = params.mu, params.alpha, params.beta, params.gamma_, params.delta
    A, B, d1, d2 = al + be, ga + de, al - be, ga - de
    two_mu = 2.0**mu
    if branch is Branch.TAU_BELOW_ONE:
        return [
            ClosedFormTerm(
                -mu, two_mu / 2,
                numer=(1 - mu, (B + mu) / 2),
                denom=((d1 + 1) / 2, (-d1 + 1) / 2, (-d2 - mu + 2) / 2, (B - mu + 2) / 2, (d2 - mu + 2) / 2),
                upper=((A + 1) / 2, (1 - mu) / 2, (2 - mu) / 2, (d1 + 1) / 2, (1 - A) / 2, (1 - d1) / 2),
                lower=((-d2 - mu + 2) / 2, (B - mu + 2) / 2, (d2 - mu + 2) / 2, 0.5, (2 - B - mu) / 2),
                z_power=2,
            ),
            ClosedFormTerm(
                1 - mu, -two_mu / 2,
                numer=(2 - mu, (A + 2) / 2, (B + mu - 1) / 2),
                denom=(-d1 / 2, A / 2, d1 / 2, (-d2 - mu + 3) / 2, (B - mu + 3) / 2, (d2 - mu + 3) / 2),
                upper=((A + 2) / 2, (2 - mu) / 2, (3 - mu) / 2, (d1 + 2) / 2, (2 - A) / 2, (2 - d1) / 2),
                lower=((-d2 - mu + 3) / 2, (B - mu + 3) / 2, (d2 - mu + 3) / 2, 1.5, (3 - B - mu) / 2),
                z_power=2,
            ),
            ClosedFormTerm(
                B, two_mu,
                numer=(-B - mu, (A + B + mu + 1) / 2),
                denom=(de + 1, ga + 1, (-d1 - mu - B + 1) / 2, (A - mu - B + 1) / 2, (d1 - mu - B + 1) / 2),
                upper=((A + B + mu + 1) / 2, (B + 2) / 2, (B + 1) / 2,
                       (d1 + mu + B + 1) / 2, (-A + mu + B + 1) / 2, (-d1 + mu + B + 1) / 2),
                lower=(de + 1, B + 1, ga + 1, (B + mu + 2) / 2, (B + mu + 1) / 2),
                z_power=2,
            ),
        ]
    return [
        ClosedFormTerm(
            -(A + mu + 1), two_mu,
            numer=(-A - mu, (A + B + mu + 1) / 2),
            denom=(al + 1, be + 1, (-d2 - A - mu + 1) / 2, (B - A - mu + 1) / 2, (d2 - A - mu + 1) / 2),
            upper=((A + 1) / 2, (A + 2) / 2, (A + B + mu + 1) / 2,
                   (d2 + A + mu + 1) / 2, (A - B + mu + 1) / 2, (-d2 + A + mu + 1) / 2),
            lower=(be + 1, A + 1, al + 1, (A + mu + 1) / 2, (A + mu + 2) / 2),
            z_power=-2,
        ),
        ClosedFormTerm(
            -1.0, two_mu / 2,
            numer=(1 - mu, (A + mu) / 2),
            denom=((-d1 - mu + 2) / 2, (A - mu + 2) / 2, (d1 - mu + 2) / 2, (-d2 + 1) / 2, (d2 + 1) / 2),
            upper=((1 - mu) / 2, (2 - mu) / 2, (B + 1) / 2, (d2 + 1) / 2, (1 - B) / 2, (1 - d2) / 2),
            lower=((-d1 - mu + 2) / 2, (A - mu + 2) / 2, (d1 - mu + 2) / 2, (2 - A - mu) / 2, 0.5),
            z_power=-2,
        ),
        ClosedFormTerm(
            -2.0, -two_mu / 2,
            numer=(2 - mu, (B + 2) / 2, (A + mu - 1) / 2),
            denom=((-d1 - mu + 3) / 2, (A - mu + 3) / 2, (d1 - mu + 3) / 2, -d2 / 2, B / 2, d2 / 2),
            upper=((2 - mu) / 2, (3 - mu) / 2, (B + 2) / 2, (d2 + 2) / 2, (2 - B) / 2, (2 - d2) / 2),
            lower=((-d1 - mu + 3) / 2, (A - mu + 3) / 2, (d1 - mu + 3) / 2, (3 - A - mu) / 2, 1.5),
            z_power=-2,
        ),
    ]


@dataclass
class _Prepared:
    log_mag: float
    sign: float
    spec: PFQSpec | None
    n_gammas: int


def _prepare(term: ClosedFormTerm, z: float) -> _Prepared:
    """Resolve poles of one term.

    A lower parameter at a nonpositive integer b is absorbed into the
    denominator factor Gamma(b) of the prefactor, i.e. the series is taken
    in its regularized form sum (a)_k / Gamma(b + k) z^k / k!. After that,
    more denominator poles than numerator poles means the term vanishes;
    any remaining numerator pole is a genuine degeneracy.
    """
    denom = list(term.denom)
    regularized = []
    stop = PFQSpec(term.upper, (), 0.0).termination_index()
    for j, b in enumerate(term.lower):
        if not is_pole(b):
            continue
        if stop is not None and stop <= -round(b):
            continue
        match = next((i for i, d in enumerate(denom) if abs(d - b) <= POLE_TOL), None)
        if match is not None:
            denom.pop(match)
            regularized.append(j)
    n_num = sum(is_pole(v) for v in term.numer)
    n_den = sum(is_pole(v) for v in denom)
    if n_den > n_num:
        return _Prepared(-math.inf, 0.0, None, 0)
    if n_num:
        raise DegenerateParameters(
            f"prefactor Gamma at a pole ({n_num} numerator against {n_den} denominator)"
        )
    for j, b in enumerate(term.lower):
        if is_pole(b) and j not in regularized and (stop is None or stop > -round(b)):
            raise DegenerateParameters(f"6F5 lower parameter {b:g} is a nonpositive integer")
    log_mag, sign = math.log(abs(term.scale)), math.copysign(1.0, term.scale)
    for v in term.numer:
        lg, s = log_abs_gamma_real(v)
        log_mag += lg
        sign *= s
    for v in denom:
        lg, s = log_abs_gamma_real(v)
        log_mag -= lg
        sign *= s
    spec = PFQSpec(term.upper, term.lower, z, tuple(regularized))
    return _Prepared(log_mag, sign, spec, len(term.numer) + len(denom))


def eval_scaled(params: Parameters, tau: float, rel_tol: float = DEFAULT_REL_TOL) -> EvalResult:
    """I(mu, tau) = int_0^inf x^mu J_alpha(x) J_beta(x) J_gamma(tau x) J_delta(tau x) dx."""
    branch = Branch.of(tau)
    terms = build_terms(params, branch)
    z = tau**terms[0].z_power
    log_tau = math.log(tau)
    values, errors, terms_used, converged = [], [], [], []
    vanished = 0
    for term in terms:
        prep = _prepare(term, z)
        if prep.spec is None:
            vanished += 1
            terms_used.append(0)
            converged.append(True)
            continue
        res = sum_pfq(prep.spec, rel_tol=rel_tol)
        weight = prep.sign * math.exp(prep.log_mag + term.power_of_tau * log_tau)
        v = weight * res.value
        values.append(v)
        errors.append(abs(weight) * res.abs_err_est + abs(v) * prep.n_gammas * GAMMA_REL_ERR)
        terms_used.append(res.terms_used)
        converged.append(res.converged)
    value = math.fsum(values)
    cancellation = EPS * sum(abs(v) for v in values)
    err = sum(errors) + cancellation
    slow = z > SLOW_ARGUMENT or not all(converged)
    diag = {
        "terms_used": terms_used,
        "slow_convergence": slow,
        "vanished_terms": vanished,
        "series_converged": converged,
    }
    return EvalResult(value, err, Method.CLOSED_FORM, branch, diag)


def _raise_if_invalid(req: EvalRequest) -> None:
    v = validate(req)
    if v:
        raise ValidationError(v)


def eval_integral(req: EvalRequest, rel_tol: float = DEFAULT_REL_TOL) -> EvalResult:
    """int_0^inf x^mu J_alpha(ax) J_beta(ax) J_gamma(bx) J_delta(bx) dx = a^(-mu-1) I(mu, b/a)."""
    _raise_if_invalid(req)
    res = eval_scaled(req.params, req.tau, rel_tol)
    return res.scaled(req.a ** (-req.params.mu - 1.0))


def suggest_perturbation(params: Parameters, shift: float = PERTURBATION) -> dict:
    """A nearby parameter set for exploring a degenerate point.

    The returned value is an approximation of a neighbouring integral, not
    of the degenerate one; callers must label it as such.
    """
    for sgn in (1.0, -1.0):
        cand = replace(params, mu=params.mu + sgn * shift)
        if not any(not c.removable for c in detect_degeneracy(cand)):
            return {"params": cand, "approximate": True, "mu_shift": sgn * shift}
    raise FourBesselError("no non-degenerate neighbour found by shifting mu")
