"""Mellin-Barnes representation of the four-Bessel integral.

With A = alpha+beta, B = gamma+delta, d1 = alpha-beta, d2 = gamma-delta,

    I(mu, tau) = 1/(2 pi) * 1/(2 pi i) * int_{c - i inf}^{c + i inf} G(u) tau^(-2u) du

where G is a ratio of six gammas over six gammas (see :func:`build_integrand`).
Closing the contour left (tau < 1) or right (tau > 1) picks up three pole
families each, which gives the residue series of :func:`residue_series`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContourInfeasible, DegenerateParameters, NearPole, NoConvergence, NumeratorPole, StripViolation
from .hypergeom import EPS, GammaSeriesPattern, pattern_term
from .params import Branch, Method, EvalResult, Parameters
from .specfun import is_pole, log_gamma_fast, recip_gamma_real, gamma_real

NEAR_POLE_TOL = 1e-9
COLLISION_TOL = 1e-9
COLLISION_SCAN = 64


@dataclass(frozen=True)
class GammaFactor:
    """Gamma(u_sign * u + offset) in the numerator or denominator."""

    u_sign: int
    offset: float
    side: str
    label: str
    # pole location at k = 0, written symbolically; numerator factors only
    pole_label: str = ""

    def __post_init__(self):
        if self.u_sign not in (1, -1):
            raise ValueError("u_sign must be +1 or -1")
        if self.side not in ("numerator", "denominator"):
            raise ValueError("side must be 'numerator' or 'denominator'")

    def argument(self, u):
        return self.u_sign * u + self.offset


@dataclass(frozen=True)
class MBIntegrand:
    factors: tuple[GammaFactor, ...]
    tau_exponent_scale: float = -2.0
    outer_constant: float = 1.0 / (2.0 * math.pi)

    @property
    def numerator(self) -> tuple[GammaFactor, ...]:
        return tuple(f for f in self.factors if f.side == "numerator")

    @property
    def denominator(self) -> tuple[GammaFactor, ...]:
        return tuple(f for f in self.factors if f.side == "denominator")


@dataclass(frozen=True)
class PoleFamily:
    base: float
    direction: str
    source: int
    base_label: str = ""

    def pole(self, k: int) -> float:
        return self.base - k if self.direction == "left" else self.base + k

    def describe(self) -> str:
        label = self.base_label or repr(self.base)
        return f"u = {label} - k" if self.direction == "left" else f"u = {label} + k"


@dataclass(frozen=True)
class ContourSpec:
    """Contour through ``c`` between the pole families.

    ``t_max`` is the initial truncation length along each half of the
    contour and ``n_points`` caps the number of nodes per half.
    """

    c: float
    t_max: float = 40.0
    n_points: int = 200_000
    half_gap: float = 0.25

    def __post_init__(self):
        if not self.t_max > 0:
            raise ValueError("t_max must be positive")
        if self.n_points < 64:
            raise ValueError("n_points must be >= 64")


@dataclass(frozen=True)
class PoleCollision:
    """Two pole families on the same side that share poles."""

    direction: str
    families: tuple[int, int]
    first_point: float
    max_order: int
    condition: str

    @property
    def removable(self) -> bool:
        # net order <= 0 everywhere: the shared points are not poles at all
        return self.max_order <= 0


def build_integrand(params: Parameters) -> MBIntegrand:
    mu = params.mu
    A = params.alpha + params.beta
    B = params.gamma_ + params.delta
    d1 = params.alpha - params.beta
    d2 = params.gamma_ - params.delta
    num = (
        GammaFactor(1, -mu / 2, "numerator", "u - mu/2", "mu/2"),
        GammaFactor(1, (1 - mu) / 2, "numerator", "u + (1-mu)/2", "(mu-1)/2"),
        GammaFactor(-1, (A + mu + 1) / 2, "numerator", "(alpha+beta+mu+1)/2 - u", "(mu+alpha+beta+1)/2"),
        GammaFactor(-1, 1.0, "numerator", "1 - u", "1"),
        GammaFactor(-1, 0.5, "numerator", "1/2 - u", "1/2"),
        GammaFactor(1, B / 2, "numerator", "(gamma+delta)/2 + u", "-(gamma+delta)/2"),
    )
    den = (
        GammaFactor(1, (-d1 - mu + 1) / 2, "denominator", "(-alpha+beta-mu+1)/2 + u"),
        GammaFactor(1, (A - mu + 1) / 2, "denominator", "(alpha+beta-mu+1)/2 + u"),
        GammaFactor(1, (d1 - mu + 1) / 2, "denominator", "(alpha-beta-mu+1)/2 + u"),
        GammaFactor(-1, (-d2 + 2) / 2, "denominator", "(-gamma+delta+2)/2 - u"),
        GammaFactor(-1, (B + 2) / 2, "denominator", "(gamma+delta+2)/2 - u"),
        GammaFactor(-1, (d2 + 2) / 2, "denominator", "(gamma-delta+2)/2 - u"),
    )
    return MBIntegrand(num + den)


def enumerate_pole_families(ig: MBIntegrand) -> list[PoleFamily]:
    """One family per numerator gamma: Gamma(u + o) gives u = -o - k, Gamma(o - u) gives u = o + k."""
    out = []
    for i, f in enumerate(ig.factors):
        if f.side != "numerator":
            continue
        if f.u_sign == 1:
            out.append(PoleFamily(-f.offset, "left", i, f.pole_label))
        else:
            out.append(PoleFamily(f.offset, "right", i, f.pole_label))
    return out


def pole_gap(families) -> tuple[float, float]:
    left = max(f.base for f in families if f.direction == "left")
    right = min(f.base for f in families if f.direction == "right")
    return left, right


def choose_contour(families, t_max_hint: float | None = None) -> ContourSpec:
    left, right = pole_gap(families)
    if not left < right:
        raise ContourInfeasible(
            f"left poles reach {left:.6g} but right poles start at {right:.6g}; no separating contour"
        )
    return ContourSpec(c=0.5 * (left + right), t_max=t_max_hint or 40.0, half_gap=0.5 * (right - left))


def pole_order(ig: MBIntegrand, u: float, tol: float = COLLISION_TOL) -> int:
    """Net pole order of G at real ``u`` (negative means a zero)."""
    order = 0
    for f in ig.factors:
        if is_pole(f.argument(u), tol):
            order += 1 if f.side == "numerator" else -1
    return order


def _is_integer(x: float, tol: float) -> bool:
    return abs(x - round(x)) <= tol


def family_collisions(ig: MBIntegrand, scan: int = COLLISION_SCAN) -> list[PoleCollision]:
    """Pairs of same-side families whose poles coincide, with the worst net order.

    Two families {b1 -/+ k} and {b2 -/+ k} share poles when b1 - b2 is an
    integer. The net order at each shared point counts every numerator and
    denominator gamma that is singular there.
    """
    fams = enumerate_pole_families(ig)
    out = []
    for i in range(len(fams)):
        for j in range(i + 1, len(fams)):
            fi, fj = fams[i], fams[j]
            if fi.direction != fj.direction:
                continue
            diff = fi.base - fj.base
            if not _is_integer(diff, COLLISION_TOL):
                continue
            if fi.direction == "left":
                start = min(fi.base, fj.base)
                points = [start - k for k in range(scan)]
            else:
                start = max(fi.base, fj.base)
                points = [start + k for k in range(scan)]
            worst = max(pole_order(ig, p) for p in points)
            cond = f"({fi.base_label}) - ({fj.base_label}) is an integer"
            out.append(PoleCollision(fi.direction, (fi.source, fj.source), start, worst, cond))
    return out


def _log_ratio(ig: MBIntegrand, u: np.ndarray):
    """log G(u) modulo 2 pi i plus a mask of points where a denominator gamma has a pole."""
    total = np.zeros(u.shape, dtype=complex)
    zero = np.zeros(u.shape, dtype=bool)
    for f in ig.factors:
        arg = f.argument(u)
        if f.side == "numerator":
            total += log_gamma_fast(arg)
        else:
            at_pole = (np.abs(arg.imag) <= 1e-12) & (arg.real <= 0.5) & (
                np.abs(arg.real - np.round(arg.real)) <= 1e-12
            )
            zero |= at_pole
            total -= log_gamma_fast(np.where(at_pole, 0.5, arg))
    return total, zero


def _check_near_pole(ig: MBIntegrand, u: np.ndarray) -> None:
    for f in ig.numerator:
        arg = f.argument(u)
        near = (np.abs(arg.imag) <= NEAR_POLE_TOL) & (arg.real <= 0.5) & (
            np.abs(arg.real - np.minimum(np.round(arg.real), 0.0)) <= NEAR_POLE_TOL
        )
        if np.any(near):
            raise NearPole(f"Gamma({f.label}) is within {NEAR_POLE_TOL} of a pole")


def integrand_eval(ig: MBIntegrand, u, tau: float):
    """G(u) tau^(-2u) for complex scalar or array ``u``."""
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=complex)
    _check_near_pole(ig, u)
    log_g, zero = _log_ratio(ig, u)
    val = np.exp(log_g + ig.tau_exponent_scale * u * math.log(tau))
    val = np.where(zero, 0.0, val)
    return complex(val) if scalar else val


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _panel_edges(s_max: float, first_width: float) -> np.ndarray:
    # widths grow geometrically from the pole-gap scale up to 1
    edges = [0.0]
    s = 0.0
    w = first_width
    while s < s_max:
        s = min(s + w, s_max)
        edges.append(s)
        w = min(1.0, max(first_width, s / 4.0))
    return np.asarray(edges)


def _bisect(edges: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        mid = 0.5 * (edges[:-1] + edges[1:])
        e = np.empty(2 * len(edges) - 1)
        e[0::2] = edges
        e[1::2] = mid
        edges = e
    return edges


def _ray_integral(ig, tau, c, angle, edges):
    """(int F ds over the upper ray, int F ds over the lower ray, int |F| ds, |F| at the far end)."""
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    s = (0.5 * (a + b) + half * _GL_NODES[None, :]).ravel()
    w = (half * _GL_WEIGHTS[None, :]).ravel()
    out = []
    for direction in (np.exp(1j * angle), np.exp(-1j * angle)):
        u = c + s * direction
        f = integrand_eval(ig, u, tau) * direction
        out.append(f)
    upper, lower = out
    return np.sum(w * upper), np.sum(w * lower), np.sum(w * np.abs(upper)), abs(upper[-1])


def contour_quadrature(params: Parameters, tau: float, spec: ContourSpec | None = None,
                       rel_tol: float = 1e-10) -> EvalResult:
    """Integrate the Mellin-Barnes representation numerically.

    The vertical line only decays algebraically, so each half of the
    contour is bent by 45 degrees toward the side whose poles are not
    enclosed by the residue sum (left for tau < 1, right for tau > 1).
    All poles are real, so the bend does not cross any, and tau^(-2u) then
    decays geometrically. Both halves are integrated separately; the
    imaginary part of the assembled result is reported as ``imag_residue``.
    """
    branch = Branch.of(tau)
    ig = build_integrand(params)
    if spec is None:
        spec = choose_contour(enumerate_pole_families(ig))
    angle = 0.75 * math.pi if branch is Branch.TAU_BELOW_ONE else 0.25 * math.pi
    decay = math.sqrt(2.0) * abs(math.log(tau))
    s_max = max(spec.t_max, 40.0 / decay + 10.0)
    first = min(0.5, spec.half_gap / 2.0)
    scale = 1.0 / (4.0 * math.pi**2)

    for _ in range(8):
        edges = _panel_edges(s_max, first)
        prev = None
        level = 0
        while True:
            e = _bisect(edges, level)
            if 16 * (len(e) - 1) > spec.n_points:
                raise NoConvergence(f"contour refinement exceeded {spec.n_points} nodes")
            up, low, absint, tail_mag = _ray_integral(ig, tau, spec.c, angle, e)
            raw = (up - low) * scale / 1j
            if prev is not None:
                change = abs(raw.real - prev.real)
                floor = max(abs(raw.real), 1e-6 * absint * scale)
                if change <= rel_tol * floor or change <= 32 * EPS * absint * scale:
                    break
            prev = raw
            level += 1
            if level > 5:
                raise NoConvergence("contour quadrature did not settle after 5 refinements")
        trunc = 2.0 * tail_mag * (1.0 / decay + 1.0) * scale
        if trunc <= 1e-16 * max(absint * scale, abs(raw.real)) or tail_mag == 0.0:
            break
        s_max *= 2.0
    else:
        raise NoConvergence("contour truncation did not reach negligible magnitude")

    err = change + trunc + 32 * EPS * absint * scale
    value = raw.real
    diag = {
        "c": spec.c,
        "angle": angle,
        "s_max": s_max,
        "nodes": 16 * (len(e) - 1),
        "imag_residue": abs(raw.imag),
        "abs_integral": absint * scale,
    }
    return EvalResult(value, err, Method.CONTOUR_QUAD, branch, diag)


# --------------------------------------------------------------------------
# residue series
# --------------------------------------------------------------------------

def residue_patterns(params: Parameters, branch: Branch) -> list[tuple[float, GammaSeriesPattern]]:
    """The three gamma-product series produced by closing the contour.

    Each entry is (power of tau, pattern) and contributes
    ``tau^power / (2 pi) * sum_k pattern_term(k)``; the pattern argument
    carries the alternating sign, z = -tau^2 or -tau^-2.
    """
    mu, al, be, ga, de = params.mu, params.alpha, params.beta, params.gamma_, params.delta
    A, B, d1, d2 = al + be, ga + de, al - be, ga - de
    if branch is Branch.TAU_BELOW_ONE:
        return [
            (-mu, dict(
                g=((A + 1) / 2, 1 - mu / 2, (1 - mu) / 2),
                m=(0.5, (B + mu) / 2),
                q=((-d2 - mu + 2) / 2, (B - mu + 2) / 2, (d2 - mu + 2) / 2),
                p=((-d1 + 1) / 2, (A + 1) / 2, (d1 + 1) / 2))),
            (1 - mu, dict(
                g=((A + 2) / 2, (3 - mu) / 2, (2 - mu) / 2),
                m=(-0.5, (B + mu - 1) / 2),
                q=((-d2 - mu + 3) / 2, (B - mu + 3) / 2, (d2 - mu + 3) / 2),
                p=(-d1 / 2, A / 2, d1 / 2))),
            (B, dict(
                g=((A + B + mu + 1) / 2, (B + 2) / 2, (B + 1) / 2),
                m=((-B - mu) / 2, (1 - B - mu) / 2),
                q=(de + 1, B + 1, ga + 1),
                p=((-d1 - mu - B + 1) / 2, (A - mu - B + 1) / 2, (d1 - mu - B + 1) / 2))),
        ]
    return [
        (-(A + mu + 1), dict(
            g=((A + 1) / 2, (A + 2) / 2, (A + B + mu + 1) / 2),
            m=((1 - A - mu) / 2, (-A - mu) / 2),
            q=(be + 1, A + 1, al + 1),
            p=((-d2 - A - mu + 1) / 2, (B - A - mu + 1) / 2, (d2 - A - mu + 1) / 2))),
        (-1.0, dict(
            g=((1 - mu) / 2, (2 - mu) / 2, (B + 1) / 2),
            m=((A + mu) / 2, 0.5),
            q=((-d1 - mu + 2) / 2, (A - mu + 2) / 2, (d1 - mu + 2) / 2),
            p=((-d2 + 1) / 2, (B + 1) / 2, (d2 + 1) / 2))),
        (-2.0, dict(
            g=((2 - mu) / 2, (3 - mu) / 2, (B + 2) / 2),
            m=((A + mu - 1) / 2, -0.5),
            q=((-d1 - mu + 3) / 2, (A - mu + 3) / 2, (d1 - mu + 3) / 2),
            p=(-d2 / 2, B / 2, d2 / 2))),
    ]


def residue_pattern_list(params: Parameters, tau: float) -> list[tuple[float, GammaSeriesPattern]]:
    branch = Branch.of(tau)
    z = -(tau**2) if branch is Branch.TAU_BELOW_ONE else -(tau**-2)
    return [
        (power, GammaSeriesPattern(d["g"], d["m"], d["q"], d["p"], z))
        for power, d in residue_patterns(params, branch)
    ]


def residue_series(params: Parameters, tau: float, branch: Branch | None = None,
                   k_max: int = 5000, rel_tol: float = 1e-13) -> EvalResult:
    """Sum the three residue series term by term with raw gammas.

    Stops once the combined k-th term is below ``rel_tol`` times the
    partial sum for three consecutive k.
    """
    actual = Branch.of(tau)
    if branch is not None and branch is not actual:
        raise ValueError(f"branch {branch.value} does not match tau = {tau}")
    pats = residue_pattern_list(params, tau)
    weights = [tau**power / (2.0 * math.pi) for power, _ in pats]
    z_abs = abs(pats[0][1].argument)
    total = 0.0
    abs_sum = 0.0
    small = 0
    prev_mag = None
    ratio = 0.0
    converged = False
    k = 0
    vanished = [True, True, True]
    try:
        while k <= k_max:
            terms = [w * pattern_term(p, k) for w, (_, p) in zip(weights, pats)]
            for i, t in enumerate(terms):
                if t != 0.0:
                    vanished[i] = False
            combined = math.fsum(terms)
            mag = sum(abs(t) for t in terms)
            total += combined
            abs_sum += mag
            if prev_mag:
                ratio = mag / prev_mag
            prev_mag = mag
            small = small + 1 if mag <= rel_tol * abs(total) or mag == 0.0 else 0
            k += 1
            if small >= 3:
                converged = True
                break
    except NumeratorPole as exc:
        raise DegenerateParameters(f"residue series hits a higher-order pole: {exc}") from exc
    rb = max(ratio, z_abs)
    tail = prev_mag * rb / (1.0 - rb) if rb < 1.0 else prev_mag * k
    err = tail + 4 * EPS * abs_sum
    diag = {"terms_used": k, "converged": converged, "vanished_series": sum(vanished)}
    return EvalResult(total, err, Method.RESIDUE_SERIES, actual, diag)


# --------------------------------------------------------------------------
# single-pair Mellin transform
# --------------------------------------------------------------------------

@dataclass
class TransformCheck:
    closed_form: float
    quadrature: float
    abs_diff: float
    quad_err_est: float = 0.0
    details: dict = field(default_factory=dict)


def bessel_pair_mellin(s: float, nu1: float, nu2: float) -> float:
    """int_0^inf x^(s-1) J_nu1(x) J_nu2(x) dx as a gamma ratio."""
    num = gamma_real(1 - s) * gamma_real((nu1 + nu2 + s) / 2)
    den = (
        recip_gamma_real((-nu1 + nu2 - s + 2) / 2)
        * recip_gamma_real((nu1 + nu2 - s + 2) / 2)
        * recip_gamma_real((nu1 - nu2 - s + 2) / 2)
    )
    return num * den / 2.0 ** (1 - s)


def mellin_transform_check(s: float, nu1: float, nu2: float, cfg=None) -> TransformCheck:
    lo = max(0.0, -(nu1 + nu2))
    if not lo < s < 1.0:
        raise StripViolation(f"s = {s} is outside the strip ({lo}, 1)")
    from .oracle import QuadConfig, bessel_product_integral

    closed = bessel_pair_mellin(s, nu1, nu2)
    res = bessel_product_integral(s - 1.0, (nu1, nu2), (1.0, 1.0), cfg or QuadConfig())
    return TransformCheck(closed, res.value, abs(closed - res.value), res.abs_err_est, res.diagnostics)
