"""Direct real-axis quadrature of products of Bessel functions.

    int_0^inf x^power prod_i J_{nu_i}(k_i x) dx

Three pieces:

* [0, h]: Gauss-Jacobi with the weight x^p0 that carries the small-x power
  law, so the rule sees only a smooth remainder.
* [h, x0]: composite Gauss-Legendre on panels shorter than the fastest
  half-oscillation, bisected where two rules disagree.
* [x0, inf): every factor is written as J = M cos(theta) with M, theta from
  Hankel's expansion. The product of cosines splits into 2^(n-1) components
  cos(sum_i s_i theta_i), each with a single frequency Omega = sum_i s_i k_i.
  Oscillating components are summed panel by panel (half a period each) and
  the partial sums are extrapolated with Wynn's epsilon algorithm; a
  component with Omega = 0 is integrated in log x, with its x^-r tail added
  analytically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_jacobi

from .errors import DomainError, NoConvergence, UnsupportedMu
from .hypergeom import EPS
from .params import Branch, EvalRequest, EvalResult, Method
from .specfun import asymptotic_threshold, bessel_j, hankel_pq

MU_LIMIT = 0.9
_GL16 = np.polynomial.legendre.leggauss(16)
_GL24 = np.polynomial.legendre.leggauss(24)


@dataclass(frozen=True)
class QuadConfig:
    rel_tol: float = 1e-10
    head_cutoff: float | None = None
    max_panels: int = 20_000
    accel_depth: int = 8

    def __post_init__(self):
        if self.rel_tol < 1e-10:
            raise ValueError("rel_tol must be >= 1e-10")
        if self.head_cutoff is not None and not self.head_cutoff > 0:
            raise ValueError("head_cutoff must be positive")
        if self.max_panels < 16:
            raise ValueError("max_panels must be >= 16")
        if self.accel_depth < 4:
            raise ValueError("accel_depth must be >= 4")


@dataclass
class TailState:
    partial_sums: list[float]
    accel_table: list[list[float]] = field(default_factory=list)
    err_est: float = math.inf


@dataclass
class QuadResult:
    value: float
    abs_err_est: float
    diagnostics: dict


def _effective_order(nu: float) -> float:
    # J_{-n} = (-1)^n J_n behaves like x^n at the origin
    return abs(nu) if nu == round(nu) else nu


def integrand(x, req: EvalRequest):
    """x^mu J_alpha(ax) J_beta(ax) J_gamma(bx) J_delta(bx) for x > 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("integrand requires x > 0")
    p = req.params
    out = x**p.mu * bessel_j(p.alpha, req.a * x) * bessel_j(p.beta, req.a * x)
    out = out * bessel_j(p.gamma_, req.b * x) * bessel_j(p.delta, req.b * x)
    return float(out) if out.ndim == 0 else out


def _product(power, orders, scales, x):
    out = x**power
    for nu, k in zip(orders, scales):
        out = out * bessel_j(nu, k * x)
    return out


def wynn_epsilon(seq, depth: int) -> tuple[float, float, list[list[float]]]:
    """Wynn's epsilon table over the last ``2 depth + 2`` entries of ``seq``.

    Returns (estimate, error estimate, table); row 0 of the table is the
    input window. The error is the larger of the change along the highest
    even column and the gap to the even column below it. Entries that
    would divide by an exact zero difference are left as inf and the
    highest fully finite even column is used instead.
    """
    n = min(len(seq), 2 * depth + 2)
    window = [float(v) for v in seq[-n:]]
    table = [window]
    prev = [0.0] * (n + 1)
    cur = window
    with np.errstate(all="ignore"):
        for _ in range(n - 1):
            nxt = []
            for i in range(len(cur) - 1):
                diff = cur[i + 1] - cur[i]
                nxt.append(prev[i + 1] + (1.0 / diff if diff != 0.0 else math.inf))
            prev, cur = cur, nxt
            table.append(cur)
    evens = [row for j, row in enumerate(table) if j % 2 == 0 and len(row) >= 2 and all(map(math.isfinite, row))]
    if not evens:
        return window[-1], abs(window[-1] - window[-2]) if n >= 2 else math.inf, table
    top = evens[-1]
    est, err = top[-1], abs(top[-1] - top[-2])
    if len(evens) >= 2:
        err = max(err, abs(est - evens[-2][-1]))
    return est, err, table


def _head_jacobi(power, orders, scales, h, n):
    p0 = power + sum(_effective_order(nu) for nu in orders)
    t, w = roots_jacobi(n, 0.0, p0)
    x = 0.5 * h * (1.0 + t)
    g = np.ones_like(x)
    for nu, k in zip(orders, scales):
        # J_nu(kx) / x^nu_eff is smooth and bounded near the origin
        g = g * bessel_j(nu, k * x) / x ** _effective_order(nu)
    return (0.5 * h) ** (p0 + 1.0) * np.sum(w * g)


def _gl_pairs(f, pieces, rule):
    """Gauss-Legendre on each row [a, b] of ``pieces``; returns (integrals, integrals of |f|)."""
    nodes, weights = rule
    a, b = pieces[:, :1], pieces[:, 1:]
    half = 0.5 * (b - a)
    x = 0.5 * (a + b) + half * nodes[None, :]
    vals = f(x.ravel()).reshape(x.shape)
    wts = half * weights[None, :]
    return np.sum(wts * vals, axis=1), np.sum(wts * np.abs(vals), axis=1)


def _gl_panels(f, edges, rule):
    return _gl_pairs(f, np.column_stack([edges[:-1], edges[1:]]), rule)


def _middle(f, lo, hi, width, tol_abs, max_depth=10):
    """Composite 24-point rule; panels whose 16-point estimate differs are bisected."""
    n = max(1, int(math.ceil((hi - lo) / width)))
    e = np.linspace(lo, hi, n + 1)
    pieces = np.column_stack([e[:-1], e[1:]])
    total, err, abs_total = 0.0, 0.0, 0.0
    for depth in range(max_depth):
        fine, fine_abs = _gl_pairs(f, pieces, _GL24)
        coarse, _ = _gl_pairs(f, pieces, _GL16)
        diff = np.abs(fine - coarse)
        ok = diff <= tol_abs * (pieces[:, 1] - pieces[:, 0]) / (hi - lo)
        if depth == max_depth - 1:
            ok[:] = True
        total += float(np.sum(fine[ok]))
        abs_total += float(np.sum(fine_abs[ok]))
        err += float(np.sum(diff[ok]))
        if ok.all():
            break
        bad = pieces[~ok]
        mid = 0.5 * (bad[:, 0] + bad[:, 1])
        pieces = np.concatenate([np.column_stack([bad[:, 0], mid]), np.column_stack([mid, bad[:, 1]])])
    return total, err, abs_total


class _Tail:
    """Amplitude/phase form of the product for x >= x0."""

    def __init__(self, power, orders, scales):
        self.power = power
        self.orders = orders
        self.scales = scales

    def factors(self, x):
        """Amplitudes and phase offsets; the linear phase k x is kept apart to avoid cancellation."""
        mags, offsets = [], []
        for nu, k in zip(self.orders, self.scales):
            y = k * x
            p, q = hankel_pq(nu, y)
            mags.append(np.sqrt(2.0 / (math.pi * y)) * np.hypot(p, q))
            offsets.append(np.arctan2(q, p) - (0.5 * nu + 0.25) * math.pi)
        return mags, offsets

    def frequency(self, signs) -> float:
        omega = self.scales[0] + sum(s * k for s, k in zip(signs, self.scales[1:]))
        # exact cancellation matters: omega * x is evaluated out to x ~ 1e14
        return 0.0 if abs(omega) <= 1e-12 * sum(self.scales) else omega

    def component(self, signs, x):
        mags, offsets = self.factors(x)
        amp = x**self.power / 2.0 ** (len(self.orders) - 1)
        for m in mags:
            amp = amp * m
        omega = self.frequency(signs)
        theta = omega * x + offsets[0]
        for s, off in zip(signs, offsets[1:]):
            theta = theta + s * off
        return amp * np.cos(theta)


def _split_panels(edges):
    """Sub-panels no wider than a quarter of their distance from the origin.

    The amplitude behaves like a power of x, so a panel much wider than x
    itself would need far more nodes. Returns (pieces, index of parent panel).
    """
    lo, hi = edges[:-1], edges[1:]
    m = np.maximum(1, np.ceil((hi - lo) / (0.25 * lo))).astype(int)
    parent = np.repeat(np.arange(len(lo)), m)
    first = np.concatenate([[0], np.cumsum(m)[:-1]])
    j = np.arange(parent.size) - np.repeat(first, m)
    step = (hi - lo) / m
    a = lo[parent] + j * step[parent]
    return np.column_stack([a, a + step[parent]]), parent, first


def _oscillatory_tail(tail, signs, omega, x0, cfg, tol_abs):
    period = math.pi / abs(omega)
    chunk = 4 * cfg.accel_depth + 8
    sums = []
    running = 0.0
    abs_total = 0.0
    rule_err = 0.0
    start = x0
    def f(x):
        return tail.component(signs, x)
    while True:
        edges = start + period * np.arange(chunk + 1)
        pieces, _, first = _split_panels(edges)
        fine, fine_abs = _gl_pairs(f, pieces, _GL24)
        coarse, _ = _gl_pairs(f, pieces, _GL16)
        vals = np.add.reduceat(fine, first)
        for v in vals:
            running += float(v)
            sums.append(running)
        abs_total += float(np.sum(fine_abs))
        rule_err += float(np.sum(np.abs(fine - coarse)))
        start = float(edges[-1])
        est, err, table = wynn_epsilon(sums, cfg.accel_depth)
        state = TailState(sums, table, err + rule_err)
        if state.err_est <= tol_abs or len(sums) >= cfg.max_panels:
            break
        chunk = len(sums)
    return est, state.err_est, abs_total, len(sums)


def _flat_tail(tail, signs, x0, power, n):
    """Omega = 0 component: x = x0 e^t on [0, T], then the C x^-r remainder."""
    r = n / 2.0 - 1.0 - power
    if not r > 0:
        raise DomainError("non-oscillating tail component does not decay fast enough to converge")
    t_end = 30.0
    edges = np.concatenate([np.arange(0.0, 4.0, 0.5), np.arange(4.0, t_end + 1e-9, 1.0)])

    def g(t):
        x = x0 * np.exp(t)
        return tail.component(signs, x) * x

    fine, fine_abs = _gl_panels(g, edges, _GL24)
    coarse, _ = _gl_panels(g, edges, _GL16)
    x1 = x0 * math.exp(t_end)
    # limit form of the component: amplitude with P = 1, Q = 0
    const = math.cos(-(0.5 * tail.orders[0] + 0.25) * math.pi
                     - sum(s * (0.5 * nu + 0.25) * math.pi for s, nu in zip(signs, tail.orders[1:])))
    const *= math.prod(math.sqrt(2.0 / (math.pi * k)) for k in tail.scales) / 2.0 ** (n - 1)
    remainder = const * x1 ** (-r) / r
    # next order of the expansion is smaller by about 1/x1
    err = float(np.sum(np.abs(fine - coarse))) + abs(remainder) * 10.0 / x1
    return float(np.sum(fine)) + remainder, err, float(np.sum(fine_abs)) + abs(remainder)


def bessel_product_integral(power: float, orders, scales, cfg: QuadConfig | None = None) -> QuadResult:
    """int_0^inf x^power prod J_{orders[i]}(scales[i] x) dx by direct quadrature."""
    cfg = cfg or QuadConfig()
    orders = tuple(float(v) for v in orders)
    scales = tuple(float(v) for v in scales)
    n = len(orders)
    if n != len(scales) or n == 0:
        raise ValueError("orders and scales must be nonempty and of equal length")
    if any(not k > 0 for k in scales):
        raise DomainError("scales must be positive")
    p0 = power + sum(_effective_order(nu) for nu in orders)
    if not p0 > -1:
        raise DomainError(f"integrand behaves like x^{p0:g} at the origin and is not integrable")
    if not power < n / 2.0 - 1.0:
        raise DomainError(f"x^{power:g} times {n} Bessel factors is not integrable at infinity")

    kmax, ksum = max(scales), sum(scales)
    x0 = cfg.head_cutoff or max(10.0, 10.0 / min(scales),
                                max(asymptotic_threshold(nu) / k for nu, k in zip(orders, scales)))
    h = min(2.0 / kmax, 0.5 * x0)

    head_a = _head_jacobi(power, orders, scales, h, 24)
    head_b = _head_jacobi(power, orders, scales, h, 32)
    head_err = abs(head_a - head_b)

    def f(x):
        return _product(power, orders, scales, x)

    # rough magnitude scale for the absolute tolerances below
    probe, probe_abs = _gl_panels(f, np.linspace(h, x0, 9), _GL24)
    scale = max(abs(head_b) + abs(float(np.sum(probe))), 1e-300)
    tol_abs = cfg.rel_tol * scale

    mid, mid_err, mid_abs = _middle(f, h, x0, math.pi / ksum, tol_abs)

    tail = _Tail(power, orders, scales)
    tail_total, tail_err, tail_abs = 0.0, 0.0, 0.0
    panels = 0
    components = []
    for signs in itertools.product((1, -1), repeat=n - 1):
        omega = tail.frequency(signs)
        if omega == 0.0:
            v, e, a = _flat_tail(tail, signs, x0, power, n)
            kind = "flat"
        else:
            v, e, a, used = _oscillatory_tail(tail, signs, omega, x0, cfg, tol_abs / 2 ** (n - 1))
            panels += used
            kind = "oscillating"
        components.append({"signs": signs, "omega": omega, "value": v, "err": e, "kind": kind})
        tail_total += v
        tail_err += e
        tail_abs += a

    value = head_b + mid + tail_total
    abs_int = abs(head_b) + mid_abs + tail_abs
    err = head_err + mid_err + tail_err + 16 * EPS * abs_int
    diag = {
        "head_cutoff": x0,
        "jacobi_cutoff": h,
        "head_value": head_b + mid,
        "tail_value": tail_total,
        "tail_panels": panels,
        "components": len(components),
        "abs_integral": abs_int,
    }
    if err > 1e3 * cfg.rel_tol * max(abs(value), scale):
        raise NoConvergence(f"oracle error estimate {err:.3g} did not reach the tolerance")
    return QuadResult(value, err, diag)


def oscillatory_integral(req: EvalRequest, cfg: QuadConfig | None = None) -> EvalResult:
    """Ground-truth value of the full integral (scales a and b included)."""
    p = req.params
    if p.mu > MU_LIMIT:
        raise UnsupportedMu(f"oracle is only certified for mu <= {MU_LIMIT}, got {p.mu:g}")
    if req.a == req.b:
        raise DomainError("a = b is excluded")
    res = bessel_product_integral(p.mu, (p.alpha, p.beta, p.gamma_, p.delta), (req.a, req.a, req.b, req.b), cfg)
    return EvalResult(res.value, res.abs_err_est, Method.ORACLE, Branch.of(req.tau), res.diagnostics)
