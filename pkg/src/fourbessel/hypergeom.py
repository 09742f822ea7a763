"""Generalized hypergeometric series and gamma-product series.

A *gamma-product series* is

    sum_k  z^k / k!  *  prod Gamma(k + g_i) prod Gamma(m_i - k)
                        / (prod Gamma(k + q_i) prod Gamma(p_i - k))

and is turned into ``prefactor * pFq`` by :func:`pattern_to_pfq`.  The two
routes (ratio recurrence through :func:`sum_pfq`, raw log-gammas through
:func:`direct_pattern_sum`) are kept deliberately independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator

from .errors import InvalidPattern, InvalidSpec, NumeratorPole
from .specfun import POLE_TOL, is_pole, log_abs_gamma_real, pochhammer, recip_gamma_real

DEFAULT_REL_TOL = 1e-12
DEFAULT_K_MAX = 20000
EPS = 2.220446049250313e-16


def _nonpos_int(x: float) -> int | None:
    """-n when x is within POLE_TOL of the nonpositive integer -n, else None."""
    return int(round(x)) if is_pole(x) else None


@dataclass(frozen=True)
class PFQSpec:
    """pFq(upper; lower; argument).

    ``regularized`` lists lower indices j whose Pochhammer symbol is replaced
    by 1/Gamma(b_j + k), i.e. the series carries the factor 1/Gamma(b_j)
    itself. Those entries may sit at nonpositive integers.
    """

    upper: tuple[float, ...]
    lower: tuple[float, ...]
    argument: float
    regularized: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(float(a) for a in self.upper))
        object.__setattr__(self, "lower", tuple(float(b) for b in self.lower))
        object.__setattr__(self, "argument", float(self.argument))
        if not all(math.isfinite(v) for v in self.upper + self.lower + (self.argument,)):
            raise InvalidSpec("non-finite hypergeometric parameter")
        stop = self.termination_index()
        for j, b in enumerate(self.lower):
            n = _nonpos_int(b)
            if n is None or j in self.regularized:
                continue
            # (b)_k first vanishes at k = -n + 1; fine if the series has ended by then
            if stop is None or stop > -n:
                raise InvalidSpec(f"lower parameter {b!r} is a nonpositive integer")
        if abs(self.argument) > 1.0 and stop is None:
            raise InvalidSpec(f"|argument| = {abs(self.argument)} > 1 and the series does not terminate")

    def termination_index(self) -> int | None:
        """Smallest k with t_k == 0 because of a nonpositive integer upper parameter."""
        ks = [-n + 1 for a in self.upper if (n := _nonpos_int(a)) is not None]
        return min(ks) if ks else None


@dataclass(frozen=True)
class GammaSeriesPattern:
    ascending_num: tuple[float, ...] = ()
    descending_num: tuple[float, ...] = ()
    ascending_den: tuple[float, ...] = ()
    descending_den: tuple[float, ...] = ()
    argument: float = 0.0

    def __post_init__(self):
        for name in ("ascending_num", "descending_num", "ascending_den", "descending_den"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not all(math.isfinite(v) for v in vals):
                raise InvalidPattern(f"non-finite entry in {name}")
            object.__setattr__(self, name, vals)
        object.__setattr__(self, "argument", float(self.argument))
        if not math.isfinite(self.argument):
            raise InvalidPattern("non-finite argument")


@dataclass
class SeriesResult:
    value: float
    abs_err_est: float
    terms_used: int
    converged: bool
    details: dict = field(default_factory=dict)


def _first_term(spec: PFQSpec, k0: int) -> float:
    t = spec.argument**k0 / math.factorial(k0) if k0 else 1.0
    for a in spec.upper:
        t *= pochhammer(a, k0)
    for j, b in enumerate(spec.lower):
        t *= recip_gamma_real(b + k0) if j in spec.regularized else 1.0 / pochhammer(b, k0)
    return t


def sum_pfq(spec: PFQSpec, rel_tol: float = DEFAULT_REL_TOL, k_max: int = DEFAULT_K_MAX) -> SeriesResult:
    """Sum pFq by the term-ratio recurrence.

    Stops once three consecutive terms are below ``rel_tol * |sum|`` and the
    geometric tail bound (ratio ``max(last ratio, |z|)``) is below
    ``rel_tol * max(1, |sum|)``. A terminating series is summed exactly.
    ``abs_err_est`` = tail bound + rounding estimate ``2 eps sum|t_k|``.
    """
    if rel_tol < 1e-14:
        raise ValueError("rel_tol must be >= 1e-14")
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    z = spec.argument
    stop = spec.termination_index()
    k0 = 0
    for j in spec.regularized:
        n = _nonpos_int(spec.lower[j])
        if n is not None:
            k0 = max(k0, -n + 1)
    if stop is not None and stop <= k0:
        return SeriesResult(0.0, 0.0, 0, True, {"terminated": True})
    if z == 0.0 and k0 > 0:
        return SeriesResult(0.0, 0.0, 0, True)

    t = _first_term(spec, k0)
    total = t
    abs_sum = abs(t)
    small_run = 0
    ratio = 0.0
    k = k0
    tail = math.inf
    while True:
        if stop is not None and k + 1 >= stop:
            return SeriesResult(total, 2 * EPS * abs_sum, k + 1, True, {"terminated": True})
        if k + 1 > k_max:
            break
        num = 1.0
        for a in spec.upper:
            num *= a + k
        den = float(k + 1)
        for b in spec.lower:
            den *= b + k
        r = num / den * z
        t_next = t * r
        ratio = abs(r)
        k += 1
        t = t_next
        total += t
        abs_sum += abs(t)
        if t == 0.0 and z == 0.0:
            return SeriesResult(total, 0.0, k, True)
        if abs(t) <= rel_tol * abs(total):
            small_run += 1
        else:
            small_run = 0
        if small_run >= 3:
            rb = max(ratio, abs(z))
            tail = abs(t) * rb / (1.0 - rb) if rb < 1.0 else math.inf
            if tail <= rel_tol * max(1.0, abs(total)):
                return SeriesResult(total, tail + 2 * EPS * abs_sum, k + 1, True)
    rb = max(ratio, abs(z))
    tail = abs(t) * rb / (1.0 - rb) if rb < 1.0 else abs(t) * k
    return SeriesResult(total, tail + 2 * EPS * abs_sum, k, False)


def pattern_to_pfq(p: GammaSeriesPattern) -> tuple[float, PFQSpec]:
    """Rewrite a gamma-product series as ``prefactor * pFq``.

    prefactor = prod Gamma(g) prod Gamma(m) / (prod Gamma(q) prod Gamma(p)),
    upper = g + (1 - p), lower = q + (1 - m), argument = (-1)^(N_m - N_p) z.
    Denominator gammas go through the reciprocal gamma, so a pole there
    gives prefactor 0.
    """
    for v in p.ascending_num + p.descending_num:
        if is_pole(v):
            raise InvalidPattern(f"numerator Gamma({v!r}) is at a pole")
    for m in p.descending_num:
        if abs(m - round(m)) <= POLE_TOL and m > 0:
            raise InvalidPattern(f"Gamma({m!r} - k) reaches a pole inside the series")
    for q in p.ascending_den:
        if is_pole(q):
            raise InvalidPattern(f"ascending denominator Gamma({q!r} + k) starts at a pole")
    log_mag = 0.0
    sign = 1.0
    for v in p.ascending_num + p.descending_num:
        lg, s = log_abs_gamma_real(v)
        log_mag += lg
        sign *= s
    zero = False
    for v in p.ascending_den + p.descending_den:
        if is_pole(v):
            zero = True
            continue
        lg, s = log_abs_gamma_real(v)
        log_mag -= lg
        sign *= s
    prefactor = 0.0 if zero else sign * math.exp(log_mag)
    upper = p.ascending_num + tuple(1.0 - v for v in p.descending_den)
    lower = p.ascending_den + tuple(1.0 - v for v in p.descending_num)
    sgn = -1.0 if (len(p.descending_num) - len(p.descending_den)) % 2 else 1.0
    return prefactor, PFQSpec(upper, lower, sgn * p.argument)


def pattern_term(p: GammaSeriesPattern, k: int) -> float:
    """The k-th term of a gamma-product series from raw log-gammas.

    Poles are counted: more denominator poles than numerator poles gives an
    exact zero; otherwise any numerator pole raises :class:`NumeratorPole`.
    """
    num_args = [k + g for g in p.ascending_num] + [m - k for m in p.descending_num]
    den_args = [k + q for q in p.ascending_den] + [v - k for v in p.descending_den]
    n_num = sum(is_pole(v) for v in num_args)
    n_den = sum(is_pole(v) for v in den_args)
    if n_den > n_num:
        return 0.0
    if n_num:
        raise NumeratorPole(f"term k={k}: {n_num} numerator pole(s) against {n_den} denominator pole(s)")
    z = p.argument
    if z == 0.0:
        if k:
            return 0.0
        log_mag, sign = 0.0, 1.0
    else:
        log_mag = k * math.log(abs(z)) - math.lgamma(k + 1)
        sign = -1.0 if (z < 0 and k % 2) else 1.0
    for v in num_args:
        lg, s = log_abs_gamma_real(v)
        log_mag += lg
        sign *= s
    for v in den_args:
        lg, s = log_abs_gamma_real(v)
        log_mag -= lg
        sign *= s
    return sign * math.exp(log_mag)


def iter_pattern_terms(p: GammaSeriesPattern) -> Iterator[float]:
    k = 0
    while True:
        yield pattern_term(p, k)
        k += 1


def direct_pattern_sum(p: GammaSeriesPattern, K: int) -> float:
    """Sum terms k = 0..K of the gamma-product series with per-term gammas."""
    if K < 0:
        raise ValueError("K must be nonnegative")
    return math.fsum(pattern_term(p, k) for k in range(K + 1))

