"""Double precision special functions: gamma, log-gamma, Pochhammer, Bessel J.

Everything here is pure; nothing is cached at module level except the
constant coefficient tables below.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, PoleArgument, UnsupportedOrder

POLE_TOL = 1e-12
MAX_ORDER = 20.0

# Lanczos approximation, g = 7, n = 9 (Godfrey's coefficient set, as
# distributed with Numerical Recipes 3rd ed. and many open-source ports).
# Relative accuracy about 2e-15 for Re z >= 1/2.
LANCZOS_G = 7.0
LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_2PI = 0.91893853320467274178
_SQRT_2PI = 2.5066282746310005024
_LOG_PI = 1.1447298858494001741


def pole_distance(x: float) -> float:
    """Distance from ``x`` to the nearest nonpositive integer (inf when x > 0.5)."""
    if x > 0.5:
        return math.inf
    return abs(x - min(round(x), 0))


def is_pole(x: float, tol: float = POLE_TOL) -> bool:
    """True when ``x`` lies within ``tol`` of 0, -1, -2, ..."""
    return pole_distance(x) <= tol


def _sinpi(x: float) -> float:
    n = round(x)
    r = math.sin(math.pi * (x - n))
    return -r if n % 2 else r


def _lanczos_sum(z):
    # works on floats, complex numbers and numpy arrays alike
    s = LANCZOS_COEF[0]
    for i in range(1, len(LANCZOS_COEF)):
        s = s + LANCZOS_COEF[i] / (z + (i - 1))
    return s


def gamma_real(x: float) -> float:
    """Gamma function on the real line, reflection below 1/2.

    Raises :class:`PoleArgument` within 1e-12 of a nonpositive integer.
    Overflow returns ``inf`` (Gamma exceeds the double range past x ~ 171.6).
    """
    x = float(x)
    if is_pole(x):
        raise PoleArgument(f"Gamma({x!r}) is at a pole")
    if x < 0.5:
        return math.pi / (_sinpi(x) * gamma_real(1.0 - x))
    if x == round(x) and x <= 23:
        return float(math.factorial(int(x) - 1))
    z = x - 1.0
    t = z + LANCZOS_G + 0.5
    if x < 140:
        return _SQRT_2PI * t ** (z + 0.5) * math.exp(-t) * _lanczos_sum(z + 1.0)
    lg = _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z + 1.0))
    return math.exp(lg) if lg < 709.7 else math.inf


def log_abs_gamma_real(x: float) -> tuple[float, float]:
    """Return ``(log|Gamma(x)|, sign(Gamma(x)))`` for real ``x`` off the poles."""
    x = float(x)
    if is_pole(x):
        raise PoleArgument(f"Gamma({x!r}) is at a pole")
    if x < 0.5:
        s = _sinpi(x)
        lg, _ = log_abs_gamma_real(1.0 - x)
        return _LOG_PI - math.log(abs(s)) - lg, math.copysign(1.0, s)
    z = x - 1.0
    t = z + LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z + 1.0)), 1.0


def recip_gamma_real(x: float) -> float:
    """1/Gamma(x); exactly 0.0 within 1e-12 of a pole, total on finite reals."""
    x = float(x)
    if is_pole(x):
        return 0.0
    if -140 < x < 140:
        g = gamma_real(x)
        return 0.0 if math.isinf(g) else 1.0 / g
    lg, sign = log_abs_gamma_real(x)
    if -lg > 709.7:
        return sign * math.inf
    return sign * math.exp(-lg)


def log_gamma_complex(z):
    """Principal branch of log Gamma(z) for complex scalars or arrays.

    Arguments with Re z < 1/2 are shifted up by the recurrence
    log Gamma(z) = log Gamma(z + n) - sum log(z + j), which keeps the branch
    continuous off the negative real axis.
    """
    scalar = np.ndim(z) == 0
    z = np.asarray(z, dtype=complex)
    near = (z.real <= 0.5) & (np.abs(z.imag) <= POLE_TOL) & (
        np.abs(z.real - np.minimum(np.round(z.real), 0.0)) <= POLE_TOL
    )
    if np.any(near):
        raise PoleArgument("log Gamma evaluated at a nonpositive integer")
    shift = np.where(z.real < 0.5, np.ceil(0.5 - z.real), 0.0).astype(int)
    w = z + shift
    correction = np.zeros_like(z)
    for j in range(int(shift.max(initial=0))):
        m = shift > j
        correction[m] += np.log(z[m] + j)
    zm = w - 1.0
    t = zm + LANCZOS_G + 0.5
    res = _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(_lanczos_sum(w)) - correction
    # exact zeros of log Gamma at 1 and 2 are not reproduced bit-for-bit by the
    # Lanczos sum; snap them so that Gamma(1) = Gamma(2) = 1 round-trips
    res = np.where((z == 1.0) | (z == 2.0), 0.0, res)
    return complex(res) if scalar else res


def _log_sin_pi(z):
    # log sin(pi z) up to 2 pi i, stable for large |Im z|; written for Im z >= 0
    # and extended to the lower half-plane by conjugation
    lower = z.imag < 0
    w = np.where(lower, np.conj(z), z)
    e = np.exp(2j * np.pi * w)
    res = np.log(0.5j) - 1j * np.pi * w + np.log1p(-e)
    return np.where(lower, np.conj(res), res)


def log_gamma_fast(z):
    """A logarithm of Gamma(z), correct modulo 2 pi i.

    Uses reflection instead of the upward recurrence, so the cost does not
    grow with -Re z. Only ``exp`` of the result is meaningful; use
    :func:`log_gamma_complex` when the principal branch matters.
    """
    z = np.asarray(z, dtype=complex)
    near = (z.real <= 0.5) & (np.abs(z.imag) <= POLE_TOL) & (
        np.abs(z.real - np.minimum(np.round(z.real), 0.0)) <= POLE_TOL
    )
    if np.any(near):
        raise PoleArgument("log Gamma evaluated at a nonpositive integer")
    refl = z.real < 0.5
    w = np.where(refl, 1.0 - z, z)
    zm = w - 1.0
    t = zm + LANCZOS_G + 0.5
    direct = _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(_lanczos_sum(w))
    if not np.any(refl):
        return direct
    with np.errstate(divide="ignore", invalid="ignore"):
        reflected = _LOG_PI - _log_sin_pi(np.where(refl, z, 0.5)) - direct
    return np.where(refl, reflected, direct)


def pochhammer(a: float, k: int) -> float:
    """Rising factorial (a)_k = a (a+1) ... (a+k-1); (a)_0 = 1.

    Overflow is reported as a signed infinity; test with ``math.isinf``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    p = 1.0
    for j in range(k):
        p *= a + j
        if p == 0.0 or math.isinf(p):
            break
    return p


# --------------------------------------------------------------------------
# Bessel J of real order
# --------------------------------------------------------------------------

def series_limit(nu: float) -> float:
    """Upper end of the ascending-series regime.

    Below ``2*sqrt(|nu|+1)`` the terms decrease from the first one, so
    alternating cancellation costs at most one digit.
    """
    return max(2.0, 2.0 * math.sqrt(abs(nu) + 1.0))


def asymptotic_threshold(nu: float) -> float:
    """Lower end of the Hankel-expansion regime.

    Chosen so that the smallest expansion term is below 1e-17 and no term
    exceeds 4, which holds for x >= max(20, 0.18 nu^2); a margin is added.
    """
    return max(22.0, 0.2 * nu * nu)


def hankel_pq(nu: float, x, max_terms: int = 120):
    """Hankel's P and Q asymptotic series for J/Y of order ``nu``.

    Terms are added until they drop below 1e-17 or start to grow (optimal
    truncation). Vectorised over ``x``.
    """
    x = np.asarray(x, dtype=float)
    mu4 = 4.0 * nu * nu
    p = np.ones_like(x)
    q = np.zeros_like(x)
    a = np.ones_like(x)
    last = np.ones_like(x)
    live = np.ones(x.shape, dtype=bool)
    for k in range(1, max_terms):
        a = a * (mu4 - (2 * k - 1) ** 2) / (8.0 * k * x)
        mag = np.abs(a)
        live &= ~((mag > last) & (k > abs(nu) + 1))
        if not live.any():
            break
        sign = -1.0 if (k // 2) % 2 else 1.0
        if k % 2 == 0:
            p = np.where(live, p + sign * a, p)
        else:
            q = np.where(live, q + sign * a, q)
        live &= mag > 1e-17 * (np.abs(p) + np.abs(q))
        last = np.where(live, mag, last)
    return p, q


def _bessel_asymptotic(nu: float, x):
    p, q = hankel_pq(nu, x)
    chi = x - (0.5 * nu + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _bessel_series(nu: float, x):
    half = 0.5 * x
    h2 = half * half
    # anchor at the first m with nu + m + 1 >= 1/2: starting from m = 0 would
    # zero every term when nu sits within POLE_TOL of a negative integer
    m0 = max(0, math.ceil(-nu - 0.5))
    if nu == 0.0:
        term = np.ones_like(x)
    else:
        term = (-1.0) ** m0 * half ** (nu + 2 * m0) * (recip_gamma_real(nu + m0 + 1.0) / math.factorial(m0))
    total = term.copy()
    back = term
    for k in range(m0, 0, -1):
        back = -back * k * (k + nu) / h2
        total = total + back
    for k in range(m0 + 1, 200):
        term = -term * h2 / (k * (k + nu))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.abs(total)):
            break
    return total


def _miller_pair(f: float, x, top: int):
    """J_{f+top} and J_{f+top+1} by Miller's backward recurrence, 0 <= f < 1.

    Normalised with sum_k c_k J_{f+2k}(x) = (x/2)^f,
    c_0 = Gamma(f+1), c_k = (f+2k) Gamma(f+k)/k!.
    """
    xmax = float(np.max(x))
    n_start = int(max(xmax, f + top)) + 24 + int(6.0 * xmax ** (1.0 / 3.0))
    coef = np.empty(n_start // 2 + 2)
    # gk runs through Gamma(f+k)/k!, starting at k = 1
    gk = gamma_real(f + 1.0)
    coef[0] = gk
    for k in range(1, len(coef)):
        coef[k] = (f + 2 * k) * gk
        gk = gk * (f + k) / (k + 1)

    jp1 = np.zeros_like(x)
    j = np.full_like(x, 1e-280)
    norm = np.zeros_like(x)
    keep0 = np.zeros_like(x)
    keep1 = np.zeros_like(x)
    n = n_start
    if n % 2 == 0:
        norm = norm + coef[n // 2] * j
    if n == top:
        keep0 = j.copy()
    while n > 0:
        jm1 = 2.0 * (f + n) / x * j - jp1
        jp1, j = j, jm1
        n -= 1
        if n == top:
            keep0, keep1 = j.copy(), jp1.copy()
        if n % 2 == 0:
            norm = norm + coef[n // 2] * j
        big = np.abs(j) > 1e250
        if big.any():
            s = np.where(big, 1e-250, 1.0)
            j, jp1, norm, keep0, keep1 = j * s, jp1 * s, norm * s, keep0 * s, keep1 * s
    scale = (0.5 * x) ** f / norm
    return keep0 * scale, keep1 * scale


def _bessel_miller(nu: float, x):
    if nu >= 0:
        top = int(math.floor(nu))
        f = nu - top
        j0, _ = _miller_pair(f, x, top)
        return j0
    lo = math.floor(nu)
    f = nu - lo
    jf, jf1 = _miller_pair(f, x, 0)
    o = f
    j_hi, j = jf1, jf
    while o - 1.0 >= nu - 1e-12:
        jm1 = 2.0 * o / x * j - j_hi
        j_hi, j = j, jm1
        o -= 1.0
    return j


def bessel_j(nu: float, x):
    """Bessel function of the first kind J_nu(x), real order, x >= 0.

    Regimes: ascending series for ``x <= series_limit(nu)``; Hankel's
    asymptotic expansion for ``x >= asymptotic_threshold(nu)``; Miller's
    backward recurrence (with the Gegenbauer normalisation sum for fractional
    order) in between. Negative integer orders use J_{-n} = (-1)^n J_n.
    Accepts a scalar or an array ``x``.
    """
    nu = float(nu)
    if not math.isfinite(nu) or abs(nu) > MAX_ORDER:
        raise UnsupportedOrder(f"|nu| = {abs(nu)} outside the working range {MAX_ORDER}")
    scalar = np.ndim(x) == 0
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xa < 0) or not np.all(np.isfinite(xa)):
        raise DomainError("bessel_j requires finite x >= 0")
    if nu < 0 and nu == round(nu):
        n = int(-nu)
        out = bessel_j(float(n), xa)
        out = -out if n % 2 else out
        return float(out[0]) if scalar else out

    out = np.empty_like(xa)
    zero = xa == 0.0
    if zero.any():
        if nu < 0:
            raise DomainError("J_nu(0) is infinite for negative non-integer order")
        out[zero] = 1.0 if nu == 0.0 else 0.0
    s_lim = series_limit(nu)
    a_lim = asymptotic_threshold(nu)
    ser = ~zero & (xa <= s_lim)
    asy = ~zero & (xa >= a_lim)
    mid = ~zero & ~ser & ~asy
    if ser.any():
        out[ser] = _bessel_series(nu, xa[ser])
    if asy.any():
        out[asy] = _bessel_asymptotic(nu, xa[asy])
    if mid.any():
        out[mid] = _bessel_miller(nu, xa[mid])
    return float(out[0]) if scalar else out


def bessel_j_regime(nu: float, x: float, regime: str) -> float:
    """Evaluate one specific regime (``series``, ``miller`` or ``asymptotic``).

    Used to test agreement of neighbouring regimes across their switchover.
    """
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    fn = {"series": _bessel_series, "miller": _bessel_miller, "asymptotic": _bessel_asymptotic}[regime]
    return float(fn(float(nu), xa)[0])
