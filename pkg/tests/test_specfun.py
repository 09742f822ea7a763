import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fourbessel.errors import DomainError, PoleArgument, UnsupportedOrder
from fourbessel.specfun import (
    asymptotic_threshold,
    bessel_j,
    bessel_j_regime,
    gamma_real,
    log_gamma_complex,
    log_gamma_fast,
    pochhammer,
    pole_distance,
    recip_gamma_real,
    series_limit,
)

mp.mp.dps = 30
SQRT_PI = math.sqrt(math.pi)

off_pole = st.floats(-10, 10).filter(lambda x: pole_distance(x) > 1e-3 and pole_distance(1 - x) > 1e-3)


@pytest.mark.parametrize("x, expected", [
    (0.5, 1.7724538509055160), (1.0, 1.0), (-0.5, -3.5449077018110320), (5.0, 24.0),
])
def test_gamma_real_examples(x, expected):
    assert gamma_real(x) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("x", [0.0, -1.0, -3.0, -3.0 + 5e-13])
def test_gamma_real_rejects_poles(x):
    with pytest.raises(PoleArgument):
        gamma_real(x)


@pytest.mark.parametrize("x, expected", [(0.0, 0.0), (-3.0, 0.0), (2.0, 1.0)])
def test_recip_gamma_examples(x, expected):
    assert recip_gamma_real(x) == expected


def test_gamma_matches_mpmath():
    rng = np.random.default_rng(11)
    xs = [x for x in rng.uniform(-50, 50, 2000) if pole_distance(x) > 1e-6]
    worst = max(abs(gamma_real(x) / float(mp.gamma(x)) - 1) for x in xs)
    assert worst <= 1e-13


def test_recip_gamma_matches_mpmath():
    rng = np.random.default_rng(12)
    xs = [x for x in rng.uniform(-50, 50, 2000) if pole_distance(x) > 1e-6]
    worst = max(abs(recip_gamma_real(x) / float(mp.rgamma(x)) - 1) for x in xs)
    assert worst <= 1e-13


@given(off_pole)
def test_reflection(x):
    assert gamma_real(x) * gamma_real(1 - x) * math.sin(math.pi * x) / math.pi == pytest.approx(1.0, rel=1e-12)


@given(st.floats(0.01, 20))
def test_duplication(z):
    lhs = gamma_real(z) * gamma_real(z + 0.5)
    rhs = 2.0 ** (1 - 2 * z) * SQRT_PI * gamma_real(2 * z)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@given(st.floats(-40, 40).filter(lambda x: pole_distance(x) > 1e-6))
def test_recip_times_gamma(x):
    assert recip_gamma_real(x) * gamma_real(x) == pytest.approx(1.0, rel=1e-12)


def test_log_gamma_complex_examples():
    assert log_gamma_complex(1.0 + 0j) == 0
    assert log_gamma_complex(0.5 + 0j) == pytest.approx(0.5723649429247001, rel=1e-15)
    z = 2 + 3j
    assert abs(log_gamma_complex(z + 1) - log_gamma_complex(z) - np.log(z)) <= 1e-12


@given(st.floats(-30, 30), st.floats(-60, 60))
def test_log_gamma_complex_principal_branch(x, y):
    z = complex(x, y)
    if abs(y) < 1e-3 and pole_distance(x) < 1e-3:
        return
    ref = complex(mp.loggamma(z))
    assert abs(log_gamma_complex(z) - ref) <= 1e-12 * max(1.0, abs(ref))


@given(st.floats(-30, 30), st.floats(-60, 60))
def test_log_gamma_complex_recurrence(x, y):
    z = complex(x, y)
    if abs(y) < 1e-3 and (pole_distance(x) < 1e-3 or pole_distance(x + 1) < 1e-3):
        return
    lhs = log_gamma_complex(z + 1)
    rhs = log_gamma_complex(z) + np.log(z)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs))


def test_log_gamma_complex_real_axis_matches_gamma_real():
    for x in np.linspace(0.1, 30, 60):
        assert math.exp(log_gamma_complex(complex(x)).real) == pytest.approx(gamma_real(x), rel=1e-12)


def test_log_gamma_fast_agrees_modulo_two_pi_i():
    rng = np.random.default_rng(5)
    z = rng.uniform(-400, 400, 500) + 1j * rng.uniform(-1400, 1400, 500)
    fast = log_gamma_fast(z)
    ref = np.array([complex(mp.loggamma(w)) for w in z])
    # real parts agree; imaginary parts agree up to multiples of 2 pi
    assert np.max(np.abs(fast.real - ref.real) / np.maximum(1, np.abs(ref))) <= 1e-12
    k = (fast.imag - ref.imag) / (2 * np.pi)
    assert np.max(np.abs(k - np.round(k)) * 2 * np.pi / np.maximum(1, np.abs(ref))) <= 1e-12


def test_log_gamma_rejects_poles():
    with pytest.raises(PoleArgument):
        log_gamma_complex(-2 + 0j)
    with pytest.raises(PoleArgument):
        log_gamma_fast(np.array([0.5, -4.0 + 0j]))


@pytest.mark.parametrize("a, k, expected", [(7.3, 0, 1.0), (1.0, 5, 120.0), (3.0, 2, 12.0), (-2.0, 5, 0.0)])
def test_pochhammer(a, k, expected):
    assert pochhammer(a, k) == expected


def test_pochhammer_overflow_is_infinite():
    assert math.isinf(pochhammer(10.0, 400))


def test_bessel_examples():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(0.5, math.pi / 2) == pytest.approx(2 / math.pi, rel=1e-14)
    series = mp.fsum((-1) ** m / (mp.factorial(m) * mp.factorial(m + 2)) * mp.mpf(0.5) ** (2 * m + 2)
                     for m in range(40))
    assert bessel_j(2, 1.0) == pytest.approx(float(series), rel=1e-14)


@pytest.mark.parametrize("nu", [-19.5, -7.3, -3.0, -0.5, 0.0, 0.25, 1.0, 2.5, 9.75, 20.0])
def test_bessel_matches_mpmath(nu):
    xs = np.geomspace(0.01, 300, 400)
    vals = bessel_j(nu, xs)
    for x, v in zip(xs, vals):
        ref = float(mp.besselj(nu, x))
        assert abs(v - ref) <= max(1e-11 * abs(ref), 1e-13)


def test_bessel_negative_integer_order():
    xs = np.linspace(0.1, 50, 100)
    for n in range(1, 6):
        assert np.allclose(bessel_j(-n, xs), (-1) ** n * bessel_j(n, xs), rtol=0, atol=0)


def test_bessel_recurrence_grid():
    xs = np.linspace(0.1, 100, 500)
    for nu in np.linspace(-5, 5, 41):
        jm, j0, jp = bessel_j(nu - 1, xs), bessel_j(nu, xs), bessel_j(nu + 1, xs)
        assert np.all(np.abs(jm + jp - 2 * nu / xs * j0) <= 1e-10 * np.maximum(1, np.abs(j0)))


def test_half_order_closed_forms():
    x = np.linspace(0.1, 100, 1000)
    pref = np.sqrt(2 / (np.pi * x))
    cases = {
        0.5: pref * np.sin(x),
        -0.5: pref * np.cos(x),
        1.5: pref * (np.sin(x) / x - np.cos(x)),
    }
    for nu, expected in cases.items():
        got = bessel_j(nu, x)
        assert np.all(np.abs(got - expected) <= 1e-11 * np.maximum(np.abs(expected), 1e-2))


@pytest.mark.parametrize("nu", [0.0, 0.5, 1.0, 3.3, 8.0, 15.5, 20.0])
def test_regime_switchover_consistency(nu):
    lo = series_limit(nu)
    for x in np.linspace(0.8 * lo, 1.2 * lo, 9):
        if x <= 0:
            continue
        s, m = bessel_j_regime(nu, x, "series"), bessel_j_regime(nu, x, "miller")
        assert abs(s - m) <= 1e-10 * max(abs(s), 1e-3)
    hi = asymptotic_threshold(nu)
    for x in np.linspace(hi, 1.1 * hi, 9):
        m, a = bessel_j_regime(nu, x, "miller"), bessel_j_regime(nu, x, "asymptotic")
        assert abs(m - a) <= 1e-10 * max(abs(m), 1e-3)


def test_bessel_errors():
    with pytest.raises(DomainError):
        bessel_j(1.0, -0.5)
    with pytest.raises(UnsupportedOrder):
        bessel_j(20.5, 1.0)
    with pytest.raises(DomainError):
        bessel_j(-0.5, 0.0)


@settings(max_examples=200)
@given(st.floats(-5, 5), st.floats(0.1, 100))
def test_bessel_recurrence_property(nu, x):
    jm, j0, jp = bessel_j(nu - 1, x), bessel_j(nu, x), bessel_j(nu + 1, x)
    assert abs(jm + jp - 2 * nu / x * j0) <= 1e-10 * max(1.0, abs(j0))
