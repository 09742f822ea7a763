import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from fourbessel.closedform import (
    build_terms,
    detect_degeneracy,
    eval_integral,
    eval_scaled,
    suggest_perturbation,
    validate,
)
from fourbessel.errors import DegenerateParameters, ValidationError
from fourbessel.mellin import contour_quadrature
from fourbessel.oracle import oscillatory_integral
from fourbessel.params import Branch, EvalRequest, Parameters

GOLDEN = Parameters(0.0, 0.5, 0.5, 0.5, 0.5)
REF = Parameters(-0.5, 0.0, 1.0, 0.5, 1.5)
mp.mp.dps = 30


def meijer_reference(p: Parameters, tau: float) -> float:
    """The Mellin-Barnes integral written as a Meijer G-function, evaluated by mpmath."""
    mu, A, B = p.mu, p.alpha + p.beta, p.gamma_ + p.delta
    d1, d2 = p.alpha - p.beta, p.gamma_ - p.delta
    a_n = [1 + mu / 2, (1 + mu) / 2, 1 - B / 2]
    a_p = [(-d2 + 2) / 2, (B + 2) / 2, (d2 + 2) / 2]
    b_m = [(A + mu + 1) / 2, 1, mp.mpf(1) / 2]
    b_q = [1 - (-d1 - mu + 1) / 2, 1 - (A - mu + 1) / 2, 1 - (d1 - mu + 1) / 2]
    return float(mp.meijerg([a_n, a_p], [b_m, b_q], mp.mpf(tau) ** -2) / (2 * mp.pi))


def kinds(params, a=1.0, b=0.5):
    return {v.kind for v in validate(EvalRequest(params, a, b))}


def valid_params():
    return st.builds(
        Parameters,
        st.floats(-1.0, 1.5),
        st.floats(0, 3), st.floats(0, 3), st.floats(0, 3), st.floats(0, 3),
    ).filter(lambda p: not validate(EvalRequest(p, 1.0, 0.5)))


# validation ---------------------------------------------------------------

def test_golden_parameters_valid():
    assert validate(EvalRequest(GOLDEN, 2.0, 1.0)) == []


def test_mu_too_large():
    msgs = [str(v) for v in validate(EvalRequest(Parameters(2.5, 0.5, 0.5, 0.5, 0.5), 1.0, 2.0))]
    assert any(m.startswith("ConvergenceAtInfinity") and "mu < 2" in m for m in msgs)


def test_convergence_at_zero():
    assert "ConvergenceAtZero" in kinds(Parameters(-4.0, 0.5, 0.5, 0.5, 0.5))


def test_resonance():
    assert "Resonance" in kinds(GOLDEN, 1.0, 1.0)


def test_contour_infeasible_reported():
    assert "ContourInfeasible" in kinds(Parameters(1.9, 0.0, 0.0, 0.0, 0.0))


def test_eval_integral_raises_on_violation():
    with pytest.raises(ValidationError) as exc:
        eval_integral(EvalRequest(Parameters(2.5, 0.5, 0.5, 0.5, 0.5), 1.0, 2.0))
    assert exc.value.violations


# degeneracy ---------------------------------------------------------------

def test_collision_mu_zero_unit_gamma_delta():
    cols = detect_degeneracy(Parameters(0.0, 0.3, 0.4, 1.0, 1.0))
    left = [c for c in cols if c.direction == "left"]
    assert left and not left[0].removable
    assert "Degenerate" in kinds(Parameters(0.0, 0.3, 0.4, 1.0, 1.0))


def test_no_collision_reference_set():
    assert detect_degeneracy(Parameters(-0.5, 1.0, 1.0, 0.5, 0.5)) == []


def test_no_left_collision_quarter_orders():
    cols = detect_degeneracy(Parameters(0.0, 0.3, 0.4, 0.25, 0.25))
    assert [c for c in cols if c.direction == "left"] == []


def test_degenerate_closed_form_refuses():
    with pytest.raises(ValidationError):
        eval_integral(EvalRequest(Parameters(0.0, 1.0, 1.0, 1.0, 1.0), 1.0, 0.5))
    with pytest.raises(DegenerateParameters):
        eval_scaled(Parameters(0.0, 1.0, 1.0, 1.0, 1.0), 0.5)


def test_suggest_perturbation_is_labelled():
    out = suggest_perturbation(Parameters(0.0, 1.0, 1.0, 1.0, 1.0))
    assert out["approximate"] is True and abs(out["mu_shift"]) == 1e-5
    assert not validate(EvalRequest(out["params"], 1.0, 0.5))


# term structure -----------------------------------------------------------

def test_term_powers():
    p = Parameters(0.3, 1.1, 0.7, 0.4, 1.9)
    assert [t.power_of_tau for t in build_terms(p, Branch.TAU_BELOW_ONE)] == pytest.approx([-0.3, 0.7, 2.3])
    assert [t.power_of_tau for t in build_terms(p, Branch.TAU_ABOVE_ONE)] == pytest.approx([-3.1, -1.0, -2.0])


def test_term_scales():
    p = Parameters(0.3, 1.1, 0.7, 0.4, 1.9)
    h = 2.0**0.3
    assert [t.scale for t in build_terms(p, Branch.TAU_BELOW_ONE)] == pytest.approx([h / 2, -h / 2, h])
    assert [t.scale for t in build_terms(p, Branch.TAU_ABOVE_ONE)] == pytest.approx([h, h / 2, -h / 2])


def test_equal_alpha_beta_second_term_vanishes():
    res = eval_scaled(Parameters(-0.5, 1.0, 1.0, 0.5, 1.5), 0.4)
    assert res.diagnostics["vanished_terms"] >= 1 and res.diagnostics["terms_used"][1] == 0


def test_equal_gamma_delta_third_term_vanishes_above_one():
    res = eval_scaled(Parameters(-0.5, 0.0, 1.0, 0.5, 0.5), 2.5)
    assert res.diagnostics["terms_used"][2] == 0


# values -------------------------------------------------------------------

@pytest.mark.parametrize("tau", [0.1, 0.3, 0.5, 0.8, 0.9])
def test_golden_scaled_below_one(tau):
    assert eval_scaled(GOLDEN, tau).value == pytest.approx(1 / math.pi, rel=1e-8)


@pytest.mark.parametrize("tau", [1.2, 2.0, 5.0, 10.0])
def test_golden_scaled_above_one(tau):
    assert eval_scaled(GOLDEN, tau).value == pytest.approx(1 / (math.pi * tau), rel=1e-8)


@pytest.mark.parametrize("a, b", [(2.0, 1.0), (1.0, 2.0)])
def test_golden_full_integral(a, b):
    res = eval_integral(EvalRequest(GOLDEN, a, b))
    assert res.value == pytest.approx(0.15915494309189535, rel=1e-8)
    assert res.branch is (Branch.TAU_BELOW_ONE if b < a else Branch.TAU_ABOVE_ONE)


def test_reference_three_way():
    closed = eval_scaled(REF, 0.5)
    assert contour_quadrature(REF, 0.5).value == pytest.approx(closed.value, rel=1e-8)
    assert oscillatory_integral(EvalRequest(REF, 1.0, 0.5)).value == pytest.approx(closed.value, rel=1e-8)


@pytest.mark.parametrize("params, tau", [
    (Parameters(-0.5, 0.25, 1.5, 0.5, 2.5), 0.8),
    (Parameters(0.5, 0.25, 1.5, 0.5, 2.5), 1.25),
    (Parameters(-0.5, 0.0, 1.0, 0.5, 1.5), 0.5),
    (Parameters(1.5, 0.3, 2.2, 0.6, 1.4), 0.35),
    (Parameters(1.2, 3.1, 0.2, 1.7, 0.9), 3.0),
    (Parameters(-0.8, 0.1, 0.3, 0.2, 0.45), 0.05),
    (Parameters(0.1, 7.5, 2.25, 0.6, 11.3), 1.7),
    (Parameters(0.4, -0.3, 1.2, 2.6, -0.7), 0.6),
])
def test_against_meijer_g(params, tau):
    assert eval_scaled(params, tau).value == pytest.approx(meijer_reference(params, tau), rel=1e-10)


def test_frozen_regression_values():
    # values confirmed by the Meijer-G reference and the real-axis oracle
    assert eval_scaled(Parameters(-0.5, 0.25, 1.5, 0.5, 2.5), 0.8).value == pytest.approx(
        0.01263913469342559, rel=1e-11)
    assert eval_scaled(Parameters(0.5, 0.25, 1.5, 0.5, 2.5), 1.25).value == pytest.approx(
        0.07769665812026596, rel=1e-10)


def test_error_estimate_covers_meijer_difference():
    rng = np.random.default_rng(8)
    checked = 0
    while checked < 12:
        params = Parameters(rng.uniform(-1, 1.5), *rng.uniform(0, 3, 4))
        tau = float(rng.choice([rng.uniform(0.1, 0.9), rng.uniform(1.1, 6)]))
        if validate(EvalRequest(params, 1.0, tau)):
            continue
        res = eval_scaled(params, tau)
        ref = meijer_reference(params, tau)
        assert abs(res.value - ref) <= res.abs_err_est + 1e-13 * abs(ref)
        checked += 1


def test_slow_convergence_flag():
    res = eval_scaled(REF, 0.98)
    assert res.diagnostics["slow_convergence"]
    assert not eval_scaled(REF, 0.5).diagnostics["slow_convergence"]


# invariants ---------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(valid_params(), st.sampled_from([0.25, 0.5, 0.8, 1.25, 2.0, 4.0]))
def test_symmetry_within_pairs(p, tau):
    base = eval_scaled(p, tau).value
    swapped_ab = eval_scaled(Parameters(p.mu, p.beta, p.alpha, p.gamma_, p.delta), tau).value
    swapped_cd = eval_scaled(Parameters(p.mu, p.alpha, p.beta, p.delta, p.gamma_), tau).value
    assert swapped_ab == pytest.approx(base, rel=1e-10, abs=1e-14)
    assert swapped_cd == pytest.approx(base, rel=1e-10, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(valid_params(), st.floats(0.2, 5.0), st.floats(0.2, 5.0))
def test_duality_between_branches(p, a, b):
    assume(abs(a / b - 1) > 0.05)
    swapped = Parameters(p.mu, p.gamma_, p.delta, p.alpha, p.beta)
    assume(not validate(EvalRequest(swapped, b, a)))
    lhs = eval_integral(EvalRequest(p, a, b))
    rhs = eval_integral(EvalRequest(swapped, b, a))
    assert lhs.branch is not rhs.branch
    assert rhs.value == pytest.approx(lhs.value, rel=1e-8, abs=lhs.abs_err_est + rhs.abs_err_est)


@settings(max_examples=30, deadline=None)
@given(valid_params(), st.floats(0.2, 5.0), st.floats(0.2, 5.0), st.floats(0.1, 10.0))
def test_scale_covariance(p, a, b, lam):
    assume(abs(a / b - 1) > 0.05)
    base = eval_integral(EvalRequest(p, a, b)).value
    scaled = eval_integral(EvalRequest(p, lam * a, lam * b)).value
    assert scaled == pytest.approx(base * lam ** (-p.mu - 1), rel=1e-12, abs=1e-300)
