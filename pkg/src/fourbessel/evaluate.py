"""Single entry point that evaluates a request with any of the four methods."""

from __future__ import annotations

from .closedform import eval_integral, validate
from .errors import ValidationError
from .mellin import contour_quadrature, residue_series
from .oracle import MU_LIMIT, QuadConfig, oscillatory_integral
from .params import EvalRequest, EvalResult

METHODS = ("closed", "contour", "residue", "oracle")


def method_available(req: EvalRequest, method: str) -> bool:
    return method != "oracle" or req.params.mu <= MU_LIMIT


def evaluate(req: EvalRequest, method: str = "closed", rel_tol: float | None = None) -> EvalResult:
    """Full integral int_0^inf x^mu J_alpha(ax) J_beta(ax) J_gamma(bx) J_delta(bx) dx.

    Raises :class:`ValidationError` when the request violates a convergence,
    resonance, degeneracy or contour condition, whatever the method.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    violations = validate(req)
    if violations:
        raise ValidationError(violations)
    if method == "closed":
        return eval_integral(req, rel_tol) if rel_tol else eval_integral(req)
    if method == "oracle":
        cfg = QuadConfig(rel_tol=max(rel_tol, 1e-10)) if rel_tol else QuadConfig()
        return oscillatory_integral(req, cfg)
    factor = req.a ** (-req.params.mu - 1.0)
    if method == "contour":
        res = contour_quadrature(req.params, req.tau, rel_tol=rel_tol or 1e-10)
    else:
        res = residue_series(req.params, req.tau)
    return res.scaled(factor)
