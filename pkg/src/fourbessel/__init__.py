"""Integrals of a power times four Bessel functions of the first kind.

    int_0^inf x^mu J_alpha(ax) J_beta(ax) J_gamma(bx) J_delta(bx) dx

evaluated as a sum of 6F5 hypergeometric terms, with two independent
cross-checks: the Mellin-Barnes contour integral (by quadrature and by
residues) and direct oscillatory quadrature on the real axis.
"""

from .closedform import eval_integral, eval_scaled, validate
from .evaluate import METHODS, evaluate
from .params import Branch, EvalRequest, EvalResult, Method, Parameters

__all__ = [
    "Branch", "EvalRequest", "EvalResult", "METHODS", "Method", "Parameters",
    "eval_integral", "eval_scaled", "evaluate", "validate",
]
