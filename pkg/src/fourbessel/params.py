"""Domain types shared by the evaluators."""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass, field

from .specfun import MAX_ORDER


class Method(str, enum.Enum):
    CLOSED_FORM = "ClosedForm"
    CONTOUR_QUAD = "ContourQuad"
    RESIDUE_SERIES = "ResidueSeries"
    ORACLE = "Oracle"


class Branch(str, enum.Enum):
    TAU_BELOW_ONE = "TauBelowOne"
    TAU_ABOVE_ONE = "TauAboveOne"

    @classmethod
    def of(cls, tau: float) -> "Branch":
        if not tau > 0 or tau == 1.0:
            raise ValueError(f"tau must be positive and different from 1, got {tau!r}")
        return cls.TAU_BELOW_ONE if tau < 1.0 else cls.TAU_ABOVE_ONE


@dataclass(frozen=True)
class Parameters:
    """Exponent ``mu`` and Bessel orders of x^mu J_alpha(ax) J_beta(ax) J_gamma(bx) J_delta(bx)."""

    mu: float
    alpha: float
    beta: float
    gamma_: float
    delta: float

    def __post_init__(self):
        for name in ("mu", "alpha", "beta", "gamma_", "delta"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, v)
        for name in ("alpha", "beta", "gamma_", "delta"):
            if abs(getattr(self, name)) > MAX_ORDER:
                raise ValueError(f"|{name}| exceeds the supported order range {MAX_ORDER}")

    def swapped_pairs(self) -> "Parameters":
        """(alpha, beta) <-> (gamma, delta); pairs with exchanging a and b."""
        return Parameters(self.mu, self.gamma_, self.delta, self.alpha, self.beta)

    def as_dict(self) -> dict:
        return {"mu": self.mu, "alpha": self.alpha, "beta": self.beta, "gamma": self.gamma_, "delta": self.delta}


@dataclass(frozen=True)
class EvalRequest:
    params: Parameters
    a: float
    b: float

    def __post_init__(self):
        for name in ("a", "b"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def tau(self) -> float:
        return self.b / self.a

    def as_dict(self) -> dict:
        return {**self.params.as_dict(), "a": self.a, "b": self.b}


@dataclass
class EvalResult:
    value: float
    abs_err_est: float
    method: Method
    branch: Branch
    diagnostics: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["method"] = self.method.value
        d["branch"] = self.branch.value
        return d

    def scaled(self, factor: float) -> "EvalResult":
        return EvalResult(self.value * factor, self.abs_err_est * abs(factor), self.method, self.branch,
                          dict(self.diagnostics))
