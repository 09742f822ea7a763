"""Exception hierarchy shared by all modules."""


class FourBesselError(Exception):
    """Base class for every error raised by the package."""


class PoleArgument(FourBesselError, ValueError):
    """A gamma function was asked for its value at (or within 1e-12 of) a pole."""


class DomainError(FourBesselError, ValueError):
    pass


class UnsupportedOrder(FourBesselError, ValueError):
    pass


class InvalidSpec(FourBesselError, ValueError):
    pass


class InvalidPattern(FourBesselError, ValueError):
    pass


class NumeratorPole(FourBesselError, ArithmeticError):
    """A descending numerator gamma Gamma(m - k) reached a pole inside a series."""


class DegenerateParameters(FourBesselError, ValueError):
    """Two pole families collide and leave a pole the simple-residue calculus cannot treat."""


class ContourInfeasible(FourBesselError, ValueError):
    pass


class NearPole(FourBesselError, ValueError):
    pass


class NoConvergence(FourBesselError, ArithmeticError):
    pass


class StripViolation(FourBesselError, ValueError):
    pass


class UnsupportedMu(FourBesselError, ValueError):
    pass


class ValidationError(FourBesselError, ValueError):
    """Raised by the evaluators when :func:`fourbessel.closedform.validate` reports violations."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))
