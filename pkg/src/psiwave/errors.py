"""Exception types raised by the library."""


class PSIError(Exception):
    """Base class for all errors raised by psiwave."""


class SingularPointError(PSIError, ValueError):
    """A formula was evaluated at a point where it is not defined."""


class LatticeCollisionError(SingularPointError):
    """A harmonic ``n k + mu`` vanishes inside the truncation range."""

    def __init__(self, n, msg=None):
        self.n = n
        super().__init__(msg or f"lattice collision: n*k + mu = 0 at harmonic n={n}")


class DomainError(PSIError, ValueError):
    """Input outside the domain where an expansion or formula applies."""


class NoRootError(PSIError):
    """The resonance equation has no root for the requested ordinate."""


class BracketError(PSIError, RuntimeError):
    """Bisection could not find a sign change (an implementation fault)."""


class ResonanceError(PSIError, ValueError):
    """The Floquet parameter is not on the resonant set within tolerance."""


class AmbiguousContourError(PSIError):
    """A pole sits too close to the integration contour to classify."""


class IsolationError(PSIError):
    """More than two eigenvalues cluster around the resonant eigenvalue."""


class StabilityError(PSIError, ValueError):
    """The time step violates the stability bound of the integrator."""


class ConvergenceError(PSIError, RuntimeError):
    """The dense eigensolver failed to converge."""
