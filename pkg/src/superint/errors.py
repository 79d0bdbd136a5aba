"""Exception types shared across the package."""


class SuperintError(Exception):
    """Base class for all package errors."""


class SingularPoint(SuperintError):
    """Phase point within the guard distance of a declared singular locus."""


class NonFinite(SuperintError):
    """An evaluation produced NaN or Inf."""


class InvalidParams(SuperintError):
    """System parameters violate the family's constraints."""


class PoleOfTangent(SuperintError):
    """T_kappa evaluated at a zero of C_kappa."""


class NonpositiveAngularPart(SuperintError):
    """Angular invariant is non-positive where sqrt(I) is required."""


class SingularRadius(SuperintError):
    """Radial coordinate at or below the singular guard."""


class SingularityHit(SuperintError):
    """Integration step floor reached near a singular locus."""


class NoConvergence(SuperintError):
    """Fixed-point iteration of the implicit midpoint step failed."""


class InsufficientSpan(SuperintError):
    """Trajectory too short for the requested closure analysis."""


class NoBoundMotion(SuperintError):
    """Energy below the potential minimum or motion unbounded."""


class QuadratureFailure(SuperintError):
    """Action quadrature did not reach the requested accuracy."""


class DegenerateActions(SuperintError):
    """Angular action hierarchy degenerate (j_{a+1} <= j_a)."""


class UnknownObservable(SuperintError):
    """Identity references an observable absent from the system catalog."""


class UnsupportedFamily(SuperintError):
    """Operation not defined for the given system family."""


class OriginSingularity(SuperintError):
    """Kustaanheimo-Stiefel map evaluated too close to z=0."""


class DegenerateZ(SuperintError):
    """Lobachevsky coordinate Z is real; the map degenerates."""


class InvalidQuantumNumbers(SuperintError):
    """Quantum numbers outside the family's admissible set."""


class DomainViolation(SuperintError):
    """Configuration outside the coordinate domain (e.g. xi not in (0,1))."""


class GridTooCoarse(SuperintError):
    """Richardson extrapolation disagreement above tolerance."""


class MixedParity(SuperintError):
    """Graded operation applied to an element without definite parity."""


class ConstraintViolated(SuperintError):
    """Superalgebra constraint (e.g. B=0, sum of frequencies zero) violated."""
