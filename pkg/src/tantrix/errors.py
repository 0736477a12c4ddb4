"""Exception types shared across the package."""


class TantrixError(Exception):
    """Base class for all package errors."""


class DegenerateCurve(TantrixError):
    """Curve is too short, collapsed, or otherwise unusable."""


class SingularCurve(TantrixError):
    """An operation requiring a regular curve met a vanishing velocity."""


class NotInHemisphere(TantrixError):
    """Central projection asked for a curve leaving the open hemisphere."""

    def __init__(self, message, indices=None):
        super().__init__(message)
        self.indices = indices


class PoleOnCurve(TantrixError):
    """Stereographic projection asked with the pole (nearly) on the curve."""


class NotSimple(TantrixError):
    """Operation requires an embedded curve but a self-intersection exists."""


class StepTooLarge(TantrixError):
    """Explicit flow step exceeds the stability bound."""


class FlowBlowup(TantrixError):
    """Curvature blew past the safety bound during the flow."""


class HullViolation(TantrixError):
    """Origin is not interior to the convex hull where that is required."""


class MismatchTooLarge(TantrixError):
    """Endpoint gap is too wide for the closing blend to absorb."""


class PreconditionViolated(TantrixError):
    """Input does not satisfy the documented hypotheses of an operation."""


class AmbiguousClassification(TantrixError):
    """Double-spiral classification could not be decided at this resolution."""


class MultipleSingularity(TantrixError):
    """Surgery point hosts more than the single expected feature."""


class NotDouble(TantrixError):
    """Expected exactly two transversal branches through the surgery point."""


class SurgeryContractViolated(TantrixError):
    """A surgery produced a result outside its certified bounds."""


class LiftInvalid(TantrixError):
    """Proposed double cover fails the symmetry / closure requirements."""


class InflectedCurve(TantrixError):
    """Operation needs nonvanishing curvature but an inflection exists."""


class NotInscribed(TantrixError):
    """Curve does not touch the boundary of its containing hemisphere."""


class ConstraintUnsatisfiable(TantrixError):
    """Rejection sampling exhausted its attempt budget."""


class InsufficientSamples(TantrixError):
    """Too few samples for the requested stencil or operation."""


class DegenerateField(TantrixError):
    """Scalar field sits inside the dead band almost everywhere."""


class ClassificationFailed(TantrixError):
    """Local surgery could not establish a usable spiral class."""


class DisconnectedResult(TantrixError):
    """Both candidate reconnections left the curve disconnected."""


class InfeasibleSpeed(TantrixError):
    """No strictly positive speed function satisfies the closure system."""


class InvalidTriple(TantrixError):
    """Requested count triple is not attainable for the chosen family."""


class SpecParseError(TantrixError):
    """Curve specification file is malformed."""
