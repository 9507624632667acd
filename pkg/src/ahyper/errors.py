"""Exception types shared across the toolkit."""


class AhyperError(Exception):
    """Base class for all toolkit errors."""


class InvalidConfiguration(AhyperError):
    """Point configuration violates its invariants (duplicates, wrong rank, not generating Z^n)."""


class DegenerateConfiguration(AhyperError):
    """The polytope is not full-dimensional."""


class UnsupportedDimension(AhyperError):
    """Requested operation is outside the implemented dimension range."""


class SolveIncomplete(AhyperError):
    """Root solver could not certify the expected number of torus solutions.

    Carries the partial results on ``.points`` and the certificate on
    ``.certificate``.
    """

    def __init__(self, message, points=None, certificate=None):
        super().__init__(message)
        self.points = points or []
        self.certificate = certificate


class GenericityFailure(AhyperError):
    """Random perturbation failed to reach the Morse locus within the retry budget."""


class NoPole(AhyperError):
    """The Laurent polynomial has no pole at the requested divisor."""


class ResonantBranch(AhyperError):
    """Two-sided cycle basis requested with integer parameter (trivial monodromy)."""


class FlowEscape(AhyperError):
    """Descent-flow step controller failed; carries the partial path on ``.partial``."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class SaddleConnection(AhyperError):
    """Descent flow stalled at another critical point (imaginary parts collide)."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class HypothesisViolation(AhyperError):
    """A theorem hypothesis (e.g. 0 in the interior of the polytope) does not hold."""


class NonDecayingEndpoint(AhyperError):
    """Cycle endpoint where the integrand has not decayed below truncation tolerance."""


class StepTooSmall(AhyperError):
    """Finite-difference noise dominates the requested operator residual."""
