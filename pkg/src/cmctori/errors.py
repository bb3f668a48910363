"""Exception types shared across the package."""


class CmctoriError(Exception):
    """Base class for all package-specific errors."""


class DegreeOverflowError(CmctoriError, ValueError):
    """A polynomial exceeds the degree bound an operation requires."""


class DomainError(CmctoriError, ValueError):
    """Input outside the mathematical domain of an operation."""


class DegeneracyError(CmctoriError, ValueError):
    """Coincident roots, proportional polynomials, or similar collapse."""


class SharedRootError(DegeneracyError):
    """b1 and b2 share a root (discriminant vanishes), so the operation is
    undefined or non-unique."""


class DoublePointError(DomainError):
    """t = 0 handle attachment: the curve acquires an ordinary double point."""


class AccuracyError(CmctoriError, RuntimeError):
    """An iteration failed to reach the requested tolerance.

    Carries the best available estimate(s) in ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class ProximityError(CmctoriError, RuntimeError):
    """A path passes closer to a branch point than the safety margin."""


class RefinementError(CmctoriError, RuntimeError):
    """A path sampling is too coarse to continue y unambiguously."""


class GeometryError(CmctoriError, RuntimeError):
    """No admissible contour exists at the requested safety margin.

    Try a smaller margin or perturb the root configuration.
    """


class RankError(CmctoriError, RuntimeError):
    """A constraint matrix has unexpected numerical rank.

    Carries the singular values in ``singular_values``.
    """

    def __init__(self, message, singular_values=None):
        super().__init__(message)
        self.singular_values = singular_values


class PreconditionError(CmctoriError, ValueError):
    """A documented precondition of an operation is violated."""


class DegenerationError(CmctoriError, RuntimeError):
    """A deformation family broke down before reaching the requested t.

    ``t_min`` reports the smallest t that was still solvable.
    """

    def __init__(self, message, t_min=None):
        super().__init__(message)
        self.t_min = t_min


class IllConditionedError(CmctoriError, RuntimeError):
    """A Jacobian or linear system is too ill-conditioned to trust."""


class CertificateError(CmctoriError, RuntimeError):
    """A torus certificate failed revalidation."""


class ParseError(CmctoriError, ValueError):
    """A file or CLI argument could not be parsed."""
