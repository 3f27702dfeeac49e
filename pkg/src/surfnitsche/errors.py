"""Exception types shared across the library."""


class SurfNitscheError(Exception):
    """Base class for all errors raised by this library."""


class DegenerateInputError(SurfNitscheError, ValueError):
    """Geometry query at a point where the closest-point map is not unique."""


class ProjectionError(SurfNitscheError, RuntimeError):
    """Boundary-curve projection did not converge to a valid minimizer."""


class UnsupportedDegreeError(SurfNitscheError, ValueError):
    """Requested quadrature or polynomial degree outside the supported range."""


class MeshInvalidError(SurfNitscheError, RuntimeError):
    """Mesh construction produced an element with a nonpositive area Jacobian."""


class DegenerateElementError(SurfNitscheError, RuntimeError):
    """Element or edge geometry is singular at an evaluation point."""


class InvalidPenaltyError(SurfNitscheError, ValueError):
    """Penalty parameter must be strictly positive."""


class SolverError(SurfNitscheError, RuntimeError):
    """Base class for linear-solver failures."""


class NotPositiveDefiniteError(SolverError):
    """Negative curvature encountered; the matrix is not positive definite."""


class MaxIterationsExceededError(SolverError):
    """Iteration cap reached before the requested tolerance was met."""
