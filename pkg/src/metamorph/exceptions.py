class MetamorphError(Exception):
    """Base class for errors raised by this package."""


class QuadratureError(MetamorphError, ArithmeticError):
    """Quadrature could not reach the requested accuracy (window too wide,
    non-finite integrand, or no convergence under node doubling)."""


class BoundaryDecayError(MetamorphError, ValueError):
    """A sampled integrand does not decay at the grid boundary."""


class StencilError(MetamorphError, ArithmeticError):
    """A finite-difference stencil underflowed or hit a non-finite value."""


class BranchConsistencyError(MetamorphError, ArithmeticError):
    """Two algebraically equal closed forms disagreed beyond rounding."""


class ScenarioError(MetamorphError, ValueError):
    """A scenario file failed schema validation."""
