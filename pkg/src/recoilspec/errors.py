"""Exception hierarchy for recoilspec.

All numerical-failure exceptions derive from ConvergenceError so the CLI can
map them onto a single exit code.
"""


class RecoilSpecError(Exception):
    """Base class for all recoilspec errors."""


class ConfigError(RecoilSpecError):
    """Invalid physical parameters or malformed run configuration."""


class ConvergenceError(RecoilSpecError):
    """Base class for numerical-convergence failures."""


class QuadratureConvergenceError(ConvergenceError):
    """Doubling the quadrature nodes changed the result beyond tolerance."""


class StepSizeError(ConvergenceError):
    """Adaptive finite-difference/Richardson derivative did not converge."""


class NoCrossingError(ConvergenceError):
    """The overlap probability never reaches the requested working point."""


class FlatFlankError(ConvergenceError):
    """|dP/dDelta| on the resonance flank is below the usable threshold."""


class PerturbativeRegimeError(RecoilSpecError):
    """First-order-in-g treatment requested outside its validity range."""


class UnsupportedDampingError(RecoilSpecError):
    """Closed-form propagation requested with damping it does not support."""


class GridUnderflowError(ConvergenceError):
    """Probability mass leaked off the finite phase-space grid."""


class OptimizerError(ConvergenceError):
    """All optimizer restarts failed to converge."""
