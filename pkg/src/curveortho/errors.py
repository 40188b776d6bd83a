"""Exception hierarchy for curveortho.

Errors are split into configuration problems (bad inputs, violated
preconditions) and numerical-contract violations (iteration failures,
resolution limits, contraction/conditioning failures).  The CLI maps the
two families onto distinct exit codes.
"""


class CurveOrthoError(Exception):
    """Base class for all curveortho errors."""


class ConfigError(CurveOrthoError):
    """Invalid configuration or precondition violation (CLI exit 1)."""


class DomainError(ConfigError):
    """Evaluation point lies outside the operation's domain of validity."""


class CoincidenceError(DomainError):
    """Kernel evaluated with the two arguments inside the pole guard."""


class CutProximityError(DomainError):
    """Evaluation point too close to a branch cut of the singular weight."""


class ContourProximityError(DomainError):
    """Target too close to a quadrature contour for accurate evaluation."""


class NumericalError(CurveOrthoError):
    """Numerical contract violation (CLI exit 2)."""


class IterationError(NumericalError):
    """Newton (or similar) iteration failed to converge."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class ResolutionError(NumericalError):
    """Requested accuracy not reachable at the given node/coefficient count."""


class FitError(NumericalError):
    """Boundary-collocation fit residual above the configured tolerance."""


class ContractionError(NumericalError):
    """Expansion requested below the contraction threshold.

    Carries ``n_min``, the smallest degree for which the contraction
    inequality holds with the computed bounds.
    """

    def __init__(self, msg, n_min=None):
        super().__init__(msg)
        self.n_min = n_min


class ConditioningError(NumericalError):
    """Gram matrix numerically indefinite or too ill-conditioned."""


class BranchTrackingError(NumericalError):
    """Two branch-tracking routes disagree; branch anchor audit required."""
