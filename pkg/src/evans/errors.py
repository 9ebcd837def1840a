"""Exception hierarchy. Every numerical failure mode gets its own class so
callers (and the CLI exit-code mapping) can react without string matching."""


class EvansError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(EvansError, ValueError):
    """Malformed input: wrong shape, non-finite entries, bad parameter."""


class EigenConvergenceError(EvansError):
    """Eigendecomposition failed to converge or its residual is too large."""

    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual


class RankDeficientError(EvansError):
    """Least-squares matrix is rank deficient below the relative tolerance."""

    def __init__(self, msg, index=None, direction=None):
        super().__init__(msg)
        self.index = index          # which singular value collapsed
        self.direction = direction  # the offending right singular vector


class DegenerateEigenvaluesError(EvansError):
    """Asymptotic matrix has a defective (non-semisimple) near-degeneracy,
    so eigenvectors cannot be separated reliably."""


class TrackingAmbiguityError(EvansError):
    """Two eigenvalue candidates are nearly equidistant from a tracked label;
    the contour step is too large to continue labels safely."""


class KatoStepError(EvansError):
    """Projection moved too far in one transport step; bisect the step."""


class BvpSolveError(EvansError):
    """Collocation system is numerically singular."""


class BvpAccuracyError(EvansError):
    """Boundary or interior residual of a mode solve exceeds tolerance."""


class BasisCollapseError(EvansError):
    """|det C| fell outside the trusted window; the mode values and the
    transported basis no longer span compatible spaces."""


class BasisMismatchError(EvansError):
    """Least-squares fit of the transported basis onto the mode values left
    a large residual (spans disagree)."""


class RootOnContourError(EvansError):
    """The Evans function vanished on (or numerically on) a contour point."""


class InsufficientRefinementError(EvansError):
    """A phase jump >= pi between adjacent samples; winding is unreliable."""


class RefinementBudgetError(EvansError):
    """Adaptive refinement hit the point budget before meeting the step
    criterion (often a root very close to the contour)."""


class StiffIntegrationError(EvansError):
    """Shooting integrator step size underflowed."""


class ProfileError(EvansError, ValueError):
    """Profile file failed validation (shape, monotonicity, NaN, schema)."""


class ConfigError(EvansError, ValueError):
    """Run configuration failed schema validation."""
