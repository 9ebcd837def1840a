"""Evans functions for travelling-wave spectral stability.

The spectral problem on the real line is reduced to linear boundary-value
problems on a truncated half-line, solved by Chebyshev collocation; analytic
bases of the asymptotic eigenspaces are carried along spectral contours by
Kato transport, and point spectrum is counted and localized through winding
numbers of the resulting Evans function.
"""

from .bvp import BvpSolution, ModeBundle, solve_all_modes
from .contours import (
    ContourSpec,
    RootBox,
    WindingReport,
    circle,
    contour_eval,
    rectangle,
    root_localize,
    winding_number,
)
from .errors import (
    BasisCollapseError,
    BasisMismatchError,
    BvpAccuracyError,
    BvpSolveError,
    ConfigError,
    DegenerateEigenvaluesError,
    EigenConvergenceError,
    EvansError,
    InsufficientRefinementError,
    InvalidArgumentError,
    KatoStepError,
    ProfileError,
    RankDeficientError,
    RefinementBudgetError,
    RootOnContourError,
    StiffIntegrationError,
    TrackingAmbiguityError,
)
from .evaluation import EvansConfig, EvansSample, evans_at, evans_point, solve_C
from .frames import (
    AnalyticBasisTrack,
    SpectralFrame,
    frame_at,
    kato_basis_along_contour,
    kato_step,
    stable_projection,
    transport_basis,
)
from .linalg import CollocationGrid, EigenDecomposition, cheb_grid, det_lu, eig_dense, lstsq
from .oracle import (
    SecondOrderOperator,
    ShootingConfig,
    fd_eigs,
    nagumo_coupled_operator,
    nagumo_operator,
    shooting_wronskian,
    zero_potential_operator,
)
from .systems import (
    MINUS,
    PLUS,
    EvansSystem,
    SampledProfile,
    fourier_diff_operator,
    kdv,
    load_profile,
    nagumo_coupled,
    nagumo_scalar,
    reflect_left,
    registry,
    swift_hohenberg,
)

__all__ = [
    "AnalyticBasisTrack",
    "BasisCollapseError",
    "BasisMismatchError",
    "BvpAccuracyError",
    "BvpSolution",
    "BvpSolveError",
    "CollocationGrid",
    "ConfigError",
    "ContourSpec",
    "DegenerateEigenvaluesError",
    "EigenConvergenceError",
    "EvansConfig",
    "EvansError",
    "EvansSample",
    "EvansSystem",
    "MINUS",
    "PLUS",
    "fourier_diff_operator",
    "EigenDecomposition",
    "InsufficientRefinementError",
    "InvalidArgumentError",
    "KatoStepError",
    "ModeBundle",
    "ProfileError",
    "RankDeficientError",
    "RefinementBudgetError",
    "RootBox",
    "RootOnContourError",
    "SampledProfile",
    "SecondOrderOperator",
    "ShootingConfig",
    "SpectralFrame",
    "StiffIntegrationError",
    "TrackingAmbiguityError",
    "WindingReport",
    "cheb_grid",
    "circle",
    "contour_eval",
    "det_lu",
    "eig_dense",
    "evans_at",
    "evans_point",
    "fd_eigs",
    "frame_at",
    "kato_basis_along_contour",
    "kato_step",
    "kdv",
    "load_profile",
    "lstsq",
    "nagumo_coupled",
    "nagumo_coupled_operator",
    "nagumo_operator",
    "nagumo_scalar",
    "rectangle",
    "reflect_left",
    "registry",
    "root_localize",
    "shooting_wronskian",
    "solve_C",
    "solve_all_modes",
    "stable_projection",
    "swift_hohenberg",
    "transport_basis",
    "winding_number",
    "zero_potential_operator",
]
