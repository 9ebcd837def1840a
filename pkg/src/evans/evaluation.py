"""Per-point assembly of the truncated Evans determinant.

The value at one spectral point lam is built from three factors: the
determinant of the matched boundary data at x = 0, and one basis-change
determinant per side relating the computed mode endpoints at x = L to the
analytically transported eigenspace basis.  The product is invariant under
eigenvector rescalings and label permutations inside the decaying set; it
depends on the transported bases only through an analytic gauge, which is
why winding numbers and zeros are meaningful.

Everything here treats the left half-line through reflection: the "minus"
frame and basis belong to the reflected system's right side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bvp import solve_all_modes
from .errors import (
    BasisCollapseError,
    BasisMismatchError,
    InvalidArgumentError,
)
from .frames import PLUS, SpectralFrame, frame_at
from .linalg import cheb_grid, det_lu, lstsq
from .systems import EvansSystem, reflect_left

__all__ = ["EvansConfig", "EvansSample", "evans_at", "evans_point", "solve_C"]


@dataclass(frozen=True)
class EvansConfig:
    """Shared knobs for evaluation and contour sweeps.

    L=None / N=None fall back to the system defaults.  mode selects frame
    labeling along contours: "sort" relabels by real part at each point,
    "track" continues labels by nearest match (needed when a contour crosses
    the essential spectrum).
    """

    L: float | None = None
    N: int | None = None
    mode: str = "sort"
    threads: int = 1
    max_points: int = 4096
    transport_substeps: int = 4
    degeneracy_tol: float = 1e-8
    det_floor: float = 1e-12
    bvp_residual_tol: float = 1e-8
    solve_c_tol: float = 1e-8
    target_size: float = 1e-3
    max_boxes: int = 512
    root_box_points: int = 16
    root_refinement_ratio: float = 0.1

    def __post_init__(self):
        if self.mode not in ("sort", "track"):
            raise InvalidArgumentError(f"mode must be 'sort' or 'track', got {self.mode!r}")
        if self.L is not None and self.L <= 0:
            raise InvalidArgumentError("L must be positive")
        if self.N is not None and self.N < 4:
            raise InvalidArgumentError("N must be at least 4")
        for name in ("threads", "transport_substeps", "max_boxes"):
            if getattr(self, name) < 1:
                raise InvalidArgumentError(f"{name} must be at least 1")
        if self.max_points < 4:
            raise InvalidArgumentError("max_points must cover at least 4 samples")
        if self.root_box_points < 8:
            raise InvalidArgumentError("root_box_points must be at least 8")
        for name in ("degeneracy_tol", "det_floor", "bvp_residual_tol",
                     "solve_c_tol", "target_size", "root_refinement_ratio"):
            if getattr(self, name) <= 0:
                raise InvalidArgumentError(f"{name} must be positive")

    def resolve(self, system: EvansSystem) -> tuple[float, int]:
        L = system.default_L if self.L is None else self.L
        N = system.default_N if self.N is None else self.N
        return float(L), int(N)


@dataclass(frozen=True)
class EvansSample:
    """One evaluated point: the value and its three factors.

    value == det_E * det_C_plus * det_C_minus by construction; diagnostics
    carries residual maxima from the mode solves and basis fits.
    """

    lam: complex
    value: complex
    det_E: complex
    det_C_plus: complex
    det_C_minus: complex
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        prod = self.det_E * self.det_C_plus * self.det_C_minus
        if abs(self.value - prod) > 1e-12 * max(abs(self.value), 1e-300):
            raise InvalidArgumentError("value does not factor as det_E * det_C+ * det_C-")


def solve_C(V_at_L: np.ndarray, Z: np.ndarray, tol: float = 1e-8):
    """Basis change C with V_at_L @ C ~= Z, and its determinant.

    Both column spans must be the same eigenspace; a large least-squares
    residual means the transported basis and the frame disagree about it.
    """
    V_at_L = np.asarray(V_at_L, dtype=complex)
    Z = np.asarray(Z, dtype=complex)
    if V_at_L.shape != Z.shape or V_at_L.ndim != 2:
        raise InvalidArgumentError(
            f"shape mismatch: endpoints {V_at_L.shape}, basis {Z.shape}")
    C = lstsq(V_at_L, Z)
    scale = max(float(np.linalg.norm(Z)), 1e-300)
    resid = float(np.linalg.norm(V_at_L @ C - Z))
    if resid > tol * scale:
        raise BasisMismatchError(
            f"basis fit residual {resid:.3e} exceeds {tol:.1e} * ||Z||; "
            "transported basis and frame span different spaces")
    return C, det_lu(C)


def _check_pair(lam, frame, Z, want_r, label):
    if frame.side != PLUS:
        raise InvalidArgumentError(
            f"{label} frame must be a right-side frame (reflected for the left half-line)")
    if frame.r != want_r:
        raise InvalidArgumentError(
            f"{label} frame tracks {frame.r} directions, expected {want_r}")
    if abs(frame.lam - lam) > 1e-12 * max(1.0, abs(lam)):
        raise InvalidArgumentError(
            f"{label} frame belongs to lam={frame.lam}, not {lam}")
    Z = np.asarray(Z, dtype=complex)
    if Z.shape != (frame.n, want_r):
        raise InvalidArgumentError(
            f"{label} basis has shape {Z.shape}, expected {(frame.n, want_r)}")
    return Z


def evans_at(system: EvansSystem, lam: complex,
             frames: tuple[SpectralFrame, SpectralFrame],
             bases: tuple[np.ndarray, np.ndarray],
             config: EvansConfig | None = None) -> EvansSample:
    """Assemble the truncated Evans value at lam from prepared ingredients.

    frames/bases are (right side, reflected left side); both frames live at
    lam and their bases span the respective decaying eigenspaces.  Pure
    function of its arguments: safe to run concurrently across lam.
    """
    if config is None:
        config = EvansConfig()
    fp, fm = frames
    n, r = system.n, system.r
    Zp = _check_pair(lam, fp, bases[0], r, "plus")
    Zm = _check_pair(lam, fm, bases[1], n - r, "minus")

    L, N = config.resolve(system)
    grid = cheb_grid(N, 0.0, L)
    reflected = reflect_left(system)

    bundle_p = solve_all_modes(system.A_fn, fp, grid,
                               residual_tol=config.bvp_residual_tol)
    bundle_m = solve_all_modes(reflected.A_fn, fm, grid,
                               residual_tol=config.bvp_residual_tol)

    Cp, det_cp = solve_C(bundle_p.end_matrix, Zp, tol=config.solve_c_tol)
    Cm, det_cm = solve_C(bundle_m.end_matrix, Zm, tol=config.solve_c_tol)
    for det_c, label in ((det_cp, "plus"), (det_cm, "minus")):
        if abs(det_c) < config.det_floor:
            raise BasisCollapseError(
                f"|det C_{label}| = {abs(det_c):.3e} below {config.det_floor:.1e}; "
                "increase L or refine the contour")

    det_E = det_lu(np.column_stack([bundle_m.start_matrix, bundle_p.start_matrix]))
    diagnostics = {
        "bvp_ode_residual": max(bundle_p.worst_ode_residual,
                                bundle_m.worst_ode_residual),
        "bvp_bc_residual": max(bundle_p.worst_bc_residual,
                               bundle_m.worst_bc_residual),
        "solve_c_residual_plus": float(np.linalg.norm(bundle_p.end_matrix @ Cp - Zp)),
        "solve_c_residual_minus": float(np.linalg.norm(bundle_m.end_matrix @ Cm - Zm)),
    }
    return EvansSample(lam, det_E * det_cp * det_cm, det_E, det_cp, det_cm,
                       diagnostics)


def evans_point(system: EvansSystem, lam: complex,
                config: EvansConfig | None = None) -> EvansSample:
    """One-shot evaluation with the frame eigenvectors as the bases.

    The basis-change determinants are then unity up to roundoff, so the
    value equals the boundary determinant in the frame's own gauge.  Zeros
    are gauge-independent; magnitudes are only comparable between nearby lam
    evaluated the same way.
    """
    if config is None:
        config = EvansConfig()
    reflected = reflect_left(system)
    n, r = system.n, system.r
    fp = frame_at(system.Ainf_fn(lam, PLUS), lam, r,
                  degeneracy_tol=config.degeneracy_tol)
    fm = frame_at(reflected.Ainf_fn(lam, PLUS), lam, n - r,
                  degeneracy_tol=config.degeneracy_tol)
    return evans_at(system, lam, (fp, fm), (fp.V[:, :r], fm.V[:, :n - r]),
                    config)
