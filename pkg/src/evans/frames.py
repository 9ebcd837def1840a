"""Eigen-frames of the limiting matrices and analytic basis transport.

A SpectralFrame fixes, at one value of the spectral parameter, an ordering
and a phase for the eigenpairs of the limiting matrix A(+-inf, lambda).
Along a contour the labels are continued either by real-part sorting or by
nearest-distance tracking (which continues them across the essential
spectrum), and bases of the decaying/growing eigenspaces are transported by
the normalized Kato propagator so they stay on a single analytic branch.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    DegenerateEigenvaluesError,
    InvalidArgumentError,
    KatoStepError,
    TrackingAmbiguityError,
)
from .linalg import eig_dense
from .systems import MINUS, PLUS

__all__ = [
    "SpectralFrame",
    "Projection",
    "AnalyticBasisTrack",
    "frame_at",
    "stable_projection",
    "kato_step",
    "kato_basis_along_contour",
]

SORT = "sort"
TRACK = "track"


@dataclass(frozen=True)
class SpectralFrame:
    """Labeled, phase-fixed eigenpairs of a limiting matrix.

    Columns of V are unit eigenvectors; W = V^-1, so W @ V = I holds by
    construction (rows of W are the dual basis). The first r labels span the
    decaying eigenspace wherever the labels are real-part ordered; under
    tracking they continue that space analytically.
    """

    lam: complex
    side: str
    eigenvalues: np.ndarray  # (n,)
    V: np.ndarray            # (n, n) right eigenvectors in label order
    W: np.ndarray            # (n, n) dual rows, W @ V = I
    r: int                   # tracked subspace dimension (decaying at +inf)

    @property
    def n(self):
        return self.eigenvalues.size

    @property
    def stable_count(self):
        return int((self.eigenvalues.real < 0).sum())


@dataclass(frozen=True)
class Projection:
    """Spectral projection onto a labeled group of eigendirections."""

    matrix: np.ndarray
    rank: int


def _fix_phase_initial(V):
    # largest-modulus entry of each column made real and positive
    idx = np.argmax(np.abs(V), axis=0)
    piv = V[idx, np.arange(V.shape[1])]
    return V * (np.abs(piv) / piv)


def _match_to_prev(prev_nu, nu, scale, tol):
    """Injective greedy nearest-distance matching, returning the permutation
    that puts `nu` into the label order of `prev_nu`."""
    n = nu.size
    dist = np.abs(prev_nu[:, None] - nu[None, :])
    for i in range(n):
        row = np.sort(dist[i])
        if n > 1 and row[1] <= 1.1 * row[0]:
            # two candidates essentially tied; harmless only if they are
            # the same (degenerate) value
            two = np.argsort(dist[i], kind="stable")[:2]
            if abs(nu[two[0]] - nu[two[1]]) > tol * scale:
                raise TrackingAmbiguityError(
                    f"label {i} at lambda step has candidates "
                    f"{nu[two[0]]:.6g} and {nu[two[1]]:.6g} within 10% "
                    f"distance; refine the contour"
                )
    perm = np.full(n, -1, dtype=int)
    taken = np.zeros(n, dtype=bool)
    order = np.argsort(dist, axis=None, kind="stable")
    filled = 0
    for flat in order:
        i, j = divmod(int(flat), n)
        if perm[i] >= 0 or taken[j]:
            continue
        perm[i] = j
        taken[j] = True
        filled += 1
        if filled == n:
            break
    return perm


def frame_at(Ainf, lam, r, prev=None, mode=SORT, side=PLUS, degeneracy_tol=1e-8):
    """Build the labeled eigen-frame of a limiting matrix.

    mode="sort" orders labels by ascending real part (ties by imaginary
    part); mode="track" continues the labels of `prev` by nearest-distance
    matching and aligns eigenvector phases with it. Defective
    near-degeneracies raise DegenerateEigenvaluesError; semisimple repeated
    eigenvalues (well-conditioned eigenbasis) are allowed.
    """
    if mode not in (SORT, TRACK):
        raise InvalidArgumentError(f"mode must be 'sort' or 'track', got {mode!r}")
    dec = eig_dense(Ainf)
    nu, V = dec.eigenvalues, dec.right_vectors
    n = nu.size
    if not 0 < r <= n:
        raise InvalidArgumentError(f"need 0 < r <= {n}, got r={r}")
    scale = max(1.0, float(np.abs(nu).max()))

    gap = np.abs(nu[:, None] - nu[None, :])
    np.fill_diagonal(gap, np.inf)
    if gap.min() <= degeneracy_tol * scale:
        cond = np.linalg.cond(V)
        if not np.isfinite(cond) or cond > 1e8:
            i, j = np.unravel_index(int(np.argmin(gap)), gap.shape)
            raise DegenerateEigenvaluesError(
                f"eigenvalues {nu[i]:.6g} and {nu[j]:.6g} are degenerate with "
                f"an ill-conditioned eigenbasis (cond {cond:.2e}); the "
                f"spectral separation hypothesis fails here"
            )

    if mode == TRACK and prev is not None:
        if prev.n != n:
            raise InvalidArgumentError("prev frame has mismatched dimension")
        perm = _match_to_prev(prev.eigenvalues, nu, scale, degeneracy_tol)
        nu, V = nu[perm], V[:, perm]
        overlap = np.sum(prev.V.conj() * V, axis=0)
        safe = np.abs(overlap) > 1e-12
        phase = np.where(safe, overlap / np.where(safe, np.abs(overlap), 1.0), 1.0)
        V = V / phase
    else:
        order = np.lexsort((nu.imag, nu.real))
        nu, V = nu[order], V[:, order]
        V = _fix_phase_initial(V)

    try:
        W = np.linalg.inv(V)
    except np.linalg.LinAlgError as exc:
        raise DegenerateEigenvaluesError(
            f"eigenvector matrix is singular: {exc}"
        ) from exc
    resid = np.abs(W @ V - np.eye(n)).max()
    if resid > 1e-9:
        raise DegenerateEigenvaluesError(
            f"dual-basis residual {resid:.3e} exceeds 1e-9; eigenbasis is "
            f"too ill-conditioned to trust"
        )
    return SpectralFrame(lam=complex(lam), side=side, eigenvalues=nu, V=V, W=W, r=int(r))


def stable_projection(frame):
    """Spectral projection onto the frame's first r labeled directions."""
    return _group_projection(frame, slice(0, frame.r))


def _group_projection(frame, cols):
    V = frame.V[:, cols]
    W = frame.W[cols, :]
    return Projection(matrix=V @ W, rank=V.shape[1])


def _pmat(P):
    return P.matrix if isinstance(P, Projection) else np.asarray(P)


def kato_step(P_prev, P_next, Z_prev):
    """Transport a basis of Range(P_prev) to Range(P_next) by the normalized
    Kato propagator

        [P1 P0 + (I - P1)(I - P0)] [I - (P1 - P0)^2]^(-1/2),

    which agrees with analytic transport to second order in the step. The
    projections must satisfy ||P1 - P0|| < 1; callers bisect at 0.5."""
    P0, P1 = _pmat(P_prev), _pmat(P_next)
    Z = np.asarray(Z_prev, dtype=complex)
    dP = P1 - P0
    gap = np.linalg.norm(dP, 2)
    if gap >= 1.0:
        raise KatoStepError(f"projection moved by {gap:.3f} >= 1 in one step")
    n = P0.shape[0]
    eye = np.eye(n)
    U = P1 @ P0 + (eye - P1) @ (eye - P0)
    S = scipy.linalg.sqrtm(eye - dP @ dP)
    try:
        Z_next = U @ np.linalg.solve(S, Z)
    except np.linalg.LinAlgError as exc:
        raise KatoStepError(f"transport propagator is singular: {exc}") from exc
    sv = np.linalg.svd(Z_next, compute_uv=False)
    if sv.size and (sv[-1] == 0.0 or sv[-1] < 1e-12 * sv[0]):
        raise KatoStepError("transported basis lost rank")
    return Z_next


@dataclass(frozen=True)
class AnalyticBasisTrack:
    """Kato-transported bases recorded at each contour point."""

    contour_points: np.ndarray
    bases: list
    side: str
    frames: list


def _tracked_cols(frame, side):
    return slice(0, frame.r) if side == PLUS else slice(frame.r, frame.n)


def transport_basis(Ainf_fn, frame_a, Z_a, lam_b, side=PLUS, mode=SORT,
                    degeneracy_tol=1e-8, max_depth=48):
    """One transport edge: carry (frame_a, Z_a) to lam_b.

    Returns (frame_b, Z_b). Steps where the tracked projection moves by
    >= 0.5 are bisected along the straight segment, so a single call may
    cover an arbitrarily long edge as long as the family stays separated.
    """
    r = frame_a.r

    def proj(frame):
        return _group_projection(frame, _tracked_cols(frame, side))

    def advance(frame_x, P_x, Z, lam_y, depth):
        prev = frame_x if mode == TRACK else None
        frame_y = frame_at(Ainf_fn(lam_y), lam_y, r, prev=prev, mode=mode,
                           side=side, degeneracy_tol=degeneracy_tol)
        P_y = proj(frame_y)
        if np.linalg.norm(P_y.matrix - P_x.matrix, 2) >= 0.5:
            if depth >= max_depth:
                raise KatoStepError(
                    f"projection keeps jumping near lambda = {lam_y:.6g} "
                    f"after {depth} bisections"
                )
            lam_mid = (frame_x.lam + lam_y) / 2.0
            frame_m, P_m, Z = advance(frame_x, P_x, Z, lam_mid, depth + 1)
            return advance(frame_m, P_m, Z, lam_y, depth + 1)
        return frame_y, P_y, kato_step(P_x, P_y, Z)

    frame_b, _, Z_b = advance(frame_a, proj(frame_a), np.asarray(Z_a, dtype=complex),
                              complex(lam_b), 0)
    return frame_b, Z_b


def kato_basis_along_contour(Ainf_fn, contour, r, side=PLUS, mode=SORT,
                             degeneracy_tol=1e-8, max_depth=48):
    """Transport an eigenspace basis along a contour of lambda values.

    Ainf_fn maps lambda to the limiting matrix. side="plus" tracks the first
    r labels (decaying space), side="minus" the complementary n - r labels
    (growing space). Steps where the projection moves by >= 0.5 are bisected
    automatically; bases are recorded only at the requested points. For a
    closed contour pass the first point again at the end: the discrepancy
    between the final and initial bases then measures the transport error.
    """
    pts = np.asarray(contour, dtype=complex)
    if pts.ndim != 1 or pts.size < 2:
        raise InvalidArgumentError("contour must contain at least two points")
    f0 = frame_at(Ainf_fn(pts[0]), pts[0], r, mode=SORT, side=side,
                  degeneracy_tol=degeneracy_tol)
    Z = f0.V[:, _tracked_cols(f0, side)].copy()
    bases, frames = [Z], [f0]
    cur_frame = f0
    for lam in pts[1:]:
        cur_frame, Z = transport_basis(Ainf_fn, cur_frame, Z, lam, side=side,
                                       mode=mode, degeneracy_tol=degeneracy_tol,
                                       max_depth=max_depth)
        bases.append(Z)
        frames.append(cur_frame)
    return AnalyticBasisTrack(contour_points=pts, bases=bases, side=side,
                              frames=frames)
