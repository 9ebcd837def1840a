"""Dense linear algebra and Chebyshev collocation grids.

Thin, validated wrappers around LAPACK-backed numpy routines: every result
that downstream code trusts blindly (eigenpairs, determinants, least-squares
solutions) is checked here, and failures surface as typed errors instead of
garbage values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EigenConvergenceError, InvalidArgumentError, RankDeficientError

__all__ = [
    "EigenDecomposition",
    "CollocationGrid",
    "eig_dense",
    "det_lu",
    "lstsq",
    "cheb_grid",
]


def _as_square(M, name="M"):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgumentError(f"{name} must be square, got shape {M.shape}")
    if not np.all(np.isfinite(M.real)) or not np.all(np.isfinite(M.imag)):
        raise InvalidArgumentError(f"{name} contains non-finite entries")
    return M


@dataclass(frozen=True)
class EigenDecomposition:
    """Right eigendecomposition with unit-norm eigenvector columns."""

    eigenvalues: np.ndarray   # (n,) complex
    right_vectors: np.ndarray  # (n, n) complex, column j pairs with eigenvalue j


def eig_dense(M, residual_tol=1e-9):
    """Eigenvalues and unit-norm right eigenvectors of a dense complex matrix.

    Residuals ||M v - nu v|| are checked against residual_tol * ||M||; a
    violation raises EigenConvergenceError carrying the worst residual.
    """
    M = _as_square(M)
    try:
        nu, V = np.linalg.eig(M)
    except np.linalg.LinAlgError as exc:
        raise EigenConvergenceError(f"eigendecomposition failed: {exc}") from exc
    V = V / np.linalg.norm(V, axis=0)
    scale = max(np.linalg.norm(M, 2), 1.0)
    resid = np.linalg.norm(M @ V - V * nu, axis=0)
    worst = float(resid.max())
    if worst > residual_tol * scale:
        raise EigenConvergenceError(
            f"eigenpair residual {worst:.3e} exceeds {residual_tol:.1e} * ||M||",
            residual=worst,
        )
    return EigenDecomposition(eigenvalues=nu, right_vectors=V)


def _slogdet(M):
    """(log10 magnitude, phase) of det M; (-inf, 0.0) for a singular matrix."""
    sign, logabs = np.linalg.slogdet(M)
    if sign == 0:
        return -np.inf, 0.0
    return logabs / np.log(10.0), float(np.angle(sign))


def det_lu(M):
    """Determinant via LU with partial pivoting.

    Magnitude and phase are accounted separately (log scale) and materialized
    to a complex value here, so moderately scaled products do not overflow.
    """
    M = _as_square(M)
    log10_mag, phase = _slogdet(M)
    if log10_mag == -np.inf:
        return 0.0 + 0.0j
    return 10.0 ** log10_mag * np.exp(1j * phase)


def lstsq(A, B, rcond=1e-10):
    """Least-squares solve min ||A X - B|| via SVD.

    Raises RankDeficientError naming the collapsed singular direction when
    the smallest singular value is below rcond times the largest.
    """
    A = np.asarray(A, dtype=complex)
    B = np.asarray(B, dtype=complex)
    if A.ndim != 2:
        raise InvalidArgumentError(f"A must be 2-d, got shape {A.shape}")
    if B.shape[0] != A.shape[0]:
        raise InvalidArgumentError(
            f"row mismatch: A has {A.shape[0]} rows, B has {B.shape[0]}"
        )
    U, s, Vh = np.linalg.svd(A, full_matrices=False)
    if s[0] == 0.0:
        raise RankDeficientError("A is identically zero", index=0,
                                 direction=Vh[0].conj())
    bad = np.nonzero(s <= rcond * s[0])[0]
    if bad.size:
        k = int(bad[0])
        raise RankDeficientError(
            f"singular value {k} is {s[k]:.3e} <= {rcond:.1e} * {s[0]:.3e}; "
            f"offending right singular direction stored on the error",
            index=k,
            direction=Vh[k].conj(),
        )
    return Vh.conj().T @ ((U.conj().T @ B).T / s).T


@dataclass(frozen=True)
class CollocationGrid:
    """Chebyshev extrema grid on [x0, x1] with its differentiation matrix."""

    degree: int              # polynomial degree N; N+1 nodes
    nodes: np.ndarray        # (N+1,) ascending, endpoints included
    diff_matrix: np.ndarray  # (N+1, N+1) acting on node values


def cheb_grid(N, x0, x1):
    """Chebyshev extrema nodes mapped to [x0, x1] plus the differentiation
    matrix, with the diagonal set to negative row sums so constants are
    annihilated exactly."""
    if N < 2:
        raise InvalidArgumentError(f"need polynomial degree >= 2, got N={N}")
    if not (np.isfinite(x0) and np.isfinite(x1)) or x1 <= x0:
        raise InvalidArgumentError(f"bad interval [{x0}, {x1}]")
    k = np.arange(N + 1)
    t = np.cos(np.pi * k / N)          # 1 .. -1, descending
    c = np.hstack(([2.0], np.ones(N - 1), [2.0])) * (-1.0) ** k
    dT = t[:, None] - t[None, :]
    D = np.outer(c, 1.0 / c) / (dT + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    # reverse to ascending nodes and map the reference interval affinely
    D = D[::-1, ::-1] * (2.0 / (x1 - x0))
    nodes = x0 + (t[::-1] + 1.0) * (x1 - x0) / 2.0
    return CollocationGrid(degree=int(N), nodes=nodes, diff_matrix=D)
