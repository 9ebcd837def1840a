"""Collocation solves for the exponentially weighted boundary modes.

Each decaying direction at the right end is obtained from a shifted linear
system V' = (A(x, lam) - nu_j I) V on [0, L].  The shift makes the wanted
mode neutral, so nothing in the solve grows like exp(nu L).  Boundary rows
pin the mode at x = L through rows of the inverse eigenvector matrix and
force orthogonality against the previously computed modes at x = 0; solving
in label order makes the end-value matrix unit upper triangular in
eigenvector coordinates, which is what keeps the downstream determinant
correction independent of eigenvector scalings.

Left-end modes are not solved directly: reflect the system (systems.
reflect_left) and run the same machinery on the reflected right side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BvpAccuracyError, BvpSolveError, InvalidArgumentError
from .frames import PLUS, SpectralFrame
from .linalg import CollocationGrid

__all__ = ["BvpSolution", "ModeBundle", "collocation_base", "solve_all_modes"]


@dataclass(frozen=True)
class BvpSolution:
    """One shifted mode on the collocation grid; row i of values is V(x_i)."""

    mode_index: int
    shift: complex
    grid: CollocationGrid
    values: np.ndarray
    ode_residual: float
    bc_residual: float

    @property
    def at_start(self) -> np.ndarray:
        return self.values[0]

    @property
    def at_end(self) -> np.ndarray:
        return self.values[-1]


@dataclass(frozen=True)
class ModeBundle:
    """All decaying right-end modes of one frame, in label order."""

    lam: complex
    solutions: tuple[BvpSolution, ...]

    @property
    def start_matrix(self) -> np.ndarray:
        """n x r matrix whose columns are the mode values at x = 0."""
        return np.column_stack([s.values[0] for s in self.solutions])

    @property
    def end_matrix(self) -> np.ndarray:
        """n x r matrix whose columns are the mode values at x = L."""
        return np.column_stack([s.values[-1] for s in self.solutions])

    @property
    def worst_ode_residual(self) -> float:
        return max(s.ode_residual for s in self.solutions)

    @property
    def worst_bc_residual(self) -> float:
        return max(s.bc_residual for s in self.solutions)


def collocation_base(A_fn, lam, grid: CollocationGrid, n: int) -> np.ndarray:
    """Discretize d/dx - A(x, lam) on the grid: kron(D, I) - blockdiag(A).

    The per-mode spectral shift is added by the caller, so one base matrix
    serves every mode at this lam.
    """
    nodes = grid.nodes
    first = np.asarray(A_fn(nodes[0], lam), dtype=complex)
    if first.shape != (n, n):
        raise InvalidArgumentError(
            f"coefficient matrix has shape {first.shape}, expected {(n, n)}")
    M = np.kron(grid.diff_matrix, np.eye(n)).astype(complex)
    M[:n, :n] -= first
    for i in range(1, nodes.size):
        M[i * n:(i + 1) * n, i * n:(i + 1) * n] -= np.asarray(
            A_fn(nodes[i], lam), dtype=complex)
    return M


def _solve_one(base, grid, n, j, shift, earlier_starts, W, residual_tol):
    npts = grid.nodes.size
    size = npts * n
    M = base + shift * np.eye(size)
    rhs = np.zeros(size, dtype=complex)
    kept = np.ones(size, dtype=bool)

    # orthogonality against the already-solved modes, imposed at the left node
    for k in range(j):
        row = np.conj(earlier_starts[k])
        nrm = np.linalg.norm(row)
        if nrm == 0.0:
            raise BvpSolveError(f"mode {k} vanishes at the left node")
        M[k, :] = 0.0
        M[k, :n] = row / nrm
        rhs[k] = 0.0
        kept[k] = False

    # selection rows at the right node: dual rows j..n-1, unit weight on j.
    # Scaling row and right-hand side together leaves the constraint intact.
    for k in range(j, n):
        nrm = np.linalg.norm(W[k])
        tgt = size - n + k
        M[tgt, :] = 0.0
        M[tgt, size - n:] = W[k] / nrm
        rhs[tgt] = (1.0 if k == j else 0.0) / nrm
        kept[tgt] = False

    try:
        v = np.linalg.solve(M, rhs)
    except np.linalg.LinAlgError as exc:
        raise BvpSolveError(f"collocation solve failed for mode {j}: {exc}") from exc
    if not np.all(np.isfinite(v)):
        raise BvpSolveError(f"collocation solve for mode {j} returned non-finite values")

    values = v.reshape(npts, n)
    scale = 1.0 + np.abs(values).max()

    # base was never mutated, so the full shifted operator is base + shift*I;
    # the kept rows were solved exactly, the replaced ones measure how well
    # the discrete solution honors the differential equation there
    resid = base @ v + shift * v
    ode_residual = float(np.abs(resid[kept]).max() / scale)

    bc = [np.vdot(earlier_starts[k], values[0]) for k in range(j)]
    bc += [W[k] @ values[-1] - (1.0 if k == j else 0.0) for k in range(j, n)]
    bc_residual = float(max(abs(b) for b in bc) / scale)
    if bc_residual > residual_tol:
        raise BvpAccuracyError(
            f"mode {j} boundary residual {bc_residual:.3e} exceeds {residual_tol:.1e}")

    return BvpSolution(j, shift, grid, values, ode_residual, bc_residual)


def solve_all_modes(A_fn, frame: SpectralFrame, grid: CollocationGrid, *,
                    residual_tol: float = 1e-8) -> ModeBundle:
    """Solve the r decaying right-end modes of `frame` in label order.

    A_fn(x, lam) -> (n, n); the frame supplies the shifts (its first r
    eigenvalues), the end-selection rows (its dual rows), and lam.
    """
    if frame.side != PLUS:
        raise InvalidArgumentError(
            "mode solves run on right-limit frames; reflect the system for the left side")
    if frame.r < 1:
        raise InvalidArgumentError("frame has no decaying directions to solve")
    n = frame.n
    base = collocation_base(A_fn, frame.lam, grid, n)
    solutions: list[BvpSolution] = []
    starts: list[np.ndarray] = []
    for j in range(frame.r):
        sol = _solve_one(base, grid, n, j, frame.eigenvalues[j], starts,
                         frame.W, residual_tol)
        solutions.append(sol)
        starts.append(sol.values[0])
    return ModeBundle(frame.lam, tuple(solutions))
