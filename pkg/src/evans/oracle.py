"""Brute-force validators, independent of the collocation pipeline.

Two cross-checks live here: a shooting Wronskian (adaptive high-order
integration of the decaying directions toward x = 0, determinant there) and
a dense finite-difference eigensolver for operators available in
second-order form.  The Wronskian discards scale factors during
renormalization, so only its zero set and winding are comparable with the
main determinant; magnitudes are not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import InvalidArgumentError, StiffIntegrationError
from .frames import MINUS, PLUS, frame_at
from .systems import EvansSystem, _sech

__all__ = [
    "SecondOrderOperator",
    "ShootingConfig",
    "fd_eigs",
    "nagumo_coupled_operator",
    "nagumo_operator",
    "shooting_wronskian",
    "zero_potential_operator",
]

_CHUNKS = 32


@dataclass(frozen=True)
class ShootingConfig:
    """Integration controls; L=None takes the system default.

    The default rescale_threshold of 1 renormalizes the solution set after
    every integration chunk, which keeps magnitudes comparable across
    different lam (the growth factors that differ wildly with lam are the
    discarded scales).  A very large threshold yields the raw determinant.
    """

    L: float | None = None
    rk_tolerance: float = 1e-12
    rescale_threshold: float = 1.0

    def __post_init__(self):
        if self.rk_tolerance <= 0.0 or self.rescale_threshold <= 0.0:
            raise InvalidArgumentError("shooting tolerances must be positive")
        if self.L is not None and self.L <= 0.0:
            raise InvalidArgumentError("shooting half-length must be positive")


def _integrate_set(A_fn, lam, Y0, x_from, x_to, cfg):
    """Matrix solution set of Y' = A(x, lam) Y, renormalized when large.

    Whole-set rescales by the largest column norm keep relative column
    scales; the discarded factors are positive reals, so the result is the
    true solution set up to one positive scalar.
    """
    n, k = Y0.shape

    def rhs(x, y):
        return (np.asarray(A_fn(x, lam), dtype=complex) @ y.reshape(n, k)).ravel()

    y = Y0.astype(complex).ravel()
    breaks = np.linspace(x_from, x_to, _CHUNKS + 1)
    for a, b in zip(breaks[:-1], breaks[1:]):
        sol = solve_ivp(rhs, (a, b), y, method="DOP853",
                        rtol=cfg.rk_tolerance, atol=cfg.rk_tolerance)
        if not sol.success:
            raise StiffIntegrationError(
                f"integrator failed on [{a:g}, {b:g}]: {sol.message}")
        y = sol.y[:, -1]
        norm = np.linalg.norm(y.reshape(n, k), axis=0).max()
        if not np.isfinite(norm):
            raise StiffIntegrationError("solution set overflowed between rescales")
        if norm > cfg.rescale_threshold:
            y = y / norm
    return y.reshape(n, k)


def shooting_wronskian(system: EvansSystem, lam: complex,
                       cfg: ShootingConfig | None = None) -> complex:
    """Determinant at x = 0 of the two shot solution sets.

    r columns start on the decaying eigenvectors at x = +L and run backward;
    n - r start on the growing eigenvectors at x = -L and run forward.  The
    value is meaningful up to a positive real factor only.  Requires a
    hyperbolic splitting (lam off the essential spectrum) and small n: with
    no orthogonalization the columns collapse onto the dominant direction as
    n grows.
    """
    if cfg is None:
        cfg = ShootingConfig()
    n, r = system.n, system.r
    if n > 6:
        raise InvalidArgumentError(
            f"shooting oracle is limited to n <= 6 (got n={n}); "
            "mode collapse dominates beyond that")
    L = system.default_L if cfg.L is None else cfg.L

    fp = frame_at(system.Ainf_fn(lam, PLUS), lam, r, side=PLUS)
    fm = frame_at(system.Ainf_fn(lam, MINUS), lam, r, side=MINUS)
    scale = max(1.0, float(np.abs(fp.eigenvalues).max()),
                float(np.abs(fm.eigenvalues).max()))
    gap = 1e-12 * scale
    if (fp.eigenvalues[:r].real >= -gap).any() or \
       (fp.eigenvalues[r:].real <= gap).any() or \
       (fm.eigenvalues[:r].real >= -gap).any() or \
       (fm.eigenvalues[r:].real <= gap).any():
        raise InvalidArgumentError(
            "no hyperbolic splitting at this point (essential spectrum)")

    Yp = _integrate_set(system.A_fn, lam, fp.V[:, :r], L, 0.0, cfg)
    Ym = _integrate_set(system.A_fn, lam, fm.V[:, r:], -L, 0.0, cfg)
    return complex(np.linalg.det(np.column_stack([Ym, Yp])))


# --------------------------------------------------------- finite differences


@dataclass(frozen=True)
class SecondOrderOperator:
    """lam v = v'' + potential(x) v + coupling v on k components.

    potential is scalar and shared across components; coupling is a constant
    k x k matrix (diagonal entries carry any constant offset).
    """

    components: int
    potential: Callable[[float], float]
    coupling: np.ndarray

    def __post_init__(self):
        C = np.asarray(self.coupling, dtype=float)
        if C.shape != (self.components, self.components):
            raise InvalidArgumentError(
                f"coupling must be {self.components} x {self.components}")
        object.__setattr__(self, "coupling", C)


def nagumo_operator() -> SecondOrderOperator:
    """Scalar cubic front linearization: v'' + 6 sech^2(x) v - v."""
    return SecondOrderOperator(1, lambda x: 6.0 * _sech(x) ** 2,
                               np.array([[-1.0]]))


def nagumo_coupled_operator(a: float = 0.1, b: float = -1.0) -> SecondOrderOperator:
    """Two cubic-front components tied by a constant skew coupling."""
    return SecondOrderOperator(2, lambda x: 6.0 * _sech(x) ** 2,
                               np.array([[-1.0, a], [b, -1.0]]))


def zero_potential_operator() -> SecondOrderOperator:
    """v'' - v: nothing but essential spectrum, all of it left of -1."""
    return SecondOrderOperator(1, lambda x: 0.0, np.array([[-1.0]]))


def fd_eigs(op: SecondOrderOperator, ell: float, gridpoints: int) -> np.ndarray:
    """Eigenvalues of the dense 3-point discretization on [-ell, ell].

    Dirichlet truncation at both ends; returned sorted by real part,
    descending.
    """
    if ell <= 0.0:
        raise InvalidArgumentError("truncation half-length must be positive")
    if gridpoints < 3:
        raise InvalidArgumentError("need at least 3 interior grid points")
    m, k = gridpoints, op.components
    h = 2.0 * ell / (m + 1)
    x = -ell + h * np.arange(1, m + 1)
    lap = (np.diag(np.full(m, -2.0)) + np.diag(np.ones(m - 1), 1)
           + np.diag(np.ones(m - 1), -1)) / h ** 2
    q = np.array([op.potential(xi) for xi in x], dtype=float)
    M = np.kron(lap + np.diag(q), np.eye(k)) + np.kron(np.eye(m), op.coupling)
    w = np.linalg.eigvals(M)
    return w[np.argsort(-w.real, kind="stable")]
