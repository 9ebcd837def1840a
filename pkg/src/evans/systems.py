"""Benchmark travelling-wave systems in first-order form U' = A(x, lambda) U.

Each system carries its coefficient matrix A(x, lambda), the limiting
matrices at x -> +-infinity, and the dimension r of the decaying eigenspace
at +infinity (valid to the right of the essential spectrum). The left
half-line is always handled through reflect_left, which flips the problem
onto [0, L] with the complementary decaying dimension.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import InvalidArgumentError, ProfileError

__all__ = [
    "PLUS",
    "MINUS",
    "EvansSystem",
    "SampledProfile",
    "load_profile",
    "nagumo_scalar",
    "nagumo_coupled",
    "kdv",
    "swift_hohenberg",
    "fourier_diff_operator",
    "reflect_left",
    "registry",
]

PLUS = "plus"
MINUS = "minus"


def _sech(z):
    # 1/cosh without overflow for large |z|
    az = np.abs(z)
    e = np.exp(-az)
    return 2.0 * e / (1.0 + e * e)


@dataclass(frozen=True)
class EvansSystem:
    """First-order spectral problem on the line, truncated to [0, L]."""

    n: int                                   # system dimension
    r: int                                   # decaying directions at +inf
    A_fn: Callable[[float, complex], np.ndarray]
    Ainf_fn: Callable[[complex, str], np.ndarray]
    default_L: float
    default_N: int
    label: str


def reflect_left(system: EvansSystem) -> EvansSystem:
    """Fold the left half-line onto [0, L]: x -> -x sends U' = A U into
    U' = -A(-x) U, and swaps the roles of the two spatial limits. Applying
    this twice returns the original system exactly."""
    A, Ainf = system.A_fn, system.Ainf_fn

    def A_ref(x, lam):
        return -A(-x, lam)

    def Ainf_ref(lam, side=PLUS):
        return -Ainf(lam, MINUS if side == PLUS else PLUS)

    if system.label.endswith("/reflected"):
        label = system.label[: -len("/reflected")]
    else:
        label = system.label + "/reflected"
    return EvansSystem(
        n=system.n,
        r=system.n - system.r,
        A_fn=A_ref,
        Ainf_fn=Ainf_ref,
        default_L=system.default_L,
        default_N=system.default_N,
        label=label,
    )


# ------------------------------------------------------------- Nagumo


def nagumo_scalar() -> EvansSystem:
    """Scalar bistable reaction-diffusion pulse u* = sqrt(2) sech(x).

    Point spectrum sits at 3 (amplitude mode) and 0 (translation);
    the essential spectrum is the half-line lambda <= -1.
    """

    def A_fn(x, lam):
        u2 = 2.0 * _sech(x) ** 2
        return np.array([[0.0, 1.0], [lam + 1.0 - 3.0 * u2, 0.0]], dtype=complex)

    def Ainf_fn(lam, side=PLUS):
        return np.array([[0.0, 1.0], [lam + 1.0, 0.0]], dtype=complex)

    return EvansSystem(n=2, r=1, A_fn=A_fn, Ainf_fn=Ainf_fn,
                       default_L=10.0, default_N=30, label="nagumo")


def nagumo_coupled(a=0.1, b=-1.0) -> EvansSystem:
    """Two bistable pulses with off-diagonal linear coupling (a, b).

    For ab < 0 the point spectrum of the scalar problem splits into complex
    pairs lambda_0 +- sqrt(ab); with the defaults that is 3 +- i/sqrt(10)
    and +- i/sqrt(10).
    """

    def A_fn(x, lam):
        q = lam + 1.0 - 6.0 * _sech(x) ** 2
        return np.array(
            [
                [0.0, 1.0, 0.0, 0.0],
                [q, 0.0, -a, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [-b, 0.0, q, 0.0],
            ],
            dtype=complex,
        )

    def Ainf_fn(lam, side=PLUS):
        q = lam + 1.0
        return np.array(
            [
                [0.0, 1.0, 0.0, 0.0],
                [q, 0.0, -a, 0.0],
                [0.0, 0.0, 0.0, 1.0],
                [-b, 0.0, q, 0.0],
            ],
            dtype=complex,
        )

    return EvansSystem(n=4, r=2, A_fn=A_fn, Ainf_fn=Ainf_fn,
                       default_L=10.0, default_N=30, label="nagumo-coupled")


# ---------------------------------------------------------------- KdV


def kdv(p=4.0, c=5.0) -> EvansSystem:
    """Generalized KdV solitary wave at speed c with nonlinearity u^p u_x.

    The essential spectrum is the imaginary axis; the Evans function is
    continued across it by eigenvalue tracking (mode="track"). At p = 4 the
    wave is marginally stable: a simple root crosses the origin, colliding
    with the double translation/scaling root there.
    """
    if p <= 0 or c <= 0:
        raise InvalidArgumentError(f"need p > 0 and c > 0, got p={p}, c={c}")
    amp = (c * (p + 1.0) * (p + 2.0) / 2.0) ** (1.0 / p)
    alpha = math.sqrt(c) * p / 2.0
    sqc = math.sqrt(c)

    def profile(x):
        return amp * _sech(alpha * x) ** (2.0 / p)

    def A_fn(x, lam):
        u = profile(x)
        du = -sqc * u * np.tanh(alpha * x)
        return np.array(
            [
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [-lam - p * u ** (p - 1.0) * du, c - u**p, 0.0],
            ],
            dtype=complex,
        )

    def Ainf_fn(lam, side=PLUS):
        return np.array(
            [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [-lam, c, 0.0]], dtype=complex
        )

    return EvansSystem(n=3, r=1, A_fn=A_fn, Ainf_fn=Ainf_fn,
                       default_L=30.0, default_N=60, label="kdv")


# ----------------------------------------------- Swift-Hohenberg rolls


def fourier_diff_operator(modes, power):
    """Dense matrix applying (1 + d^2/dy^2)^power on a 2*pi-periodic grid of
    `modes` points, exact on resolved trigonometric polynomials."""
    if modes < 4 or modes % 2:
        raise InvalidArgumentError(f"modes must be even and >= 4, got {modes}")
    if power not in (1, 2):
        raise InvalidArgumentError(f"power must be 1 or 2, got {power}")
    k = np.fft.fftfreq(modes, d=1.0 / modes)
    sym = (1.0 - k**2) ** power
    op = np.fft.ifft(sym[:, None] * np.fft.fft(np.eye(modes), axis=0), axis=0)
    return np.ascontiguousarray(op.real)


def swift_hohenberg(mu=0.675, nu=2.0, modes=8, profile=None) -> EvansSystem:
    """Planar Swift-Hohenberg rolls, Fourier-discretized in the transverse
    direction: n = 4 * modes first-order system in x.

    `profile` samples the roll u*(x, y_j) on the transverse grid (one
    component per y point); None builds the zero-profile constant-coefficient
    system used as a structural smoke test.
    """
    m = int(modes)
    D1 = fourier_diff_operator(m, 2)
    D2 = fourier_diff_operator(m, 1)
    I = np.eye(m)
    Z = np.zeros((m, m))
    if profile is not None and profile.values.shape[0] != m:
        raise ProfileError(
            f"profile has {profile.values.shape[0]} components, need {m} "
            f"transverse samples"
        )

    def A_fn(x, lam):
        if profile is None:
            w = np.zeros(m)
        else:
            u = profile.eval(x)
            w = 3.0 * nu * u**2 - 5.0 * u**4
        L1 = -D1 - (lam + mu) * I + np.diag(w)
        L2 = -2.0 * D2
        return np.block(
            [
                [Z, I, Z, Z],
                [Z, Z, I, Z],
                [Z, Z, Z, I],
                [L1, Z, L2, Z],
            ]
        ).astype(complex)

    def Ainf_fn(lam, side=PLUS):
        L1 = -D1 - (lam + mu) * I
        L2 = -2.0 * D2
        return np.block(
            [
                [Z, I, Z, Z],
                [Z, Z, I, Z],
                [Z, Z, Z, I],
                [L1, Z, L2, Z],
            ]
        ).astype(complex)

    return EvansSystem(n=4 * m, r=2 * m, A_fn=A_fn, Ainf_fn=Ainf_fn,
                       default_L=50.0, default_N=30, label="swift-hohenberg")


# ------------------------------------------------------------- profiles


def _fh_weights(m, d):
    """Floater-Hormann barycentric weights on a uniform grid of m points,
    blending degree d. Integer-valued up to a global sign."""
    n = m - 1
    w = np.zeros(m)
    for i in range(m):
        s = 0.0
        for j in range(max(0, i - d), min(i, n - d) + 1):
            s += math.comb(d, i - j)
        w[i] = (-1.0) ** (i - d) * s
    return w


@dataclass
class SampledProfile:
    """Wave profile sampled on a uniform grid, with a rational barycentric
    interpolant (Floater-Hormann) for off-grid evaluation."""

    x_grid: np.ndarray          # (m,) uniform, strictly increasing
    values: np.ndarray          # (k, m) component samples
    description: str = ""
    blend_degree: int = 8
    _weights: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        self.x_grid = np.asarray(self.x_grid, dtype=float)
        self.values = np.atleast_2d(np.asarray(self.values, dtype=float))
        m = self.x_grid.size
        self.blend_degree = min(self.blend_degree, m - 1)
        self._weights = _fh_weights(m, self.blend_degree)

    def _node_index(self, x):
        h = self.x_grid[1] - self.x_grid[0]
        i = int(round((x - self.x_grid[0]) / h))
        if 0 <= i < self.x_grid.size and abs(x - self.x_grid[i]) <= 1e-12 * max(abs(x), 1.0):
            return i
        return None

    def eval(self, x):
        """Interpolated component values at scalar x, shape (k,)."""
        i = self._node_index(x)
        if i is not None:
            return self.values[:, i].copy()
        dx = x - self.x_grid
        q = self._weights / dx
        return (self.values @ q) / q.sum()

    def deriv(self, x):
        """Derivative of the interpolant at scalar x, shape (k,)."""
        i = self._node_index(x)
        w, xg, f = self._weights, self.x_grid, self.values
        if i is not None:
            dx = xg[i] - np.delete(xg, i)
            coef = np.delete(w, i) / (w[i] * dx)
            df = np.delete(f, i, axis=1) - f[:, i][:, None]
            return df @ coef
        dx = x - xg
        q = w / dx
        q2 = w / dx**2
        Nv = f @ q
        Dv = q.sum()
        Np = -(f @ q2)
        Dp = -q2.sum()
        return (Np * Dv - Nv * Dp) / Dv**2

    def save(self, path):
        payload = {
            "grid": self.x_grid.tolist(),
            "components": self.values.tolist(),
        }
        if self.description:
            payload["description"] = self.description
        with open(path, "w") as fh:
            json.dump(payload, fh)


def load_profile(path) -> SampledProfile:
    """Read a JSON profile {grid, components, y_modes?, description?} with
    full validation; any defect raises ProfileError naming the field."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ProfileError(f"cannot read profile {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ProfileError("profile must be a JSON object")
    for key in ("grid", "components"):
        if key not in raw:
            raise ProfileError(f"profile is missing required field '{key}'")
    grid = np.asarray(raw["grid"], dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ProfileError("field 'grid' must be a 1-d list with >= 2 points")
    if not np.all(np.isfinite(grid)):
        raise ProfileError("field 'grid' contains non-finite values")
    dg = np.diff(grid)
    if np.any(dg <= 0):
        raise ProfileError("field 'grid' must be strictly increasing")
    h = dg[0]
    if np.abs(dg - h).max() > 1e-8 * abs(h):
        raise ProfileError("field 'grid' must be uniformly spaced")
    comps = raw["components"]
    if not isinstance(comps, list) or not comps:
        raise ProfileError("field 'components' must be a non-empty list of rows")
    values = np.asarray(comps, dtype=float)
    if values.ndim != 2 or values.shape[1] != grid.size:
        raise ProfileError(
            f"field 'components' rows must each have {grid.size} samples"
        )
    if not np.all(np.isfinite(values)):
        raise ProfileError("field 'components' contains non-finite values")
    y_modes = raw.get("y_modes")
    if y_modes is not None and int(y_modes) != values.shape[0]:
        raise ProfileError(
            f"field 'y_modes' = {y_modes} disagrees with "
            f"{values.shape[0]} component rows"
        )
    return SampledProfile(
        x_grid=grid, values=values, description=raw.get("description", "")
    )


def registry():
    """Named system factories for the command line."""
    return {
        "nagumo": nagumo_scalar,
        "nagumo-coupled": nagumo_coupled,
        "kdv": kdv,
        "swift-hohenberg": swift_hohenberg,
    }
