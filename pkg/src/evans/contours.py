"""Adaptive contour evaluation, winding numbers, and root localization.

The two-pass layout follows the method's structure: pass 1 walks the contour
once, continuing frames and transporting the analytic bases (order matters);
pass 2 evaluates the Evans value at each prepared point (embarrassingly
parallel, merged back in contour-parameter order). Refinement bisects any
segment whose image step is too large relative to the neighboring magnitudes,
re-running pass 1 locally from the nearest already-prepared point.
"""

from __future__ import annotations

import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (
    InsufficientRefinementError,
    InvalidArgumentError,
    RefinementBudgetError,
    RootOnContourError,
)
from .evaluation import EvansConfig, EvansSample, evans_at
from .frames import PLUS, SORT, TRACK, frame_at, transport_basis
from .systems import EvansSystem, reflect_left

__all__ = [
    "ContourSpec",
    "WindingReport",
    "RootBox",
    "circle",
    "rectangle",
    "winding_number",
    "contour_eval",
    "root_localize",
]

_RATIO_FLOOR = 1e-300


@dataclass(frozen=True)
class ContourSpec:
    """A closed curve in the spectral plane, parameterized by s in [0, 1).

    kind="circle" uses center/radius; kind="polyline" walks `vertices` in
    order (closing edge implied) with s proportional to arc length.
    """

    kind: str
    center: complex = 0j
    radius: float = 0.0
    initial_points: int = 32
    refinement_ratio: float = 0.1
    vertices: tuple = ()

    def __post_init__(self):
        if self.kind not in ("circle", "polyline"):
            raise InvalidArgumentError(f"kind must be 'circle' or 'polyline', got {self.kind!r}")
        if self.initial_points < 4:
            raise InvalidArgumentError("need at least 4 initial points")
        if not 0.0 < self.refinement_ratio:
            raise InvalidArgumentError("refinement_ratio must be positive")
        if self.kind == "circle":
            if not self.radius > 0.0:
                raise InvalidArgumentError("circle radius must be positive")
        else:
            verts = tuple(complex(v) for v in self.vertices)
            if len(verts) < 3:
                raise InvalidArgumentError("polyline needs at least 3 vertices")
            object.__setattr__(self, "vertices", verts)
            lens = self._edge_lengths()
            if min(lens) <= 0.0:
                raise InvalidArgumentError("polyline has a zero-length edge")
            if _polyline_self_intersects(verts):
                raise InvalidArgumentError("polyline self-intersects")

    def _edge_lengths(self):
        v = self.vertices
        return [abs(v[(i + 1) % len(v)] - v[i]) for i in range(len(v))]

    def point(self, s: float) -> complex:
        """Map contour parameter s (mod 1) to a point in the plane."""
        s = s % 1.0
        if self.kind == "circle":
            return self.center + self.radius * cmath.exp(2j * math.pi * s)
        lens = self._edge_lengths()
        total = sum(lens)
        target = s * total
        acc = 0.0
        for i, ell in enumerate(lens):
            if target <= acc + ell or i == len(lens) - 1:
                t = (target - acc) / ell
                a = self.vertices[i]
                b = self.vertices[(i + 1) % len(self.vertices)]
                return a + t * (b - a)
            acc += ell
        raise AssertionError("unreachable")


def circle(center: complex, radius: float, initial_points: int = 32,
           refinement_ratio: float = 0.1) -> ContourSpec:
    return ContourSpec(kind="circle", center=complex(center), radius=float(radius),
                       initial_points=initial_points,
                       refinement_ratio=refinement_ratio)


def rectangle(re_lo: float, re_hi: float, im_lo: float, im_hi: float,
              initial_points: int = 32,
              refinement_ratio: float = 0.1) -> ContourSpec:
    if not (re_lo < re_hi and im_lo < im_hi):
        raise InvalidArgumentError("rectangle bounds must satisfy lo < hi")
    verts = (complex(re_lo, im_lo), complex(re_hi, im_lo),
             complex(re_hi, im_hi), complex(re_lo, im_hi))
    return ContourSpec(kind="polyline", vertices=verts,
                       center=complex((re_lo + re_hi) / 2, (im_lo + im_hi) / 2),
                       initial_points=initial_points,
                       refinement_ratio=refinement_ratio)


def _orient(a: complex, b: complex, c: complex) -> float:
    return (b.real - a.real) * (c.imag - a.imag) - (b.imag - a.imag) * (c.real - a.real)


def _segments_cross(a, b, c, d) -> bool:
    # proper crossing only; shared endpoints between adjacent edges are fine
    d1, d2 = _orient(c, d, a), _orient(c, d, b)
    d3, d4 = _orient(a, b, c), _orient(a, b, d)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def _polyline_self_intersects(verts) -> bool:
    m = len(verts)
    for i in range(m):
        a, b = verts[i], verts[(i + 1) % m]
        for j in range(i + 1, m):
            if j == i or (j + 1) % m == i or (i + 1) % m == j:
                continue
            c, d = verts[j], verts[(j + 1) % m]
            if _segments_cross(a, b, c, d):
                return True
    return False


def winding_number(values, closed: bool = True):
    """Net winding of a sampled image curve about the origin.

    Returns (winding, defect) where defect is the distance of the raw phase
    sum / 2pi from the returned integer. Exact zeros and antipodal steps are
    rejected: a step of pi is indistinguishable from an aliased root
    crossing, so the caller must refine first.
    """
    vals = np.asarray(values, dtype=complex).ravel()
    if vals.size < 2:
        raise InvalidArgumentError("need at least two samples")
    if np.any(vals == 0):
        idx = int(np.flatnonzero(vals == 0)[0])
        raise RootOnContourError(f"Evans value is exactly 0 at sample {idx}")
    pairs = zip(vals, np.roll(vals, -1)) if closed else zip(vals[:-1], vals[1:])
    total = 0.0
    for m, (a, b) in enumerate(pairs):
        step = cmath.phase(b / a)
        if abs(step) >= math.pi * (1.0 - 1e-12):
            raise InsufficientRefinementError(
                f"phase jump of {step:+.3f} rad (>= pi) between samples "
                f"{m} and {m + 1}; refine the contour"
            )
        total += step
    w = total / (2.0 * math.pi)
    return int(round(w)), abs(w - round(w))


@dataclass(frozen=True)
class WindingReport:
    """Result of one adaptive contour sweep."""

    winding: int
    samples: list            # EvansSample, ordered by contour parameter
    max_step_ratio: float
    defect: float = 0.0

    def __post_init__(self):
        if self.defect >= 0.05:
            raise InsufficientRefinementError(
                f"winding rounding defect {self.defect:.3f} >= 0.05"
            )


@dataclass
class _PointState:
    s: float
    lam: complex
    frame_p: object
    frame_m: object
    Z_p: np.ndarray
    Z_m: np.ndarray
    sample: EvansSample | None = None


class _ContourWalker:
    """Prepares frames/bases at contour parameters (pass 1 machinery)."""

    def __init__(self, system: EvansSystem, contour: ContourSpec,
                 config: EvansConfig):
        self.system = system
        self.contour = contour
        self.config = config
        self.reflected = reflect_left(system)
        self.Ainf_p = lambda lam: system.Ainf_fn(lam, PLUS)
        self.Ainf_m = lambda lam: self.reflected.Ainf_fn(lam, PLUS)

    def initial_state(self, s: float) -> _PointState:
        lam = self.contour.point(s)
        n, r = self.system.n, self.system.r
        fp = frame_at(self.Ainf_p(lam), lam, r,
                      degeneracy_tol=self.config.degeneracy_tol)
        fm = frame_at(self.Ainf_m(lam), lam, n - r,
                      degeneracy_tol=self.config.degeneracy_tol)
        return _PointState(s % 1.0, lam, fp, fm,
                           fp.V[:, :r].copy(), fm.V[:, :n - r].copy())

    def advance(self, state: _PointState, s_to: float) -> _PointState:
        """Continue frames and transport bases from `state` to parameter s_to
        along the contour, via config.transport_substeps intermediate chords.

        The Kato transport of the bases happens in BOTH label modes: an
        eigenvector recomputed from scratch carries an arbitrary phase, so a
        per-point basis would destroy the analyticity of the assembled value
        (and with it the winding count). mode only selects how the frame
        LABELS are assigned: re-sorted by real part, or continued from the
        previous frame (required across the essential spectrum)."""
        q = self.config.transport_substeps
        fp, Zp = state.frame_p, state.Z_p
        fm, Zm = state.frame_m, state.Z_m
        mode = TRACK if self.config.mode == "track" else SORT
        for k in range(1, q + 1):
            s_k = state.s + (s_to - state.s) * k / q
            lam_k = self.contour.point(s_k)
            fp, Zp = transport_basis(self.Ainf_p, fp, Zp, lam_k, side=PLUS,
                                     mode=mode,
                                     degeneracy_tol=self.config.degeneracy_tol)
            fm, Zm = transport_basis(self.Ainf_m, fm, Zm, lam_k, side=PLUS,
                                     mode=mode,
                                     degeneracy_tol=self.config.degeneracy_tol)
        return _PointState(s_to % 1.0, self.contour.point(s_to), fp, fm, Zp, Zm)


def _evaluate_states(system, states, config):
    """Pass 2: fill in .sample for every state lacking one. Pure per-point
    solves; executed concurrently when config.threads > 1 and merged back
    positionally, so the result is independent of completion order."""
    todo = [st for st in states if st.sample is None]
    if not todo:
        return

    def run(st):
        return evans_at(system, st.lam, (st.frame_p, st.frame_m),
                        (st.Z_p, st.Z_m), config)

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(run, todo))
    else:
        results = [run(st) for st in todo]
    for st, sample in zip(todo, results):
        sample.diagnostics["s"] = st.s
        st.sample = sample


def _step_ratios(states):
    """Relative image steps between consecutive samples, wrapping around."""
    vals = [st.sample.value for st in states]
    ratios = []
    for m in range(len(vals)):
        a, b = vals[m], vals[(m + 1) % len(vals)]
        denom = max(min(abs(a), abs(b)), _RATIO_FLOOR)
        ratios.append(abs(b - a) / denom)
    return ratios


def contour_eval(system: EvansSystem, contour: ContourSpec,
                 config: EvansConfig | None = None) -> WindingReport:
    """Adaptively sample the Evans function around a closed contour.

    Segments are bisected until every image step satisfies
    |dE| / min(|E_m|, |E_m+1|) <= contour.refinement_ratio; the winding
    number is then the accumulated principal phase change / 2pi.
    """
    if config is None:
        config = EvansConfig()
    walker = _ContourWalker(system, contour, config)

    M = contour.initial_points
    params = [j / M for j in range(M)]
    states = []
    prev = None
    for s in params:
        st = walker.initial_state(s) if prev is None else walker.advance(prev, s)
        states.append(st)
        prev = st
    _evaluate_states(system, states, config)

    while True:
        ratios = _step_ratios(states)
        bad = [m for m, rho in enumerate(ratios) if rho > contour.refinement_ratio]
        if not bad:
            break
        if len(states) + len(bad) > config.max_points:
            raise RefinementBudgetError(
                f"refinement needs more than {config.max_points} contour points; "
                "a root likely sits on or very near the contour"
            )
        inserts = []
        for m in bad:
            s_a = states[m].s
            s_b = states[(m + 1) % len(states)].s
            if (m + 1) % len(states) == 0:
                s_b += 1.0           # closing segment wraps past s = 1
            s_mid = (s_a + s_b) / 2.0
            # continue the analytic branch from the nearest prepared point
            src = states[m] if (s_mid - s_a) <= (s_b - s_mid) else states[(m + 1) % len(states)]
            inserts.append((s_mid % 1.0, walker.advance(src, s_mid)))
        for s_mid, st in inserts:
            states.append(st)
        states.sort(key=lambda st: st.s)
        _evaluate_states(system, states, config)

    values = [st.sample.value for st in states]
    w, defect = winding_number(values, closed=True)
    return WindingReport(winding=w, samples=[st.sample for st in states],
                        max_step_ratio=max(_step_ratios(states)), defect=defect)


@dataclass(frozen=True)
class RootBox:
    """A localized root: the final quadtree box center, its enclosed winding
    (reported as multiplicity), and the box side length."""

    root: complex
    multiplicity: int
    size: float


# Deterministic retry schedules.  Region offsets stay under 1% of the
# region diameter; interior split seams are free to move further, and must,
# since a seam within noise distance of a root refines without converging.
_SPLIT_FRACTIONS = [(0.5, 0.5), (0.53, 0.47), (0.4717, 0.5293), (0.5421, 0.4579)]
_REGION_OFFSETS = [0j, 0.0037 + 0.0061j, -0.0059 + 0.0043j, 0.0071 - 0.0087j]


class _Budget:
    def __init__(self, limit):
        self.limit = limit
        self.used = 0
        self.tripped = False

    def spend(self):
        self.used += 1
        if self.used > self.limit:
            self.tripped = True
            raise RefinementBudgetError(
                f"root localization exceeded {self.limit} contour evaluations"
            )


def _box_winding(system, box, config, budget, ratio):
    re_lo, re_hi, im_lo, im_hi = box
    per_side = max(4, config.root_box_points // 4)
    spec = rectangle(re_lo, re_hi, im_lo, im_hi,
                     initial_points=4 * per_side, refinement_ratio=ratio)
    budget.spend()
    # Fail fast when a seam lands near a root: a box whose boundary keeps a
    # healthy margin converges in a few hundred points, so a sweep still
    # refining past 1024 is chasing a zero crossing and should be resliced.
    capped = replace(config, max_points=min(config.max_points, 1024))
    return contour_eval(system, spec, capped).winding


def _subdivide(system, box, w, config, budget, ratio, out, depth):
    re_lo, re_hi, im_lo, im_hi = box
    size = max(re_hi - re_lo, im_hi - im_lo)
    if w == 0:
        return
    if size <= config.target_size:
        out.append(RootBox(root=complex((re_lo + re_hi) / 2, (im_lo + im_hi) / 2),
                           multiplicity=w, size=size))
        return
    last_err = None
    for fx, fy in _SPLIT_FRACTIONS:
        xm = re_lo + fx * (re_hi - re_lo)
        ym = im_lo + fy * (im_hi - im_lo)
        children = [(re_lo, xm, im_lo, ym), (xm, re_hi, im_lo, ym),
                    (re_lo, xm, ym, im_hi), (xm, re_hi, ym, im_hi)]
        try:
            ws = [_box_winding(system, child, config, budget, ratio)
                  for child in children]
        except (RootOnContourError, InsufficientRefinementError,
                RefinementBudgetError) as err:
            if budget.tripped:
                raise
            last_err = err
            continue
        if sum(ws) != w:
            # a root sits close enough to a seam to leak winding; reslice
            last_err = RootOnContourError(
                f"child windings {ws} do not sum to parent {w} in box {box}"
            )
            continue
        for child, wc in zip(children, ws):
            _subdivide(system, child, wc, config, budget, ratio, out, depth + 1)
        return
    raise RootOnContourError(
        f"persistent root-on-contour while splitting box {box} "
        f"after {len(_SPLIT_FRACTIONS) - 1} perturbations: {last_err}"
    )


def root_localize(system: EvansSystem, region, config: EvansConfig | None = None):
    """Locate roots inside a rectangular region by winding-guided quadtree.

    region is (re_lo, re_hi, im_lo, im_hi). Returns RootBox entries sorted by
    real then imaginary part; multiplicity is the winding of the final box.
    The region boundary is nudged by up to 1% of the diameter (3 retries) if
    a root lands on it.
    """
    if config is None:
        config = EvansConfig()
    re_lo, re_hi, im_lo, im_hi = (float(v) for v in region)
    if not (re_lo < re_hi and im_lo < im_hi):
        raise InvalidArgumentError("region must satisfy re_lo < re_hi, im_lo < im_hi")
    diam = math.hypot(re_hi - re_lo, im_hi - im_lo)
    budget = _Budget(config.max_boxes)
    ratio = config.root_refinement_ratio

    last_err = None
    for off in _REGION_OFFSETS:
        box = (re_lo + off.real * diam, re_hi + off.real * diam,
               im_lo + off.imag * diam, im_hi + off.imag * diam)
        try:
            w = _box_winding(system, box, config, budget, ratio)
            out = []
            _subdivide(system, box, w, config, budget, ratio, out, 0)
        except (RootOnContourError, InsufficientRefinementError,
                RefinementBudgetError) as err:
            if budget.tripped:
                raise
            last_err = err
            continue
        out.sort(key=lambda rb: (rb.root.real, rb.root.imag))
        return out
    raise RootOnContourError(
        f"persistent root-on-contour after {len(_REGION_OFFSETS) - 1} region "
        f"perturbations: {last_err}"
    )
