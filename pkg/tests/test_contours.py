"""Contour sweeps, winding numbers, and root localization.

The workhorse fixture is a synthetic two-by-two system with a root implanted
at a known spot: the left limit [[1, 0], [lam - lam0, -1]] has unstable
direction (2, lam - lam0), the right limit diag(-1, 1) has stable direction
e0, so the boundary determinant is proportional to -(lam - lam0). Both
limits are diagonal at lam0, so smoothing the x-switch leaves the root at
exactly lam0 for any transition width.
"""

import cmath
import math

import numpy as np
import pytest

from evans import (
    ContourSpec,
    EvansConfig,
    EvansSystem,
    InsufficientRefinementError,
    InvalidArgumentError,
    RefinementBudgetError,
    RootOnContourError,
    WindingReport,
    circle,
    contour_eval,
    rectangle,
    root_localize,
    winding_number,
)

LAM0 = 0.7 + 0.3j


def implanted_system(lam0=LAM0, delta=0.4):
    Ap = np.diag([-1.0, 1.0]).astype(complex)

    def Am(lam):
        return np.array([[1.0, 0.0], [lam - lam0, -1.0]], dtype=complex)

    def A_fn(x, lam):
        sig = 0.5 * (1.0 + math.tanh(x / delta))
        return sig * Ap + (1.0 - sig) * Am(lam)

    def Ainf_fn(lam, side):
        return Ap if side == "plus" else Am(lam)

    return EvansSystem(n=2, r=1, A_fn=A_fn, Ainf_fn=Ainf_fn,
                       default_L=8.0, default_N=32, label="implanted")


# ---------------------------------------------------------------- ContourSpec

def test_circle_point_mapping():
    spec = circle(1.0 + 2.0j, 0.5, initial_points=8)
    assert spec.point(0.0) == pytest.approx(1.5 + 2.0j)
    assert spec.point(0.25) == pytest.approx(1.0 + 2.5j)
    assert spec.point(0.5) == pytest.approx(0.5 + 2.0j)
    assert spec.point(1.0) == pytest.approx(spec.point(0.0))


def test_rectangle_point_mapping_by_arclength():
    spec = rectangle(0.0, 2.0, 0.0, 1.0, initial_points=12)
    # perimeter 6; s = 1/3 is two units along: the corner (2, 0)
    assert spec.point(0.0) == pytest.approx(0.0 + 0.0j)
    assert spec.point(2.0 / 6.0) == pytest.approx(2.0 + 0.0j)
    assert spec.point(3.0 / 6.0) == pytest.approx(2.0 + 1.0j)
    assert spec.point(5.0 / 6.0) == pytest.approx(0.0 + 1.0j)


def test_contour_spec_validation():
    with pytest.raises(InvalidArgumentError):
        ContourSpec(kind="ellipse", center=0j, radius=1.0)
    with pytest.raises(InvalidArgumentError):
        circle(0j, 0.0)
    with pytest.raises(InvalidArgumentError):
        circle(0j, 1.0, initial_points=3)
    with pytest.raises(InvalidArgumentError):
        ContourSpec(kind="polyline", vertices=(0j, 1.0 + 0j))
    with pytest.raises(InvalidArgumentError):
        rectangle(1.0, 0.0, 0.0, 1.0)


def test_polyline_self_intersection_rejected():
    bowtie = (0j, 1 + 1j, 1 + 0j, 0 + 1j)
    with pytest.raises(InvalidArgumentError):
        ContourSpec(kind="polyline", vertices=bowtie)


# ------------------------------------------------------------- winding_number

def test_winding_constant_is_zero():
    w, defect = winding_number([2.0 + 1.0j] * 10, closed=True)
    assert w == 0 and defect < 1e-12


def test_winding_unit_circle_is_one():
    vals = [cmath.exp(2j * math.pi * m / 64) for m in range(64)]
    w, defect = winding_number(vals, closed=True)
    assert w == 1 and defect < 1e-9


def test_winding_cubic_polynomial_is_three():
    # two roots at 0.2, one at -0.4, all inside the unit circle
    zs = [cmath.exp(2j * math.pi * m / 256) for m in range(256)]
    vals = [(z - 0.2) ** 2 * (z + 0.4) for z in zs]
    w, defect = winding_number(vals, closed=True)
    assert w == 3 and defect < 1e-9


def test_winding_zero_value_raises():
    with pytest.raises(RootOnContourError):
        winding_number([1.0, 0.0, 1.0j], closed=True)


def test_winding_antipodal_step_raises():
    with pytest.raises(InsufficientRefinementError):
        winding_number([1.0, -1.0, 1.0, -1.0], closed=True)


def test_winding_report_defect_invariant():
    with pytest.raises(InsufficientRefinementError):
        WindingReport(winding=1, samples=[], max_step_ratio=0.1, defect=0.07)


# ---------------------------------------------------------------- contour_eval

def test_implanted_root_winding_one():
    sys_ = implanted_system()
    rep = contour_eval(sys_, circle(LAM0, 0.5, 16), EvansConfig())
    assert rep.winding == 1
    assert rep.defect < 0.05
    assert rep.max_step_ratio <= 0.1 + 1e-12
    # samples come back ordered by contour parameter
    lams = [s.lam for s in rep.samples]
    args = [cmath.phase(lam - LAM0) % (2 * math.pi) for lam in lams]
    assert all(a < b + 1e-12 for a, b in zip(args, args[1:]))


def test_empty_circle_winding_zero_no_refinement_blowup():
    # crosses the locus where the eigenvector conventions switch; the
    # transported basis must stay analytic there, or refinement explodes
    sys_ = implanted_system()
    rep = contour_eval(sys_, circle(LAM0 + 2.0, 0.5, 16), EvansConfig())
    assert rep.winding == 0
    assert len(rep.samples) <= 64


def test_rectangle_contour_matches_circle():
    sys_ = implanted_system()
    spec = rectangle(LAM0.real - 0.4, LAM0.real + 0.4,
                     LAM0.imag - 0.4, LAM0.imag + 0.4, initial_points=16)
    rep = contour_eval(sys_, spec, EvansConfig())
    assert rep.winding == 1


def test_root_on_contour_exhausts_budget():
    sys_ = implanted_system()
    cfg = EvansConfig(max_points=96)
    with pytest.raises((RefinementBudgetError, RootOnContourError)):
        contour_eval(sys_, circle(LAM0 + 0.5, 0.5, 16), cfg)


def test_threaded_sweep_is_deterministic():
    sys_ = implanted_system()
    rep1 = contour_eval(sys_, circle(LAM0, 0.4, 16), EvansConfig(threads=1))
    rep3 = contour_eval(sys_, circle(LAM0, 0.4, 16), EvansConfig(threads=3))
    v1 = np.array([s.value for s in rep1.samples])
    v3 = np.array([s.value for s in rep3.samples])
    assert v1.shape == v3.shape
    assert np.array_equal(v1, v3)


def test_track_mode_agrees_with_sort_away_from_essential_spectrum():
    sys_ = implanted_system()
    rep_s = contour_eval(sys_, circle(LAM0, 0.35, 16), EvansConfig(mode="sort"))
    rep_t = contour_eval(sys_, circle(LAM0, 0.35, 16), EvansConfig(mode="track"))
    assert rep_s.winding == rep_t.winding == 1


def test_conjugate_symmetry_recorded_not_asserted():
    # real-axis root: the system matrix is real for real lam, so values at
    # conjugate points should be near-conjugate; recorded as a diagnostic
    sys_ = implanted_system(lam0=0.5 + 0.0j)
    cfg = EvansConfig()
    rep = contour_eval(sys_, circle(0.5, 0.3, 16), cfg)
    by_s = {round(sm.lam.real, 12): sm.value for sm in rep.samples
            if abs(sm.lam.imag) < 1e-12}
    vals = {sm.lam: sm.value for sm in rep.samples}
    mismatches = []
    for lam, v in vals.items():
        partner = vals.get(lam.conjugate())
        if partner is not None and abs(v) > 0:
            mismatches.append(abs(partner - v.conjugate()) / abs(v))
    assert all(np.isfinite(m) for m in mismatches)
    print(f"conjugate-symmetry relative mismatch: max "
          f"{max(mismatches):.3e} over {len(mismatches)} paired samples")


# ---------------------------------------------------------------- root_localize

def test_root_localize_implanted():
    sys_ = implanted_system()
    cfg = EvansConfig(target_size=2e-3, threads=2)
    region = (LAM0.real - 0.06, LAM0.real + 0.075,
              LAM0.imag - 0.07, LAM0.imag + 0.065)
    boxes = root_localize(sys_, region, cfg)
    assert len(boxes) == 1
    box = boxes[0]
    assert box.multiplicity == 1
    assert box.size <= 2e-3
    assert abs(box.root - LAM0) <= 2e-3


def test_root_localize_empty_region():
    sys_ = implanted_system()
    boxes = root_localize(sys_, (2.0, 2.2, -0.1, 0.1), EvansConfig())
    assert boxes == []


def test_root_localize_bad_region():
    sys_ = implanted_system()
    with pytest.raises(InvalidArgumentError):
        root_localize(sys_, (1.0, 0.0, 0.0, 1.0), EvansConfig())


def test_root_localize_budget():
    sys_ = implanted_system()
    cfg = EvansConfig(target_size=1e-4, max_boxes=3)
    region = (LAM0.real - 0.2, LAM0.real + 0.21,
              LAM0.imag - 0.2, LAM0.imag + 0.19)
    with pytest.raises(RefinementBudgetError):
        root_localize(sys_, region, cfg)
