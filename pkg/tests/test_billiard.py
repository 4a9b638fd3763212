import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from ellipse_lab.billiard import (
    ROTATION_CALIBRATION,
    BoundaryPhasePoint,
    CausticClass,
    action_I,
    billiard_step,
    calibrate_rotation,
    calibrated_empirical_rotation,
    check_regular_level,
    classify_level,
    empirical_rotation,
    iterate,
    level_integral,
    leray_density,
    leray_mass,
    point_from_eta,
    point_on_level,
    rotation_number,
    uniformizing_angle,
)
from ellipse_lab.errors import GlancingRay, OutOfActionInterval, SeparatrixLevel
from ellipse_lab.geometry import make_ellipse


def test_action_of_points(g):
    assert action_I(g, BoundaryPhasePoint(0.0, 0.0)) == pytest.approx(1.0)
    assert action_I(g, point_from_eta(g, math.pi / 2, 0.0)) == pytest.approx(0.0, abs=1e-30)
    # glancing along the boundary: eta = 1 gives the top of the interval
    assert action_I(g, point_from_eta(g, 0.7, 1.0)) == pytest.approx(g.cosh2_max, rel=1e-14)


@pytest.mark.parametrize(
    "alpha,cls",
    [
        (0.0, CausticClass.MINOR_AXIS),
        (0.4, CausticClass.HYPERBOLIC),
        (1.0, CausticClass.SEPARATRIX),
        (1.0005, CausticClass.SEPARATRIX),
        (1.5, CausticClass.ELLIPTIC),
        (2.0, CausticClass.BOUNDARY_GLIDE),
    ],
)
def test_classify(g, alpha, cls):
    assert classify_level(g, alpha) is cls


def test_regular_level_checks(g):
    with pytest.raises(SeparatrixLevel):
        check_regular_level(g, 1.0)
    with pytest.raises(OutOfActionInterval):
        check_regular_level(g, 1.9995)
    with pytest.raises(OutOfActionInterval):
        classify_level(g, 3.0)


def test_glancing_rejected(g):
    with pytest.raises(GlancingRay):
        billiard_step(g, point_from_eta(g, 0.3, 1.0))


def test_minor_axis_bounce(g):
    p = point_from_eta(g, math.pi / 2, 0.0)
    q = billiard_step(g, p)
    assert q.theta == pytest.approx(3 * math.pi / 2, abs=1e-14)
    assert q.p_theta == pytest.approx(0.0, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 2 * math.pi), st.floats(-0.97, 0.97))
def test_step_conserves_and_reverses(theta, eta):
    geo = make_ellipse(2.0, 1.0)
    p = point_from_eta(geo, theta, eta)
    q = billiard_step(geo, p)
    assert action_I(geo, q) == pytest.approx(action_I(geo, p), abs=1e-12)
    # time reversal: flip the tangential momentum and step back
    r = billiard_step(geo, BoundaryPhasePoint(q.theta, -q.p_theta))
    assert abs(math.remainder(r.theta - p.theta, 2 * math.pi)) < 1e-10
    assert -r.p_theta == pytest.approx(p.p_theta, abs=1e-10)


def test_orbit_stays_on_level(g):
    orb = iterate(g, point_on_level(g, 0.6), 2000)
    assert np.abs(orb.alphas(g) - 0.6).max() < 1e-11


@pytest.mark.parametrize("alpha", [0.2, 0.7, 0.99, 1.01, 1.3, 1.9])
def test_leray_mass_closed_form(g, alpha):
    if alpha < 1:
        ref = 4 * g.c * special.ellipk(alpha)
    else:
        ref = 4 * g.c * special.ellipk(1 / alpha) / math.sqrt(alpha)
    assert leray_mass(g, alpha) == pytest.approx(ref, rel=1e-13)


def test_leray_density_support(g):
    t0 = 0.9
    alpha = math.cos(t0) ** 2
    d = leray_density(g, alpha, np.array([0.0, math.pi / 2, t0]))
    assert d[0] == 0.0
    assert d[1] == pytest.approx(0.5 / math.sqrt(alpha))
    assert np.isinf(d[2])


def test_level_integral_constant(g):
    f = lambda th: 3.0 + 0.0 * th
    assert level_integral(g, 0.4, f) == pytest.approx(3 * leray_mass(g, 0.4), rel=1e-14)


def test_rotation_glancing_and_range(g):
    assert rotation_number(g, g.cosh2_max) == pytest.approx(0.0, abs=1e-15)
    with pytest.raises(SeparatrixLevel):
        rotation_number(g, 1.0004)
    with pytest.raises(OutOfActionInterval):
        rotation_number(g, 2.5)


def test_rotation_continuous_across_branch_point(g):
    # the arcsine argument reaches 1 somewhere outside; a principal-branch
    # evaluation would fold back there and break monotonicity
    al = np.linspace(1.01, 1.99, 400)
    r = np.array([rotation_number(g, a) for a in al])
    assert np.all(np.diff(r) < 0)
    assert np.abs(np.diff(r, 2)).max() < 0.01


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.95, 1.05, 1.5, 1.95])
def test_rotation_formula_matches_orbit(g, alpha):
    emp = calibrated_empirical_rotation(g, alpha, 3000)
    assert emp == pytest.approx(rotation_number(g, alpha), abs=1e-9)


def test_calibration_constant(g):
    for alpha in (0.3, 1.4):
        assert calibrate_rotation(g, alpha) == pytest.approx(ROTATION_CALIBRATION, rel=1e-10)


def test_uniformizing_advance_constant():
    geo = make_ellipse(2.0, 1.9)
    for alpha in (0.5, 3.0):
        est = empirical_rotation(geo, alpha, 2000)
        assert est.std < 1e-10


def test_uniformizing_angle_range(g):
    for alpha in (0.5, 1.5):
        q = point_on_level(g, alpha, sign=-1)
        u = uniformizing_angle(g, alpha, q)
        assert 0.0 <= u < 1.0
