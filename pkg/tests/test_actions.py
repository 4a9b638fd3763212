import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from ellipse_lab.actions import (
    Branch,
    action_angular,
    action_angular_qaws,
    action_radial,
    action_radial_qaws,
    action_ratio_A0,
    action_table,
    invert_A0,
    sector,
)
from ellipse_lab.errors import DivisionDegenerate, OutOfActionInterval, OutOfSector, SeparatrixLevel
from ellipse_lab.geometry import make_ellipse

ALPHAS = [0.01, 0.2, 0.5, 0.9, 0.999, 1.001, 1.2, 1.6, 1.99]


@pytest.mark.parametrize("alpha", ALPHAS)
def test_angular_closed_form(g, alpha):
    # elliptic-integral closed forms (scipy parameter convention m = k^2)
    if alpha < 1:
        ref = 2 * g.c / math.pi * (special.ellipe(alpha) - (1 - alpha) * special.ellipk(alpha))
    else:
        ref = 2 * g.c * math.sqrt(alpha) / math.pi * special.ellipe(1 / alpha)
    assert action_angular(g, alpha) == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("ab", [(math.sqrt(2), 1.0), (2.0, 1.0)])
def test_two_quadratures_agree(alpha, ab):
    geo = make_ellipse(*ab)
    if alpha >= geo.cosh2_max:
        pytest.skip("level beyond the glancing end")
    assert action_angular(geo, alpha) == pytest.approx(action_angular_qaws(geo, alpha), rel=1e-12, abs=1e-15)
    assert action_radial(geo, alpha) == pytest.approx(action_radial_qaws(geo, alpha), rel=1e-12, abs=1e-15)


def test_endpoints(g):
    assert action_angular(g, 0.0) == 0.0
    assert action_radial(g, g.cosh2_max) == 0.0
    # circle limit of the radial action at alpha = 0: (c/pi) int cosh = b/pi
    assert action_radial(g, 0.0) == pytest.approx(g.b / math.pi, rel=1e-14)
    with pytest.raises(OutOfActionInterval):
        action_angular(g, 2.1)


def test_monotone(g):
    al = np.linspace(0.001, 1.999, 301)
    it = np.array([action_angular(g, a) for a in al])
    ir = np.array([action_radial(g, a) for a in al])
    assert np.all(np.diff(it) > 0)
    assert np.all(np.diff(ir) < 0)
    a0 = ir / it
    inside = al < 1
    assert np.all(np.diff(a0[inside]) < 0)
    assert np.all(np.diff(a0[~inside]) < 0)


def test_ratio_degenerate(g):
    with pytest.raises(DivisionDegenerate):
        action_ratio_A0(g, 0.0)


def test_sector_values(g):
    k1, k2 = sector(g, Branch.INSIDE)
    assert k1 == pytest.approx(action_ratio_A0(g, 0.999), rel=1e-15)
    assert k2 == pytest.approx(action_ratio_A0(g, 0.001), rel=1e-15)
    o1, o2 = sector(g, Branch.OUTSIDE)
    assert 0 < o1 < o2 < k1


@settings(max_examples=25, deadline=None)
@given(st.floats(0.01, 0.99), st.booleans())
def test_invert_round_trip(s, inside):
    geo = make_ellipse(math.sqrt(2), 1.0)
    alpha = 0.002 + 0.996 * s if inside else 1.002 + 0.996 * s
    br = Branch.of(alpha)
    back = invert_A0(geo, action_ratio_A0(geo, alpha), br)
    assert back == pytest.approx(alpha, abs=1e-11)


def test_invert_out_of_sector(g):
    k1, k2 = sector(g, Branch.OUTSIDE)
    with pytest.raises(OutOfSector):
        invert_A0(g, 2 * k2, Branch.OUTSIDE)


def test_branch_of():
    assert Branch.of(0.5) is Branch.INSIDE and Branch.of(1.5) is Branch.OUTSIDE
    with pytest.raises(SeparatrixLevel):
        Branch.of(1.0)


def test_table(g):
    tab = action_table(g, [0.3, 1.3])
    assert [t.branch for t in tab] == [Branch.INSIDE, Branch.OUTSIDE]
    assert tab[0].A0 == pytest.approx(action_ratio_A0(g, 0.3))
