import math

import numpy as np
import pytest

from ellipse_lab.actions import Branch, action_angular, invert_A0
from ellipse_lab.errors import NoBracket
from ellipse_lab.mathieu import BC, Parity, angular_characteristic, radial_characteristic
from ellipse_lab.spectrum import (
    ALL_CLASSES,
    SymmetryClass,
    asymptotic_check,
    bs_indices,
    build_ladder,
    enumerate_spectrum,
    fixed_point_hbar,
    gap_is_monotone,
    maslov_indices,
    solve_intersection,
    spacing_report,
)

# Richardson-extrapolated finite-difference values (oracle2d, h = 0.02 and 0.01)
# for the Dirichlet ellipse a = 2, b = 1; estimated error <= 6e-4
FD_LAMBDA2_21 = [3.566725657588258, 6.275428554388507, 10.02839736523178]


def test_class_parsing_and_parities():
    ee = SymmetryClass.parse("ee")
    assert ee.code == "ee" and ee.n_parity == 0 and ee.n_min == 0 and ee.m_min == 0
    oe = SymmetryClass.parse("OE")
    assert oe.n_parity == 1 and oe.n_min == 1
    eo = SymmetryClass.parse("eo")
    # sin(n theta) is even in x for odd n
    assert eo.n_parity == 1 and eo.n_min == 1 and eo.m_min == 1
    oo = SymmetryClass.parse("oo")
    assert oo.n_parity == 0 and oo.n_min == 2
    with pytest.raises(ValueError):
        SymmetryClass.parse("ex")
    with pytest.raises(ValueError):
        ee.angular_mode(3)
    for c in ALL_CLASSES:
        assert c.angular_mode(c.n_min).parity_x is c.parity_x


def test_maslov_table():
    ee, eo = SymmetryClass.parse("ee"), SymmetryClass.parse("eo")
    assert bs_indices(2, 3, eo) == (1, 2)
    assert maslov_indices(2, 4, ee, Branch.OUTSIDE, BC.DIRICHLET) == (2.75, 4.0)
    assert maslov_indices(2, 4, ee, Branch.OUTSIDE, BC.NEUMANN) == (2.25, 4.0)
    assert maslov_indices(2, 3, eo, Branch.OUTSIDE, BC.DIRICHLET) == (1.75, 3.0)
    assert maslov_indices(2, 4, ee, Branch.INSIDE, BC.DIRICHLET) == (2.5, 4.5)
    assert maslov_indices(2, 3, eo, Branch.INSIDE, BC.DIRICHLET) == (2.0, 2.5)
    assert maslov_indices(2, 4, ee, Branch.INSIDE, BC.NEUMANN) == (2.0, 4.5)
    assert maslov_indices(2, 3, eo, Branch.INSIDE, BC.NEUMANN) == (1.5, 2.5)


@pytest.mark.parametrize("m,n,cls,bc", [(0, 0, "ee", "dirichlet"), (3, 40, "ee", "dirichlet"), (2, 5, "eo", "neumann"), (5, 3, "oe", "dirichlet"), (4, 6, "oo", "neumann")])
def test_intersection_is_a_double_root(g, m, n, cls, bc):
    rec = solve_intersection(g, m, n, cls, bc)
    c = SymmetryClass.parse(cls)
    a_ang = angular_characteristic(g, rec.hbar, c.angular_mode(n))
    a_rad = radial_characteristic(g, rec.hbar, c.radial_mode(m, BC(bc)))
    assert a_ang == pytest.approx(a_rad, abs=1e-10)
    assert rec.alpha == pytest.approx(a_ang, abs=1e-10)
    assert rec.lam == pytest.approx(1.0 / rec.hbar, rel=1e-15)
    assert rec.branch is Branch.of(rec.alpha)
    assert gap_is_monotone(g, rec)
    d = rec.to_dict()
    assert d["cls"] == cls and d["lambda"] == rec.lam


def test_fixed_point_matches_bracketing(g):
    rec = solve_intersection(g, 3, 40, "ee", "dirichlet")
    hb, it = fixed_point_hbar(g, 3, 40, "ee", "dirichlet", rec.branch)
    assert hb == pytest.approx(rec.hbar, rel=1e-11)
    assert it < 30


def test_no_bracket(g):
    with pytest.raises(NoBracket):
        solve_intersection(g, 0, 2, "ee", "dirichlet", hbar_seed=1e-9)
    # the constant Neumann mode sits at hbar = infinity
    with pytest.raises(NoBracket):
        solve_intersection(g, 0, 0, "ee", "neumann")


def test_low_spectrum_against_fd_oracle(g21):
    recs = enumerate_spectrum(g21, "dirichlet", 4.1)
    lam2 = [r.lam**2 for r in recs[:3]]
    np.testing.assert_allclose(lam2, FD_LAMBDA2_21, rtol=2e-4)
    assert [r.cls.code for r in recs[:6]] == ["ee", "oe", "ee", "eo", "oe", "oo"]


def test_enumeration_sorted_and_complete(g):
    recs = enumerate_spectrum(g, "neumann", 6.0)
    lams = [r.lam for r in recs]
    assert lams == sorted(lams)
    assert len({(r.cls.code, r.m, r.n) for r in recs}) == len(recs)
    # the constant mode is left out; the first nonzero Neumann value
    # still undercuts the first Dirichlet one
    assert recs[0].lam > 0
    assert recs[0].lam < enumerate_spectrum(g, "dirichlet", 3.0)[0].lam


def test_spacing_report(g):
    rep = spacing_report(g, "dirichlet", 8.0)
    assert len(rep.gaps) == len(rep.records) - 1
    assert all(x >= 0 for x in rep.gaps)


@pytest.mark.parametrize("alpha", [1.2, 0.5])
def test_ladder_ratios_approach_target(g, alpha):
    lad = build_ladder(g, alpha, "ee", "dirichlet", [10, 20, 40])
    assert [r.n for r in lad.entries] == [10, 20, 40]
    br = Branch.of(alpha)
    for rec in lad.entries:
        mt, nt = maslov_indices(rec.m, rec.n, rec.cls, br, rec.bc)
        # the lattice ratio is within half a step of the target ratio
        assert abs(mt / nt - lad.r0) <= 0.5 / nt + 1e-12
        assert rec.branch is br
    rep = asymptotic_check(g, lad)
    assert len(rep.e) == 3 and all(e > 0 for e in rep.e)
    # leading-order prediction of the record from its own lattice point
    rec = lad.entries[-1]
    mt, nt = maslov_indices(rec.m, rec.n, rec.cls, br, rec.bc)
    pred = nt / action_angular(g, invert_A0(g, mt / nt, br))
    assert rec.lam == pytest.approx(pred, rel=2e-3)
