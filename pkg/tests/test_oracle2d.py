import math

import numpy as np
import pytest
from scipy import special

from ellipse_lab.geometry import make_ellipse
from ellipse_lab.oracle2d import (
    convergence_order,
    ellipse_domain,
    fd_eigenvalues,
    fd_spectrum,
    grid_operator,
    mode_class,
    rectangle_domain,
)


def test_unit_square():
    est = fd_eigenvalues(rectangle_domain(1.0, 1.0), 0.05, 3)
    # 2 pi^2, then the degenerate pair 5 pi^2
    np.testing.assert_allclose(est.lambda2, [2 * math.pi**2, 5 * math.pi**2, 5 * math.pi**2], rtol=1e-4)


def test_rectangle_is_symmetric_operator():
    op = grid_operator(rectangle_domain(1.0, 1.0), 0.1)
    assert op.symmetric
    # nodes at +-0.5 lie on the boundary and are excluded
    assert op.size == 81


def test_near_circle_against_bessel():
    # a = b = 1 is excluded from the ellipse code path, so use the domain
    # of a nearly round ellipse and compare with j_{0,1}^2 scaled by area
    g = make_ellipse(1.0 + 1e-6, 1.0)
    est = fd_eigenvalues(g, 0.02, 1)
    j01 = special.jn_zeros(0, 1)[0]
    assert est.lambda2[0] == pytest.approx(j01**2, rel=1e-4)


def test_ellipse_operator_is_not_symmetric(g21):
    op = grid_operator(ellipse_domain(g21), 0.04)
    assert not op.symmetric


def test_convergence_order_second(g21):
    p = convergence_order(ellipse_domain(g21), 0.08)
    assert 1.5 <= p <= 2.5


def test_classes_of_low_modes(g21):
    res = fd_spectrum(ellipse_domain(g21), 0.04, 4)
    # ground state even-even; the next mode is odd in x on the long axis
    assert mode_class(res, 0) == "ee"
    assert mode_class(res, 1) == "oe"
    assert np.all(res.residuals <= 1e-8)


def test_richardson_error_small(g21):
    est = fd_eigenvalues(g21, 0.02, 5)
    assert est.classes == ("ee", "oe", "ee", "eo", "oe")
    assert np.all(est.error < 1e-2 * est.lambda2)
    assert np.all(np.diff(est.lambda2) > 0)


def test_argument_checks(g21):
    with pytest.raises(ValueError):
        fd_eigenvalues(g21, 0.03, 3)
    with pytest.raises(ValueError):
        fd_eigenvalues(g21, 0.02, 0)
    with pytest.raises(ValueError):
        fd_eigenvalues(g21, 0.02, 21)
