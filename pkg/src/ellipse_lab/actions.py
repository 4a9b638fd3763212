"""Action variables of the elliptical billiard at energy ``H = 1``.

For a level ``I = alpha`` the angular and radial actions are::

    I_theta = (c/pi) int_{cos^2 theta <= alpha, 0 <= theta <= pi} sqrt(alpha - cos^2 theta) dtheta
    I_rho   = (c/pi) int_{cosh^2 rho >= alpha, 0 <= rho <= rho_max} sqrt(cosh^2 rho - alpha) drho

Square-root endpoints are removed by substitution before Gauss-Legendre
quadrature:

* inside (``alpha < 1``), ``cos theta = sqrt(alpha) sin t`` turns the angular
  integrand into ``alpha cos^2 t / sqrt(1 - alpha sin^2 t)``;
* outside (``alpha > 1``), ``cosh rho = sqrt(alpha) cosh w`` turns the radial
  integrand into ``alpha sinh^2 w / sqrt(alpha cosh^2 w - 1)``.

The other two integrals are smooth as written.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import integrate, optimize

from .billiard import EPS_SEP
from .errors import DivisionDegenerate, OutOfActionInterval, OutOfSector, SeparatrixLevel
from .geometry import EllipseGeometry
from .quadrature import smooth_quad

QUAD_TOL = 1e-14
INVERT_TOL = 1e-13


class Branch(str, Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"

    @classmethod
    def of(cls, alpha: float) -> "Branch":
        if alpha == 1.0:
            raise SeparatrixLevel("alpha = 1 belongs to neither branch")
        return cls.INSIDE if alpha < 1.0 else cls.OUTSIDE


@dataclass(frozen=True)
class ActionValue:
    alpha: float
    I_rho: float
    I_theta: float
    branch: Branch

    @property
    def A0(self) -> float:
        return self.I_rho / self.I_theta


def _check_alpha(g: EllipseGeometry, alpha: float) -> None:
    top = g.cosh2_max
    # allow rounding slop at the glancing end
    if alpha < 0.0 or alpha > top * (1.0 + 1e-14):
        raise OutOfActionInterval(f"alpha={alpha} outside [0, {top}]")


def action_angular(g: EllipseGeometry, alpha: float, *, tol: float = QUAD_TOL) -> float:
    """Angular action ``I_theta(alpha)``; zero at ``alpha = 0``, increasing."""
    _check_alpha(g, alpha)
    if alpha <= 0.0:
        return 0.0
    if alpha < 1.0:

        def f(t):
            st = np.sin(t)
            ct = np.cos(t)
            return alpha * ct * ct / np.sqrt(1.0 - alpha * st * st)

        val, _ = smooth_quad(f, -0.5 * math.pi, 0.5 * math.pi, tol=tol)
    else:

        def f(th):
            co = np.cos(th)
            return np.sqrt(alpha - co * co)

        # at alpha = 1 the integrand is |sin| with kinks only at the ends
        val, _ = smooth_quad(f, 0.0, math.pi, tol=tol, panels=2)
    return g.c / math.pi * val


def action_radial(g: EllipseGeometry, alpha: float, *, tol: float = QUAD_TOL) -> float:
    """Radial action ``I_rho(alpha)``; zero at the glancing level, decreasing."""
    _check_alpha(g, alpha)
    if alpha <= 1.0:

        def f(r):
            ch = np.cosh(r)
            return np.sqrt(ch * ch - alpha)

        val, _ = smooth_quad(f, 0.0, g.rho_max, tol=tol)
        return g.c / math.pi * val
    ratio = g.a / (g.c * math.sqrt(alpha))
    if ratio <= 1.0:
        return 0.0
    w_max = math.acosh(ratio)

    def f(w):
        chw = np.cosh(w)
        shw = np.sinh(w)
        return alpha * shw * shw / np.sqrt(alpha * chw * chw - 1.0)

    val, _ = smooth_quad(f, 0.0, w_max, tol=tol)
    return g.c / math.pi * val


# --------------------------------------------------------------------------
# second quadrature scheme (algebraic-weight QAWS), used as an oracle


def action_angular_qaws(g: EllipseGeometry, alpha: float) -> float:
    """``I_theta`` in the variable ``u = cos theta`` with QUADPACK's algebraic weights."""
    if alpha <= 0.0:
        return 0.0
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    if alpha < 1.0:
        s = math.sqrt(alpha)
        # sqrt(alpha - u^2) = (s - u)^(1/2) (s + u)^(1/2) is the weight
        val, _ = integrate.quad(
            lambda u: 1.0 / math.sqrt(1.0 - u * u), -s, s, weight="alg", wvar=(0.5, 0.5), **opts
        )
    else:
        val, _ = integrate.quad(
            lambda u: math.sqrt(alpha - u * u), -1.0, 1.0, weight="alg", wvar=(-0.5, -0.5), **opts
        )
    return g.c / math.pi * val


def action_radial_qaws(g: EllipseGeometry, alpha: float) -> float:
    """``I_rho`` in the variable ``v = cosh rho`` with QUADPACK's algebraic weights."""
    top = g.a / g.c
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=200)
    if alpha <= 1.0:
        val, _ = integrate.quad(
            lambda v: math.sqrt(max(v * v - alpha, 0.0)) / math.sqrt(v + 1.0),
            1.0, top, weight="alg", wvar=(-0.5, 0.0), **opts,
        )
    else:
        s = math.sqrt(alpha)
        if top <= s:
            return 0.0
        val, _ = integrate.quad(
            lambda v: math.sqrt(v + s) / math.sqrt(v * v - 1.0),
            s, top, weight="alg", wvar=(0.5, 0.0), **opts,
        )
    return g.c / math.pi * val


# --------------------------------------------------------------------------
# ratio and its inverse


def actions(g: EllipseGeometry, alpha: float) -> ActionValue:
    return ActionValue(alpha, action_radial(g, alpha), action_angular(g, alpha), Branch.of(alpha))


def action_ratio_A0(g: EllipseGeometry, alpha: float) -> float:
    """``A0(alpha) = I_rho(alpha) / I_theta(alpha)``.

    Raises ``DivisionDegenerate`` when ``I_theta`` is too small to divide
    by, which happens only in the minor-axis limit ``alpha -> 0``.
    """
    _check_alpha(g, alpha)
    it = action_angular(g, alpha)
    # I_theta ~ c alpha / 2 near zero
    if it <= 1e-12 * g.c:
        raise DivisionDegenerate(f"I_theta({alpha}) = {it} is degenerate")
    return action_radial(g, alpha) / it


def branch_interval(g: EllipseGeometry, branch: Branch, eps: float = EPS_SEP) -> tuple[float, float]:
    """The ``eps``-truncated action interval of a branch."""
    branch = Branch(branch)
    if branch is Branch.INSIDE:
        return eps, 1.0 - eps
    return 1.0 + eps, g.cosh2_max - eps


def sector(g: EllipseGeometry, branch: Branch, eps: float = EPS_SEP) -> tuple[float, float]:
    """``(K1, K2)``: range of ``A0`` on the truncated branch interval.

    ``A0`` is decreasing on both branches, so the extremes sit at the ends.
    """
    lo, hi = branch_interval(g, branch, eps)
    return action_ratio_A0(g, hi), action_ratio_A0(g, lo)


def invert_A0(
    g: EllipseGeometry, r: float, branch: Branch, *, eps: float = EPS_SEP, xtol: float = INVERT_TOL
) -> float:
    """Solve ``A0(alpha) = r`` on one branch.

    Raises
    ------
    OutOfSector
        If ``r`` lies outside ``A0`` of the truncated branch interval.
    """
    lo, hi = branch_interval(g, branch, eps)
    k1, k2 = sector(g, branch, eps)
    slack = 1e-12 * max(1.0, abs(r))
    if not (k1 - slack <= r <= k2 + slack):
        raise OutOfSector(f"r={r} outside [{k1}, {k2}] on the {Branch(branch).value} branch")
    if r >= k2:
        return lo
    if r <= k1:
        return hi
    return optimize.brentq(lambda al: action_ratio_A0(g, al) - r, lo, hi, xtol=xtol, rtol=1e-15)


def action_table(g: EllipseGeometry, alphas) -> list[ActionValue]:
    return [actions(g, float(al)) for al in np.asarray(alphas, dtype=float)]
