"""The billiard map of the ellipse on the boundary phase space.

Points of the coball bundle are stored as ``(theta, p_theta)`` where
``p_theta = eta * ds/dtheta`` and ``eta`` is the tangential component of
the inward unit direction. The conserved action is
``I = p_theta^2 / c^2 + cos^2 theta`` and its level sets are the invariant
curves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .elliptic import ellipf, ellipk
from .errors import GlancingRay, OutOfActionInterval, SeparatrixLevel
from .geometry import (
    EllipseGeometry,
    boundary_point,
    boundary_speed,
    cartesian_to_boundary_angle,
    wrap_angle,
)
from .quadrature import graded_edges, smooth_quad

EPS_SEP = 1e-3
EPS_GLANCE = 1e-9
CHORD_ROOT_TOL = 1e-9


@dataclass(frozen=True)
class BoundaryPhasePoint:
    theta: float
    p_theta: float

    def eta(self, g: EllipseGeometry) -> float:
        return self.p_theta / boundary_speed(g, self.theta)

    def alpha(self, g: EllipseGeometry) -> float:
        return action_I(g, self)


def point_from_eta(g: EllipseGeometry, theta: float, eta: float) -> BoundaryPhasePoint:
    return BoundaryPhasePoint(wrap_angle(theta), eta * boundary_speed(g, theta))


def action_I(g: EllipseGeometry, p: BoundaryPhasePoint) -> float:
    """``I = p_theta^2 / c^2 + cos^2 theta``."""
    return (p.p_theta / g.c) ** 2 + math.cos(p.theta) ** 2


class CausticClass(str, Enum):
    MINOR_AXIS = "MinorAxis"
    HYPERBOLIC = "HyperbolicCaustic"
    SEPARATRIX = "Separatrix"
    ELLIPTIC = "EllipticCaustic"
    BOUNDARY_GLIDE = "BoundaryGlide"


def classify_level(g: EllipseGeometry, alpha: float, eps_sep: float = EPS_SEP) -> CausticClass:
    """Caustic type of the invariant curve ``I = alpha``."""
    top = g.cosh2_max
    if alpha < -eps_sep or alpha > top + eps_sep:
        raise OutOfActionInterval(f"alpha={alpha} outside [0, {top}]")
    if abs(alpha - 1.0) <= eps_sep:
        return CausticClass.SEPARATRIX
    if alpha <= eps_sep:
        return CausticClass.MINOR_AXIS
    if alpha >= top - eps_sep:
        return CausticClass.BOUNDARY_GLIDE
    return CausticClass.HYPERBOLIC if alpha < 1.0 else CausticClass.ELLIPTIC


def check_regular_level(g: EllipseGeometry, alpha: float, eps_sep: float = EPS_SEP) -> CausticClass:
    """Raise unless ``alpha`` is a regular level at distance ``eps_sep`` from the ends."""
    cls = classify_level(g, alpha, eps_sep)
    if cls is CausticClass.SEPARATRIX:
        raise SeparatrixLevel(f"|alpha - 1| <= {eps_sep} (alpha={alpha})")
    if cls in (CausticClass.MINOR_AXIS, CausticClass.BOUNDARY_GLIDE):
        raise OutOfActionInterval(
            f"alpha={alpha} within {eps_sep} of the ends of the action interval"
        )
    return cls


# --------------------------------------------------------------------------
# the map


def billiard_step(g: EllipseGeometry, p: BoundaryPhasePoint) -> BoundaryPhasePoint:
    """Apply the billiard map once.

    The chord is intersected with the ellipse by the closed-form quadratic
    and the direction is reflected in the normal at the new point.
    """
    a, b = g.a, g.b
    th = p.theta
    speed = boundary_speed(g, th)
    eta = p.p_theta / speed
    if abs(eta) >= 1.0 - EPS_GLANCE:
        raise GlancingRay(f"|eta|={abs(eta)!r} at theta={th!r}")
    st, ct = math.sin(th), math.cos(th)
    x0, y0 = a * ct, b * st
    tx, ty = -a * st / speed, b * ct / speed
    # inward normal
    nx, ny = -b * ct / speed, -a * st / speed
    nrm = math.sqrt((1.0 - eta) * (1.0 + eta))
    dx, dy = eta * tx + nrm * nx, eta * ty + nrm * ny

    qa = dx * dx / (a * a) + dy * dy / (b * b)
    qb = 2.0 * (x0 * dx / (a * a) + y0 * dy / (b * b))
    qc = x0 * x0 / (a * a) + y0 * y0 / (b * b) - 1.0
    disc = math.sqrt(max(qb * qb - 4.0 * qa * qc, 0.0))
    # stable roots; the chord is the one away from the start point
    q = -0.5 * (qb - disc) if qb < 0 else -0.5 * (qb + disc)
    r1 = q / qa
    r2 = qc / q if q != 0.0 else 0.0
    scale = abs(r1) + abs(r2)
    cand = [r for r in (r1, r2) if r > CHORD_ROOT_TOL * scale]
    if not cand:
        raise GlancingRay(f"no chord from theta={th!r}")
    t = max(cand)

    th1 = cartesian_to_boundary_angle(g, x0 + t * dx, y0 + t * dy)
    speed1 = boundary_speed(g, th1)
    st1, ct1 = math.sin(th1), math.cos(th1)
    tx1, ty1 = -a * st1 / speed1, b * ct1 / speed1
    nx1, ny1 = -b * ct1 / speed1, -a * st1 / speed1
    dn = dx * nx1 + dy * ny1
    rx, ry = dx - 2.0 * dn * nx1, dy - 2.0 * dn * ny1
    eta1 = rx * tx1 + ry * ty1
    return BoundaryPhasePoint(th1, eta1 * speed1)


@dataclass(frozen=True)
class Orbit:
    points: tuple
    n_steps: int

    @property
    def theta(self) -> np.ndarray:
        return np.array([q.theta for q in self.points])

    @property
    def p_theta(self) -> np.ndarray:
        return np.array([q.p_theta for q in self.points])

    def alphas(self, g: EllipseGeometry) -> np.ndarray:
        return (self.p_theta / g.c) ** 2 + np.cos(self.theta) ** 2


def iterate(g: EllipseGeometry, start: BoundaryPhasePoint, n_steps: int) -> Orbit:
    pts = [start]
    q = start
    for _ in range(n_steps):
        q = billiard_step(g, q)
        pts.append(q)
    return Orbit(tuple(pts), n_steps)


def point_on_level(g: EllipseGeometry, alpha: float, fraction: float = 0.3, sign: int = 1) -> BoundaryPhasePoint:
    """A point of ``{I = alpha}``.

    ``fraction`` in ``(0, 1)`` positions the point between the turning
    point and the symmetry axis for inside levels, and scales ``theta``
    over a quarter turn for outside levels.
    """
    if alpha > 1.0:
        th = 0.5 * math.pi * fraction
    else:
        th0 = math.acos(math.sqrt(max(alpha, 0.0)))
        th = th0 + (0.5 * math.pi - th0) * fraction
    pp = g.c * math.sqrt(max(alpha - math.cos(th) ** 2, 0.0))
    return BoundaryPhasePoint(th, sign * pp)


# --------------------------------------------------------------------------
# Leray measure


def leray_density(g: EllipseGeometry, alpha: float, theta):
    """Leray density ``(c/2) (alpha - cos^2 theta)_+^{-1/2}`` per radian.

    Zero off the support; ``inf`` marks turning points ``cos^2 theta = alpha``.
    """
    theta = np.asarray(theta, dtype=float)
    ct = np.cos(theta)
    gap = alpha - ct * ct
    with np.errstate(divide="ignore"):
        out = np.where(gap > 0, 0.5 * g.c / np.sqrt(np.where(gap > 0, gap, 1.0)), 0.0)
    out = np.where(gap == 0.0, np.inf, out)
    if out.ndim == 0:
        return float(out)
    return out


def level_integral(g: EllipseGeometry, alpha: float, func, *, tol: float = 1e-13) -> float:
    """``int_{I=alpha} func(theta) d mu_alpha`` over the whole level set.

    Both momentum branches ``p_theta = +-c sqrt(alpha - cos^2)`` are
    included, so the integral of ``1`` is the total Leray mass. Turning
    points are removed by ``cos theta = sqrt(alpha) sin t`` for inside
    levels; outside levels have a smooth periodic integrand.
    """
    # close to the separatrix the integrand varies on the scale sqrt|1 - alpha|
    # near theta = 0, pi (outside) or t = +-pi/2 (inside)
    delta = math.sqrt(abs(1.0 - alpha))
    if alpha > 1.0:

        def integrand(th):
            ct = np.cos(th)
            return func(th) / np.sqrt(alpha - ct * ct)

        edges = None
        if delta < 0.25:
            edges = graded_edges(0.0, 2 * math.pi, (0.0, math.pi, 2 * math.pi), delta)
        val, _ = smooth_quad(integrand, 0.0, 2 * math.pi, tol=tol, panels=4, edges=edges)
        return g.c * val
    if alpha <= 0.0:
        return 0.0
    sa = math.sqrt(alpha)

    def arcs(t):
        st = np.sin(t)
        th = np.arccos(sa * st)
        w = 1.0 / np.sqrt(1.0 - alpha * st * st)
        return (func(th) + func(2 * math.pi - th)) * w

    edges = None
    if delta < 0.25:
        edges = graded_edges(-0.5 * math.pi, 0.5 * math.pi, (-0.5 * math.pi, 0.0, 0.5 * math.pi), delta)
    val, _ = smooth_quad(arcs, -0.5 * math.pi, 0.5 * math.pi, tol=tol, panels=2, edges=edges)
    return g.c * val


def leray_mass(g: EllipseGeometry, alpha: float) -> float:
    """Total Leray mass of the level ``I = alpha``: ``4 c K(k) / sqrt(alpha)`` outside."""
    return level_integral(g, alpha, lambda th: np.ones_like(th))


# --------------------------------------------------------------------------
# rotation numbers

# Ratio between the closed-form rotation number and the per-step advance
# of the uniformizing angle normalized to period 1. Fixed once by
# ``calibrate_rotation`` and asserted stable in the test-suite.
ROTATION_CALIBRATION = 2.0 * math.pi
ROTATION_CALIBRATION_NOTE = (
    "r_formula = 2*pi * r_emp; r_emp = per-step advance (mod 1) of the "
    "Leray-uniformized angle of period 1 on one invariant circle; inside the "
    "separatrix the half-turn theta -> theta + pi that swaps the two "
    "components is factored out"
)


def _rotation_amplitude(g: EllipseGeometry, alpha: float) -> float:
    # amplitude z of F(z, k) in the closed form; sin z is the printed arcsin
    # argument, the sign of cos z selects the branch continuously in alpha
    t2 = math.tanh(g.rho_max) ** 2
    top = g.cosh2_max
    gap = max(top - alpha, 0.0)
    den = gap + alpha * t2
    sin_z = 2.0 * math.sqrt(t2 * gap) / den
    if alpha > 1.0:
        return math.atan2(math.sqrt(alpha) * sin_z, (alpha * t2 - gap) / den)
    cos_z = (top * top - 2.0 * top + alpha) / (top * top - alpha)
    return math.atan2(sin_z, cos_z)


def rotation_number(g: EllipseGeometry, alpha: float, eps_sep: float = EPS_SEP) -> float:
    """Closed-form rotation number of the invariant curve ``I = alpha``.

    ``r = pi / (2 K(k)) F(z, k)`` with ``k = sqrt(alpha)`` inside the
    separatrix and ``k = 1/sqrt(alpha)`` outside. The amplitude ``z`` is
    taken on the branch continuous in ``alpha`` (a principal ``arcsin``
    jumps where its argument reaches 1). Valid on ``[0, 1 - eps_sep)`` and
    ``(1 + eps_sep, cosh^2 rho_max]``; zero at the glancing level.
    """
    top = g.cosh2_max
    if abs(alpha - 1.0) <= eps_sep:
        raise SeparatrixLevel(f"|alpha - 1| <= {eps_sep} (alpha={alpha})")
    if alpha < 0.0 or alpha > top:
        raise OutOfActionInterval(f"alpha={alpha} outside [0, {top}]")
    k = math.sqrt(alpha) if alpha < 1.0 else 1.0 / math.sqrt(alpha)
    z = _rotation_amplitude(g, alpha)
    return 0.5 * math.pi / ellipk(k) * ellipf(z, k)


def uniformizing_angle(g: EllipseGeometry, alpha: float, p: BoundaryPhasePoint) -> float:
    """Angle variable in ``[0, 1)`` in which the map is a rigid rotation.

    It is the normalized cumulative Leray measure along the invariant
    circle through ``p``. Outside the separatrix each momentum sign is its
    own circle (the negative branch is traversed backwards). Inside, the
    map swaps the components around ``theta = pi/2`` and ``3 pi/2``; points
    of the second are pulled back by ``theta -> theta - pi`` so the swap
    drops out of the advance.
    """
    if alpha > 1.0:
        k = 1.0 / math.sqrt(alpha)
        kk = ellipk(k)
        frac = ((ellipf(p.theta - 0.5 * math.pi, k) + kk) / (4.0 * kk)) % 1.0
        return frac if p.p_theta >= 0 else (1.0 - frac) % 1.0
    k = math.sqrt(alpha)
    ct = math.cos(p.theta)
    if math.sin(p.theta) < 0:
        ct = -ct
    t = math.atan2(ct / k, p.p_theta / (g.c * k))
    return (ellipf(t, k) / (4.0 * ellipk(k))) % 1.0


@dataclass(frozen=True)
class RotationEstimate:
    alpha: float
    mean: float
    std: float
    n_steps: int


def empirical_rotation(
    g: EllipseGeometry,
    alpha: float,
    n_steps: int = 10_000,
    *,
    start: BoundaryPhasePoint | None = None,
    eps_sep: float = EPS_SEP,
) -> RotationEstimate:
    """Mean per-step advance (mod 1) of :func:`uniformizing_angle` along an orbit."""
    if abs(alpha - 1.0) <= eps_sep:
        raise SeparatrixLevel(f"|alpha - 1| <= {eps_sep} (alpha={alpha})")
    if alpha < 0.0 or alpha >= g.cosh2_max:
        raise OutOfActionInterval(f"alpha={alpha} outside the open action interval")
    q = start if start is not None else point_on_level(g, alpha)
    period = 1.0
    iota = uniformizing_angle(g, alpha, q)
    adv = np.empty(n_steps)
    for i in range(n_steps):
        q = billiard_step(g, q)
        nxt = uniformizing_angle(g, alpha, q)
        adv[i] = (nxt - iota) % period
        iota = nxt
    # keep advances near a half period on one side of the cut
    ref = adv[0]
    adv = ref + ((adv - ref + 0.5 * period) % period - 0.5 * period)
    return RotationEstimate(alpha, float(adv.mean()), float(adv.std()), n_steps)


def calibrate_rotation(g: EllipseGeometry, alpha: float, n_steps: int = 2000) -> float:
    """Ratio ``rotation_number / empirical advance`` at one level."""
    return rotation_number(g, alpha) / empirical_rotation(g, alpha, n_steps).mean


def calibrated_empirical_rotation(g: EllipseGeometry, alpha: float, n_steps: int = 10_000) -> float:
    return ROTATION_CALIBRATION * empirical_rotation(g, alpha, n_steps).mean
