"""Ellipse parameters and elliptical coordinates.

The ellipse ``x^2/a^2 + y^2/b^2 <= 1`` is described in confocal elliptical
coordinates ``(rho, theta)``::

    x = c cosh(rho) cos(theta),   y = c sinh(rho) sin(theta)

with ``c = sqrt(a^2 - b^2)`` and ``0 <= rho <= rho_max = arccosh(a / c)``.
The boundary is ``rho = rho_max`` and ``theta`` runs over ``[0, 2 pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateEllipse, OutOfRange
from .quadrature import gauss_legendre

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EllipseGeometry:
    """Immutable ellipse description; build it with :func:`make_ellipse`."""

    a: float
    b: float
    c: float = field(init=False)
    rho_max: float = field(init=False)
    eccentricity: float = field(init=False)

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        if not (math.isfinite(a) and math.isfinite(b)) or not (a > b > 0):
            raise DegenerateEllipse(f"need a > b > 0, got a={a!r}, b={b!r}")
        c = math.sqrt((a - b) * (a + b))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        # asinh(b/c) and acosh(a/c) agree; asinh is better conditioned near the circle
        object.__setattr__(self, "rho_max", math.asinh(b / c))
        object.__setattr__(self, "eccentricity", c / a)

    @property
    def cosh2_max(self) -> float:
        """Top of the action interval, ``cosh^2(rho_max) = a^2/c^2``."""
        return (self.a / self.c) ** 2

    @property
    def area(self) -> float:
        return math.pi * self.a * self.b

    def as_dict(self) -> dict:
        return {"a": self.a, "b": self.b}


def make_ellipse(a: float, b: float) -> EllipseGeometry:
    """Return the geometry for semi-axes ``a > b > 0``.

    Raises
    ------
    DegenerateEllipse
        If ``a <= b`` (the disc is excluded since it has no foci) or either
        axis is non-positive.
    """
    return EllipseGeometry(a, b)


def wrap_angle(theta):
    """Reduce angles to ``[0, 2 pi)``."""
    t = np.mod(theta, TWO_PI)
    # np.mod can return exactly 2 pi for tiny negative inputs
    t = np.where(t >= TWO_PI, 0.0, t)
    if np.ndim(t) == 0:
        return float(t)
    return t


def elliptical_to_cartesian(g: EllipseGeometry, rho, theta):
    """Map elliptical coordinates to Cartesian ``(x, y)``.

    Raises ``OutOfRange`` when ``rho`` is outside ``[0, rho_max]``.
    """
    rho = np.asarray(rho, dtype=float)
    tol = 1e-14 * max(1.0, g.rho_max)
    if np.any(rho < -tol) or np.any(rho > g.rho_max + tol):
        raise OutOfRange(f"rho must lie in [0, {g.rho_max}]")
    x = g.c * np.cosh(rho) * np.cos(theta)
    y = g.c * np.sinh(rho) * np.sin(theta)
    if np.ndim(x) == 0:
        return float(x), float(y)
    return x, y


def boundary_point(g: EllipseGeometry, theta):
    """Cartesian point of the boundary at angle ``theta``.

    Uses ``c cosh(rho_max) = a`` and ``c sinh(rho_max) = b`` directly, which
    keeps boundary points on the ellipse to rounding error.
    """
    return g.a * np.cos(theta), g.b * np.sin(theta)


def cartesian_to_boundary_angle(g: EllipseGeometry, x, y):
    """Inverse of :func:`boundary_point` (angle in ``[0, 2 pi)``)."""
    return wrap_angle(np.arctan2(np.asarray(y) / g.b, np.asarray(x) / g.a))


def boundary_speed(g: EllipseGeometry, theta):
    """Arclength density ``ds/dtheta = sqrt(c^2 (cosh^2 rho_max - cos^2 theta))``.

    Equal to ``b`` at ``theta = 0`` and ``a`` at ``theta = pi/2``.
    """
    s = np.sin(theta)
    co = np.cos(theta)
    # a^2 sin^2 + b^2 cos^2 is the same quantity without cancellation
    val = np.sqrt(g.a**2 * s * s + g.b**2 * co * co)
    if np.ndim(val) == 0:
        return float(val)
    return val


def arclength(g: EllipseGeometry, theta, *, nodes: int = 64):
    """Cumulative arclength ``s(theta)`` measured from ``theta = 0``.

    ``theta`` may be any real; the result is odd in ``theta`` and grows by
    one perimeter per turn.
    """
    theta = np.asarray(theta, dtype=float)
    per = perimeter(g)
    turns = np.floor(theta / TWO_PI)
    rem = theta - turns * TWO_PI
    # integrate over [0, rem] in quarter-period pieces to keep the rule accurate
    x, w = gauss_legendre(nodes)
    flat = rem.ravel()
    out = np.empty_like(flat)
    for i, t in enumerate(flat):
        total = 0.0
        lo = 0.0
        while lo < t:
            hi = min(t, lo + 0.5 * math.pi)
            mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
            total += half * np.dot(w, boundary_speed(g, mid + half * x))
            lo = hi
        out[i] = total
    s = out.reshape(rem.shape) + turns * per
    if s.ndim == 0:
        return float(s)
    return s


def perimeter(g: EllipseGeometry) -> float:
    """Perimeter from the arithmetic-geometric mean of the semi-axes."""
    x, y = g.a, g.b
    s = 0.5 * (x * x + y * y)
    weight = 1.0
    for _ in range(64):
        cn = 0.5 * (x - y)
        if abs(cn) <= 1e-17 * x:
            break
        x, y = 0.5 * (x + y), math.sqrt(x * y)
        s -= weight * cn * cn
        weight *= 2.0
    return 2.0 * math.pi * s / x
