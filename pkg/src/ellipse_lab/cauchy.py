"""Boundary Cauchy data of separable eigenfunctions and their quantum limits.

For ``phi = F(rho) G(theta)`` on the ellipse the boundary data are, with
``speed = ds/dtheta``::

    Neumann:    u^b = u = F(rho_max) G(theta)
    Dirichlet:  u   = hbar F'(rho_max) G(theta),   u^b = -u / speed

so the "modified" trace ``u`` is always an eigenfunction of the angular
operator ``Op(I) = -(hbar^2/c^2) d^2/dtheta^2 + cos^2 theta`` with
eigenvalue ``alpha``. Along a ladder ``|u^b|^2 ds`` tends weakly to the
normalized measure ``nu_alpha``: ``d mu_alpha / speed`` (Dirichlet) or
``speed d mu_alpha`` (Neumann), ``mu_alpha`` being the Leray measure.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from .billiard import EPS_SEP, level_integral
from .errors import GridTooCoarse, OutOfActionInterval, SeparatrixLevel
from .geometry import EllipseGeometry, boundary_speed
from .mathieu import BC, AngularSeries, angular_series, radial_eigenfunction
from .quadrature import periodic_trapezoid
from .spectrum import EigenvalueRecord, Ladder, SymmetryClass, build_ladder

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class BoundaryTrace:
    record: EigenvalueRecord
    grid: np.ndarray
    values: np.ndarray
    kind: BC
    modified_values: np.ndarray
    series: AngularSeries
    f_end: float
    df_end: float
    scale: float

    @property
    def n_points(self) -> int:
        return self.grid.size


def _grid_size(n: int, bandwidth: int) -> int:
    need = max(256, 20 * (n + 1), 4 * (bandwidth + 8))
    return 1 << (need - 1).bit_length()


def boundary_trace(g: EllipseGeometry, rec: EigenvalueRecord, n_points: int | None = None) -> BoundaryTrace:
    """Sample the Cauchy data of a solved record on a uniform periodic grid.

    The trace is scaled so that ``int |u^b|^2 ds = 1``; the modified trace
    carries the same factor.

    Raises
    ------
    GridTooCoarse
        If ``n_points`` is below ``20 (n + 1)`` or cannot resolve the
        Fourier bandwidth of ``G`` without aliasing.
    """
    amode = rec.cls.angular_mode(rec.n)
    ser = angular_series(g, rec.hbar, amode)
    band = ser.bandwidth
    if n_points is None:
        n_points = _grid_size(rec.n, band)
    if n_points < 20 * (rec.n + 1) or n_points < 2 * band + 2:
        raise GridTooCoarse(
            f"{n_points} points for n={rec.n}, bandwidth {band}; need >= {max(20 * (rec.n + 1), 2 * band + 2)}"
        )
    grid = np.arange(n_points) * (TWO_PI / n_points)
    rmode = rec.cls.radial_mode(rec.m, rec.bc)
    _, f_end, df_end = radial_eigenfunction(g, rec.hbar, rmode, rec.alpha, np.array([0.0]))
    G = ser(grid)
    speed = boundary_speed(g, grid)
    if rec.bc is BC.NEUMANN:
        mod = f_end * G
        val = mod.copy()
    else:
        mod = rec.hbar * df_end * G
        val = -mod / speed
    nrm = math.sqrt(periodic_trapezoid(val * val * speed))
    return BoundaryTrace(rec, grid, val / nrm, rec.bc, mod / nrm, ser, f_end, df_end, 1.0 / nrm)


def _sample(a, grid):
    if callable(a):
        out = np.asarray(a(grid), dtype=float)
        return np.broadcast_to(out, grid.shape)
    out = np.asarray(a, dtype=float)
    if out.shape != grid.shape:
        raise ValueError("symbol samples must match the trace grid")
    return out


def matrix_element(trace: BoundaryTrace, a, g: EllipseGeometry | None = None) -> float:
    """``int a |u^b|^2 ds / int |u^b|^2 ds`` by the periodic trapezoid rule.

    ``a`` is a callable of ``theta`` or an array sampled on the trace grid.
    The arclength density is recomputed from ``g`` when given, otherwise
    taken from the record's ellipse through the stored trace scaling.
    """
    speed = _speed(trace, g)
    w = trace.values**2 * speed
    return periodic_trapezoid(_sample(a, trace.grid) * w) / periodic_trapezoid(w)


def _speed(trace, g):
    if g is not None:
        return boundary_speed(g, trace.grid)
    # recover speed from the two traces: Dirichlet u^b = -u / speed
    if trace.kind is BC.DIRICHLET:
        with np.errstate(divide="ignore", invalid="ignore"):
            s = -trace.modified_values / trace.values
        ok = np.isfinite(s) & (np.abs(trace.values) > 1e-8 * np.abs(trace.values).max())
        # the speed is a positive trigonometric polynomial; interpolate the gaps
        if not np.all(ok):
            s = np.interp(trace.grid, trace.grid[ok], s[ok], period=TWO_PI)
        return s
    raise ValueError("pass the geometry for Neumann traces")


def apply_op_I(values: np.ndarray, g: EllipseGeometry, hbar: float) -> np.ndarray:
    """``(-(hbar^2/c^2) d^2/dtheta^2 + cos^2 theta) u`` by FFT differentiation."""
    n = values.size
    k = np.fft.rfftfreq(n, d=1.0 / n)
    spec = np.fft.rfft(values)
    d2 = np.fft.irfft(-(k * k) * spec, n)
    grid = np.arange(n) * (TWO_PI / n)
    return -(hbar * hbar / (g.c * g.c)) * d2 + np.cos(grid) ** 2 * values


def op_I_expectation(trace: BoundaryTrace, g: EllipseGeometry, hbar: float | None = None, power: int = 1) -> float:
    """``<Op(I)^power u, u> / <u, u>`` on the modified trace.

    Raises ``GridTooCoarse`` if repeated products with ``cos^2`` would
    alias on the grid.
    """
    if hbar is None:
        hbar = trace.record.hbar
    band = trace.series.bandwidth
    if trace.n_points < 2 * (band + 2 * power) + 2:
        raise GridTooCoarse(f"grid of {trace.n_points} aliases Op(I)^{power}")
    u = trace.modified_values
    v = u
    for _ in range(power):
        v = apply_op_I(v, g, hbar)
    return float(np.dot(v, u) / np.dot(u, u))


# --------------------------------------------------------------------------
# limit measures


def _weight(g, bc):
    bc = BC(bc)
    if bc is BC.DIRICHLET:
        return lambda th: 1.0 / boundary_speed(g, th)
    return lambda th: boundary_speed(g, th)


def _check_level(g, alpha, eps):
    if abs(alpha - 1.0) <= eps:
        raise SeparatrixLevel(f"|alpha - 1| <= {eps} (alpha={alpha})")
    if not (0.0 < alpha <= g.cosh2_max):
        raise OutOfActionInterval(f"alpha={alpha} outside (0, {g.cosh2_max}]")


def limit_measure_integral(
    g: EllipseGeometry, alpha: float, a, bc: BC | str, *, eps: float = EPS_SEP, tol: float = 1e-13
) -> float:
    """``int a d nu_alpha / int d nu_alpha`` on the level ``I = alpha``."""
    _check_level(g, alpha, eps)
    w = _weight(g, bc)
    num = level_integral(g, alpha, lambda th: np.asarray(a(th), dtype=float) * w(th), tol=tol)
    den = level_integral(g, alpha, w, tol=tol)
    return num / den


def limit_measure_integral_qaws(g: EllipseGeometry, alpha: float, a, bc: BC | str, *, eps: float = EPS_SEP) -> float:
    """Same ratio by QUADPACK in ``theta``, with algebraic end weights inside.

    Inside the separatrix each arc ``[t1, pi - t1]`` (and its shift by
    ``pi``) carries the weight ``((t - t1)(t2 - t))^(-1/2)``; the remaining
    factor ``sqrt((t - t1)(t2 - t) / (alpha - cos^2 t))`` is smooth.
    Outside, plain adaptive quadrature over the circle.
    """
    _check_level(g, alpha, eps)
    with warnings.catch_warnings():
        # QUADPACK flags roundoff once it reaches machine precision
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return _qaws_ratio(g, alpha, a, _weight(g, bc))


def _qaws_ratio(g, alpha, a, w):
    opts = dict(epsabs=1e-14, epsrel=1e-13, limit=400)

    def dens(th):
        return float(a(th)) * w(th)

    if alpha > 1.0:
        f_num = lambda th: dens(th) / math.sqrt(alpha - math.cos(th) ** 2)  # noqa: E731
        f_den = lambda th: w(th) / math.sqrt(alpha - math.cos(th) ** 2)  # noqa: E731
        pts = [0.5 * math.pi * k for k in range(1, 4)]
        num = integrate.quad(f_num, 0.0, TWO_PI, points=pts, **opts)[0]
        den = integrate.quad(f_den, 0.0, TWO_PI, points=pts, **opts)[0]
        return num / den
    t1 = math.acos(math.sqrt(alpha))
    num = den = 0.0
    for lo in (t1, math.pi + t1):
        hi = lo + math.pi - 2.0 * t1

        def smooth(th, lo=lo, hi=hi):
            # alpha - cos^2 t = sin(t - t1) sin(t2 - t) on the arc
            x, y = th - lo, hi - th
            fx = x / math.sin(x) if x > 0.0 else 1.0
            fy = y / math.sin(y) if y > 0.0 else 1.0
            return math.sqrt(fx * fy)

        num += integrate.quad(lambda th: dens(th) * smooth(th), lo, hi, weight="alg", wvar=(-0.5, -0.5), **opts)[0]
        den += integrate.quad(lambda th: w(th) * smooth(th), lo, hi, weight="alg", wvar=(-0.5, -0.5), **opts)[0]
    return num / den


def eta_profile(g: EllipseGeometry, alpha: float, grid) -> tuple[np.ndarray, np.ndarray]:
    """``eta = p_theta / speed`` on the positive branch of ``I = alpha``, and ``1 - eta^2``.

    Off the projection of the level (``cos^2 theta > alpha``) ``eta`` is
    set to zero.
    """
    grid = np.asarray(grid, dtype=float)
    co2 = np.cos(grid) ** 2
    speed = boundary_speed(g, grid)
    p = g.c * np.sqrt(np.maximum(alpha - co2, 0.0))
    eta = p / speed
    return eta, 1.0 - eta * eta


# --------------------------------------------------------------------------
# ladder study


@dataclass(frozen=True)
class QuantumLimitRow:
    n: int
    m: int
    lam: float
    alpha: float
    matrix_element: float
    limit: float
    rel_error: float


@dataclass(frozen=True)
class QuantumLimitReport:
    alpha: float
    symbol: str
    bc: BC
    rows: tuple
    slope: float | None
    decreasing: bool


def convergence_study(
    g: EllipseGeometry,
    alpha_target: float,
    a,
    cls: SymmetryClass | str,
    bc: BC | str,
    n_list,
    *,
    symbol: str = "",
    executor=None,
    ladder: Ladder | None = None,
) -> QuantumLimitReport:
    """Matrix elements of ``a`` along a ladder against the limit ``int a d nu_alpha``.

    Relative errors use ``max(|limit|, 0.1)`` in the denominator; the
    trend is the least-squares slope of ``log(error)`` against ``log(n)``.
    A prebuilt ``ladder`` for the same level, class and condition skips
    the eigenvalue solves.
    """
    bc = BC(bc)
    if ladder is None:
        ladder = build_ladder(g, alpha_target, cls, bc, n_list, executor=executor)
    elif ladder.bc is not bc or ladder.alpha_target != float(alpha_target):
        raise ValueError("ladder does not match the requested level and condition")
    limit = limit_measure_integral(g, alpha_target, a, bc)
    rows = []
    for rec in ladder.entries:
        me = matrix_element(boundary_trace(g, rec), a, g)
        err = abs(me - limit) / max(abs(limit), 0.1)
        rows.append(QuantumLimitRow(rec.n, rec.m, rec.lam, rec.alpha, me, limit, err))
    slope = None
    if len(rows) >= 2:
        x = np.log([r.n for r in rows])
        y = np.log([max(r.rel_error, 1e-300) for r in rows])
        slope = float(stats.linregress(x, y).slope)
    return QuantumLimitReport(float(alpha_target), symbol, bc, tuple(rows), slope, bool(slope is not None and slope < 0))
