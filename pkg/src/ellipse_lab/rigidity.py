"""Hadamard variations, the Leray-weighted transform and Abel inversion.

A normal variation ``rhodot`` of the boundary that is invariant under both
axis reflections is a cosine series in ``2 theta``. With ``u = cos^2 theta``
and ``C = cosh^2 rho_max``::

    rhodot(theta) = sum_k c_k cos(2 k theta) = sum_k c_k T_k(2u - 1)
                  = P(u) sqrt(C - u)

On an inside level ``alpha = x^2`` the Leray-weighted transform reduces
to an Abel-type transform,

    int_{I=alpha} rhodot / sqrt(C - cos^2) d mu = 4 c (A f)(x),
    f(u) = P(u^2) / sqrt(1 - u^2),   (A f)(x) = int_0^x f(u) / sqrt(x^2 - u^2) du,

which is inverted by ``(A^-1 g)(u) = (2/pi) d/du int_0^u x g(x) / sqrt(u^2 - x^2) dx``.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import Executor
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import chebyshev as cheb
from scipy import integrate

from .billiard import EPS_SEP, level_integral
from .cauchy import BoundaryTrace, limit_measure_integral
from .errors import KindMismatch, NotSymmetric, SeparatrixLevel
from .geometry import EllipseGeometry, boundary_speed
from .mathieu import BC
from .quadrature import periodic_trapezoid, smooth_quad

ABEL_TOL = 1e-14
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class SymmetricVariation:
    """``rhodot = sum_k coefficients[k] cos(2 k theta)`` on a fixed ellipse.

    Every such series is invariant under ``theta -> -theta`` and
    ``theta -> pi - theta``; arbitrary functions must pass through
    ``from_function`` which rejects anything else.
    """

    coefficients: np.ndarray
    cosh2_max: float = field(default=0.0)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coefficients, dtype=float))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("coefficients must be a non-empty vector")
        object.__setattr__(self, "coefficients", c)

    @property
    def degree(self) -> int:
        return self.coefficients.size - 1

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        return cheb.chebval(np.cos(2.0 * theta), self.coefficients)

    def profile(self, u):
        """``P(u) = rhodot / sqrt(C - u)`` at ``u = cos^2 theta`` in ``[0, 1]``."""
        u = np.asarray(u, dtype=float)
        return cheb.chebval(2.0 * u - 1.0, self.coefficients) / np.sqrt(self.cosh2_max - u)

    @classmethod
    def basis(cls, g: EllipseGeometry, k: int, size: int | None = None) -> "SymmetricVariation":
        c = np.zeros((size or k + 1))
        c[k] = 1.0
        return cls(c, g.cosh2_max)

    @classmethod
    def from_function(cls, g: EllipseGeometry, func, degree: int, *, n_samples: int = 256) -> "SymmetricVariation":
        """Project ``func(theta)`` onto ``cos 2k theta``, ``k <= degree``.

        Raises ``NotSymmetric`` if ``func`` is not invariant under both
        reflections to ``SYMMETRY_TOL`` on a sample grid.
        """
        th = np.arange(n_samples) * (2.0 * math.pi / n_samples)
        v = np.asarray(func(th), dtype=float)
        scale = max(1.0, float(np.abs(v).max()))
        for img in (-th, math.pi - th):
            if np.abs(np.asarray(func(img), dtype=float) - v).max() > SYMMETRY_TOL * scale:
                raise NotSymmetric("variation is not invariant under both axis reflections")
        spec = np.fft.rfft(v) / n_samples
        coef = np.zeros(degree + 1)
        for k in range(degree + 1):
            if 2 * k < spec.size:
                coef[k] = spec[2 * k].real * (1.0 if k == 0 else 2.0)
        return cls(coef, g.cosh2_max)

    @classmethod
    def from_profile(cls, g: EllipseGeometry, P, degree: int) -> "SymmetricVariation":
        """Chebyshev interpolant of ``P(u) sqrt(C - u)`` in ``x = 2u - 1``."""
        C = g.cosh2_max
        coef = cheb.chebinterpolate(lambda x: P(0.5 * (x + 1.0)) * np.sqrt(C - 0.5 * (x + 1.0)), degree)
        return cls(coef, C)


def _as_variation(g, rhodot) -> SymmetricVariation:
    if isinstance(rhodot, SymmetricVariation):
        if rhodot.cosh2_max == 0.0:
            return SymmetricVariation(rhodot.coefficients, g.cosh2_max)
        return rhodot
    return SymmetricVariation(np.asarray(rhodot, dtype=float), g.cosh2_max)


# --------------------------------------------------------------------------
# Hadamard variational integrals


def hadamard_dirichlet(trace: BoundaryTrace, rhodot: SymmetricVariation, g: EllipseGeometry) -> float:
    """``lambda^2 int rhodot |u^b|^2 ds`` for a normalized Dirichlet trace."""
    if trace.kind is not BC.DIRICHLET:
        raise KindMismatch("hadamard_dirichlet needs a Dirichlet trace")
    speed = boundary_speed(g, trace.grid)
    w = trace.values**2 * speed
    lam2 = trace.record.lam**2
    return lam2 * periodic_trapezoid(rhodot(trace.grid) * w) / periodic_trapezoid(w)


def tangential_derivative(values: np.ndarray, speed: np.ndarray) -> np.ndarray:
    """``(1/speed) d/dtheta`` of periodic samples by FFT."""
    n = values.size
    k = np.fft.rfftfreq(n, d=1.0 / n)
    spec = np.fft.rfft(values)
    if n % 2 == 0:
        spec[-1] = 0.0
    return np.fft.irfft(1j * k * spec, n) / speed


def hadamard_neumann(trace: BoundaryTrace, rhodot: SymmetricVariation, g: EllipseGeometry, rec=None) -> float:
    """``int (|d_s phi|^2 - lambda^2 phi^2) rhodot ds`` for a normalized Neumann trace."""
    if trace.kind is not BC.NEUMANN:
        raise KindMismatch("hadamard_neumann needs a Neumann trace")
    rec = rec or trace.record
    speed = boundary_speed(g, trace.grid)
    phi = trace.values
    ds_phi = tangential_derivative(phi, speed)
    lam2 = rec.lam**2
    return periodic_trapezoid((ds_phi**2 - lam2 * phi**2) * rhodot(trace.grid) * speed)


# --------------------------------------------------------------------------
# Leray-weighted transform and its limits


def radon_leray(g: EllipseGeometry, alpha: float, rhodot, *, eps: float = EPS_SEP, tol: float = 1e-13) -> float:
    """``int_{I=alpha} rhodot / sqrt(C - cos^2 theta) d mu_alpha``.

    Raises ``SeparatrixLevel`` within ``eps`` of ``alpha = 1``.
    """
    if abs(alpha - 1.0) <= eps:
        raise SeparatrixLevel(f"|alpha - 1| <= {eps} (alpha={alpha})")
    var = _as_variation(g, rhodot)
    C = g.cosh2_max
    if not np.any(var.coefficients):
        return 0.0
    return level_integral(g, alpha, lambda th: var(th) / np.sqrt(C - np.cos(th) ** 2), tol=tol)


def dirichlet_limit(g: EllipseGeometry, alpha: float, rhodot, *, eps: float = EPS_SEP) -> float:
    """Limit of ``hadamard_dirichlet / lambda^2``: ``int rhodot d nu_D`` (normalized)."""
    var = _as_variation(g, rhodot)
    return limit_measure_integral(g, alpha, var, BC.DIRICHLET, eps=eps)


def neumann_limit(g: EllipseGeometry, alpha: float, rhodot, *, eps: float = EPS_SEP) -> float:
    """Limit of ``hadamard_neumann / lambda^2``.

    On the level the tangential frequency is ``eta = c sqrt(alpha - cos^2) / speed``
    and ``speed^2 = c^2 (C - cos^2)``, so ``eta^2 - 1 = c^2 (alpha - C) / speed^2``
    and the limit is ``(alpha - C) c^2 int rhodot d mu / speed / int speed d mu``.
    The first integral is ``radon_leray / c``.
    """
    var = _as_variation(g, rhodot)
    C = g.cosh2_max
    num = g.c * radon_leray(g, alpha, var, eps=eps)
    den = level_integral(g, alpha, lambda th: boundary_speed(g, th))
    return (alpha - C) * num / den


# --------------------------------------------------------------------------
# Abel transform


def abel_forward(f, x: float, *, tol: float = ABEL_TOL) -> float:
    """``(A f)(x) = int_0^x f(u) / sqrt(x^2 - u^2) du`` via ``u = x sin t``."""
    if x <= 0.0:
        return 0.0
    val, _ = smooth_quad(lambda t: np.asarray(f(x * np.sin(t)), dtype=float), 0.0, 0.5 * math.pi, tol=tol)
    return val


def _abel_inner(gfun, u: float, tol: float) -> float:
    # int_0^u x g(x) / sqrt(u^2 - x^2) dx = u int_0^{pi/2} sin t g(u sin t) dt
    if u <= 0.0:
        return 0.0
    val, _ = smooth_quad(
        lambda t: np.sin(t) * np.asarray(gfun(u * np.sin(t)), dtype=float), 0.0, 0.5 * math.pi, tol=tol
    )
    return u * val


def abel_inverse(gfun, u: float, *, tol: float = ABEL_TOL, upper: float = 1.0) -> float:
    """``(2/pi) d/du int_0^u x g(x) / sqrt(u^2 - x^2) dx``.

    The derivative is a central difference with step ``tol^(1/3) u``,
    switched to a second-order backward stencil when ``u + h`` would leave
    the domain ``[0, upper]`` of ``g``.
    """
    h = tol ** (1.0 / 3.0) * max(u, 1e-3)
    G = lambda s: _abel_inner(gfun, s, tol)  # noqa: E731
    if u + h <= upper:
        d = (G(u + h) - G(u - h)) / (2.0 * h)
    else:
        d = (3.0 * G(u) - 4.0 * G(u - h) + G(u - 2.0 * h)) / (2.0 * h)
    return 2.0 / math.pi * d


def abel_identity(u: float, v: float) -> float:
    """``I(u, v) = int_v^u x dx / (sqrt(u^2 - x^2) sqrt(x^2 - v^2))``, equal to ``pi/2``."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, _ = integrate.quad(
            lambda x: x / math.sqrt((u + x) * (x + v)) if x + v > 0.0 else 1.0 / math.sqrt(u),
            v, u, weight="alg", wvar=(-0.5, -0.5), epsabs=1e-14, epsrel=1e-14, limit=200,
        )
    return val


# --------------------------------------------------------------------------
# injectivity tests


@dataclass(frozen=True)
class KernelReport:
    alphas: np.ndarray
    matrix: np.ndarray
    singular_values: np.ndarray
    sigma_min: float
    planted: np.ndarray
    recovered: np.ndarray
    reconstruction_error: float
    abel_error: float | None


def _default_alpha_grid(lo, hi, M):
    # Chebyshev points of the interval avoid endpoint clustering of a uniform fit
    k = np.arange(M)
    x = np.cos(math.pi * (2 * k + 1) / (2 * M))[::-1]
    return lo + 0.5 * (x + 1.0) * (hi - lo)


def transform_matrix(g: EllipseGeometry, alphas, K: int, *, executor: Executor | None = None) -> np.ndarray:
    """``T[i, j] = radon_leray(alpha_i, cos 2 j theta)`` for ``j < K``."""
    alphas = np.asarray(alphas, dtype=float)
    jobs = [(al, j) for al in alphas for j in range(K)]
    run = lambda aj: radon_leray(g, aj[0], SymmetricVariation.basis(g, aj[1], K))  # noqa: E731
    vals = list(executor.map(run, jobs)) if executor is not None else [run(j) for j in jobs]
    return np.array(vals).reshape(alphas.size, K)


def planted_coefficients(g: EllipseGeometry, K: int) -> np.ndarray:
    """Cosine coefficients of ``P(u) = 1 - u``, truncated to ``K`` terms."""
    return SymmetricVariation.from_profile(g, lambda u: 1.0 - u, K - 1).coefficients


def kernel_test_inside(
    g: EllipseGeometry,
    K: int,
    M: int | None = None,
    *,
    eps: float = EPS_SEP,
    planted: np.ndarray | None = None,
    abel_check: bool = True,
    executor: Executor | None = None,
) -> KernelReport:
    """Numerical injectivity of the Leray-weighted transform on inside levels.

    Assembles ``T`` on ``M >= 2K`` Chebyshev-distributed levels in
    ``(eps, 1 - eps)``, reports the singular values of the column-normalized
    matrix, and reconstructs a planted variation from its transform values
    by least squares. With ``abel_check`` the planted profile ``P = 1 - u``
    is also recovered pointwise through the Abel inversion.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    M = M or 2 * K
    if M < 2 * K:
        raise ValueError("M must be at least 2K")
    alphas = _default_alpha_grid(eps, 1.0 - eps, M)
    T = transform_matrix(g, alphas, K, executor=executor)
    norms = np.linalg.norm(T, axis=0)
    sv = np.linalg.svd(T / norms, compute_uv=False)
    c_true = planted_coefficients(g, K) if planted is None else np.asarray(planted, dtype=float)
    rhs = T @ c_true
    c_rec = np.linalg.lstsq(T / norms, rhs, rcond=None)[0] / norms
    th = np.linspace(0.0, 0.5 * math.pi, 201)
    err = float(np.abs(cheb.chebval(np.cos(2 * th), c_rec - c_true)).max())
    abel_err = abel_pipeline_error(g) if abel_check else None
    return KernelReport(alphas, T, sv, float(sv[-1]), c_true, c_rec, err, abel_err)


def abel_pipeline_error(g: EllipseGeometry, P=lambda u: 1.0 - u, us=None, *, eps: float = EPS_SEP) -> float:
    """Recover ``P`` from inside transform values through the Abel inverse.

    The exact variation ``rhodot = P(cos^2) sqrt(C - cos^2)`` is pushed
    through ``radon_leray``; ``g(x) = radon_leray(x^2) / (4c)`` equals
    ``A f`` with ``f(u) = P(u^2) / sqrt(1 - u^2)``, so ``A^-1 g`` gives back
    ``P`` pointwise. Returns the sup error on ``us``.
    """
    C = g.cosh2_max

    class _Exact:
        def __call__(self, th):
            co2 = np.cos(th) ** 2
            return P(co2) * np.sqrt(C - co2)

    exact = _Exact()

    def gfun(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(x)
        for i, xi in enumerate(x):
            al = xi * xi
            out[i] = 0.0 if al <= 0.0 else _radon_exact(g, al, exact) / (4.0 * g.c)
        return out

    if us is None:
        us = np.linspace(0.05, 0.95, 19)
    errs = []
    for u in us:
        f = abel_inverse(gfun, float(u), tol=1e-13, upper=math.sqrt(1.0 - eps))
        errs.append(abs(f * math.sqrt(1.0 - u * u) - P(u * u)))
    return float(max(errs))


def _radon_exact(g, alpha, func):
    C = g.cosh2_max
    return level_integral(g, alpha, lambda th: func(th) / np.sqrt(C - np.cos(th) ** 2))


@dataclass(frozen=True)
class MomentReport:
    moments: np.ndarray
    errors: np.ndarray

    @property
    def significant(self) -> bool:
        return bool(np.any(np.abs(self.moments) > 10.0 * self.errors))


def moment_test_outside(g: EllipseGeometry, f, n_max: int) -> MomentReport:
    """``M_n = int_0^1 f(u) (C - u)^(-n - 1/2) du`` for ``n = 0..n_max``."""
    C = g.cosh2_max
    mom = np.zeros(n_max + 1)
    err = np.zeros(n_max + 1)
    for n in range(n_max + 1):
        v, e = integrate.quad(lambda u: f(u) * (C - u) ** (-n - 0.5), 0.0, 1.0, epsabs=1e-15, epsrel=1e-13, limit=200)
        mom[n], err[n] = v, max(e, 1e-16 * abs(v))
    return MomentReport(mom, err)
