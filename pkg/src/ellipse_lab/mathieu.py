"""Angular and radial Mathieu problems in semiclassical form.

With ``h = hbar^2 / c^2`` the separated equations are::

    -h G''(theta) + cos^2(theta) G = alpha G      (2 pi periodic)
     h F''(rho)   + cosh^2(rho)  F = alpha F      (0 <= rho <= rho_max)

The angular values ``a'_n`` (``G`` even in ``theta``) and ``b'_n`` (odd)
relate to the standard Mathieu numbers by ``alpha = 1/2 + a/(4q)`` with
``q = c^2 / (4 hbar^2)``.

Angular problem: Galerkin projection on the four trigonometric symmetry
subspaces gives symmetric tridiagonal matrices. Radial problem: Chebyshev
collocation in a parity-adapted basis that satisfies the boundary
condition at ``rho_max`` exactly. Both have a phase-function (Prufer)
shooting solver used as an independent check.

Index conventions
-----------------
Angular ``n`` is the usual Mathieu order: ``G`` has ``n`` zeros on
``[0, 2 pi)``. Radial ``m`` counts the zeros of ``F`` on ``[0, rho_max)``,
the origin included, so odd radial modes start at ``m = 1``. Radial values
*decrease* with ``m``: more oscillation needs a larger ``cosh^2 - alpha``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy import integrate, linalg, optimize

from .errors import (
    GridTooCoarse,
    NotACharacteristicValue,
    ShootingBracketFailed,
    TruncationNotConverged,
)
from .geometry import EllipseGeometry
from .quadrature import gauss_legendre

EIG_TOL = 1e-11
MAX_BASIS = 4096
MAX_COLLOCATION = 1024
BC_TOL = 1e-9
PRUFER_RTOL = 1e-12


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


class BC(str, Enum):
    DIRICHLET = "dirichlet"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class AngularMode:
    """Angular mode; ``parity_y`` is the parity of ``G`` under ``theta -> -theta``."""

    parity_y: Parity
    n: int

    def __post_init__(self):
        object.__setattr__(self, "parity_y", Parity(self.parity_y))
        lo = 0 if self.parity_y is Parity.EVEN else 1
        if int(self.n) != self.n or self.n < lo:
            raise ValueError(f"angular index must be an integer >= {lo}, got {self.n}")

    @property
    def parity_x(self) -> Parity:
        """Parity of ``G`` under ``theta -> pi - theta`` (the reflection ``x -> -x``)."""
        flip = self.n % 2 == 1
        if self.parity_y is Parity.ODD:
            flip = not flip
        return Parity.ODD if flip else Parity.EVEN

    @property
    def pi_periodic(self) -> bool:
        return self.n % 2 == 0


@dataclass(frozen=True)
class RadialMode:
    """Radial mode; ``parity`` matches the angular ``parity_y``."""

    parity: Parity
    m: int
    bc: BC = BC.DIRICHLET

    def __post_init__(self):
        object.__setattr__(self, "parity", Parity(self.parity))
        object.__setattr__(self, "bc", BC(self.bc))
        lo = 0 if self.parity is Parity.EVEN else 1
        if int(self.m) != self.m or self.m < lo:
            raise ValueError(f"radial index must be an integer >= {lo}, got {self.m}")

    @property
    def position(self) -> int:
        """Position in the decreasing list of values of this family."""
        return self.m if self.parity is Parity.EVEN else self.m - 1


@dataclass(frozen=True)
class CharacteristicValue:
    hbar: float
    alpha: float
    family: str
    index: int


# --------------------------------------------------------------------------
# angular Galerkin


def _family(parity_y: Parity, n: int) -> tuple[str, int, int]:
    """(kind, frequency offset, position) of an angular mode in its subspace."""
    if parity_y is Parity.EVEN:
        return ("cos", n % 2, n // 2)
    if n % 2 == 1:
        return ("sin", 1, n // 2)
    return ("sin", 2, n // 2 - 1)


def _tridiagonal(kind: str, offset: int, size: int, curv: float, mean: float, coup: float):
    # operator  -curv d^2 + mean + 2 coup cos 2 theta  on {cos|sin (offset + 2k) theta}
    freq = offset + 2.0 * np.arange(size)
    diag = curv * freq * freq + mean
    off = np.full(size - 1, float(coup))
    if kind == "cos" and offset == 0 and size > 1:
        off[0] *= math.sqrt(2.0)
    if offset == 1:
        diag[0] += coup if kind == "cos" else -coup
    return diag, off, freq


def _tridiagonal_eig(kind, offset, pos, curv, mean, coup, scale, vectors=False):
    size = max(32, 2 * (pos + 16))
    prev = None
    while size <= MAX_BASIS:
        diag, off, freq = _tridiagonal(kind, offset, size, curv, mean, coup)
        if vectors:
            w, v = linalg.eigh_tridiagonal(diag, off, select="i", select_range=(pos, pos))
        else:
            w = linalg.eigh_tridiagonal(diag, off, eigvals_only=True, select="i", select_range=(pos, pos))
            v = None
        val = float(w[0])
        if prev is not None and abs(val - prev) < EIG_TOL * max(1.0, abs(val) / scale):
            return val, (v[:, 0] if vectors else None), freq
        prev = val
        size *= 2
    raise TruncationNotConverged(f"Galerkin truncation did not settle below {MAX_BASIS} modes")


@lru_cache(maxsize=65536)
def _angular_cached(a: float, b: float, hbar: float, parity_y: str, n: int) -> float:
    c2 = (a - b) * (a + b)
    kind, offset, pos = _family(Parity(parity_y), n)
    val, _, _ = _tridiagonal_eig(kind, offset, pos, hbar * hbar / c2, 0.5, 0.25, 1.0)
    return val


def angular_characteristic(g: EllipseGeometry, hbar: float, mode: AngularMode) -> float:
    """``a'_n(hbar)`` (even mode) or ``b'_n(hbar)`` (odd mode)."""
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    return _angular_cached(g.a, g.b, float(hbar), mode.parity_y.value, int(mode.n))


def mathieu_a(n: int, q: float) -> float:
    """Standard characteristic number ``a_n(q)`` from the Galerkin matrix."""
    kind, offset, pos = _family(Parity.EVEN, n)
    val, _, _ = _tridiagonal_eig(kind, offset, pos, 1.0, 0.0, q, 1.0)
    return val


def mathieu_b(n: int, q: float) -> float:
    """Standard characteristic number ``b_n(q)``, ``n >= 1``."""
    if n < 1:
        raise ValueError("b_n needs n >= 1")
    kind, offset, pos = _family(Parity.ODD, n)
    val, _, _ = _tridiagonal_eig(kind, offset, pos, 1.0, 0.0, q, 1.0)
    return val


def standard_from_alpha(alpha: float, q: float) -> float:
    """``a = 4 q (alpha - 1/2)``."""
    return 4.0 * q * (alpha - 0.5)


def alpha_from_standard(a: float, q: float) -> float:
    """``alpha = 1/2 + a / (4 q)``."""
    return 0.5 + a / (4.0 * q)


def q_parameter(g: EllipseGeometry, hbar: float) -> float:
    return g.c * g.c / (4.0 * hbar * hbar)


@dataclass(frozen=True)
class AngularSeries:
    """Truncated Fourier series of ``G``; unit norm in ``L^2(0, 2 pi)``."""

    mode: AngularMode
    hbar: float
    alpha: float
    kind: str
    freqs: np.ndarray
    coeffs: np.ndarray

    @property
    def bandwidth(self) -> int:
        big = np.nonzero(np.abs(self.coeffs) > 1e-17)[0]
        return int(self.freqs[big[-1]]) if big.size else 0

    def __call__(self, theta, deriv: int = 0):
        theta = np.asarray(theta, dtype=float)
        w = np.where(self.freqs == 0, 1.0 / math.sqrt(2.0 * math.pi), 1.0 / math.sqrt(math.pi))
        ph = np.multiply.outer(theta, self.freqs)
        # d^k/dtheta^k cos(f x) = f^k cos(f x + k pi/2)
        shift = 0.5 * math.pi * deriv
        if self.kind == "cos":
            basis = np.cos(ph + shift)
        else:
            basis = np.sin(ph + shift)
        return basis @ (self.coeffs * w * self.freqs**deriv)


def angular_series(g: EllipseGeometry, hbar: float, mode: AngularMode) -> AngularSeries:
    kind, offset, pos = _family(mode.parity_y, mode.n)
    val, vec, freq = _tridiagonal_eig(kind, offset, pos, hbar * hbar / g.c**2, 0.5, 0.25, 1.0, vectors=True)
    # sign: the dominant coefficient is positive
    if vec[np.argmax(np.abs(vec))] < 0:
        vec = -vec
    return AngularSeries(mode, float(hbar), val, kind, freq, vec)


def angular_eigenfunction(g: EllipseGeometry, hbar: float, mode: AngularMode, grid) -> np.ndarray:
    """Values of ``G`` on a ``theta`` grid, normalized in ``L^2(0, 2 pi)``.

    Raises ``GridTooCoarse`` when the grid has fewer than ``20 (n + 1)``
    points.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 20 * (mode.n + 1):
        raise GridTooCoarse(f"need >= {20 * (mode.n + 1)} points for n={mode.n}, got {grid.size}")
    return angular_series(g, hbar, mode)(grid)


# --------------------------------------------------------------------------
# extended precision for exponentially small splittings


def _sturm_eig_mp(diag, off, pos, mp):
    """``pos``-th eigenvalue of a symmetric tridiagonal matrix by Sturm bisection."""
    n = len(diag)
    e2 = [x * x for x in off]
    rad = [abs(off[i - 1]) if i else mp.zero for i in range(n)]
    for i in range(n - 1):
        rad[i] += abs(off[i])
    lo = min(diag[i] - rad[i] for i in range(n))
    hi = max(diag[i] + rad[i] for i in range(n))
    tiny = mp.mpf(10) ** (-2 * mp.dps)

    def below(x):
        cnt = 0
        q = diag[0] - x
        for i in range(n):
            if i:
                q = diag[i] - x - e2[i - 1] / q
            if q == 0:
                q = -tiny
            if q < 0:
                cnt += 1
        return cnt

    eps = mp.mpf(10) ** (-mp.dps + 3) * max(abs(lo), abs(hi), mp.one)
    while hi - lo > eps:
        mid = (lo + hi) / 2
        if below(mid) > pos:
            hi = mid
        else:
            lo = mid
    return (lo + hi) / 2


def angular_characteristic_mp(g: EllipseGeometry, hbar: float, mode: AngularMode, dps: int = 60):
    """Angular value as an ``mpmath.mpf`` with about ``dps - 10`` correct digits.

    Used where neighbouring values differ by less than double-precision
    spacing (the tunnelling pairs ``a'_n``, ``b'_{n+1}`` inside the
    separatrix at small ``hbar``).
    """
    import mpmath

    with mpmath.workdps(dps):
        kind, offset, pos = _family(mode.parity_y, mode.n)
        curv = mpmath.mpf(hbar) ** 2 / (mpmath.mpf(g.a) ** 2 - mpmath.mpf(g.b) ** 2)
        size = max(32, 2 * (pos + 16))
        prev = None
        while size <= MAX_BASIS:
            freq = [offset + 2 * k for k in range(size)]
            diag = [curv * f * f + mpmath.mpf(1) / 2 for f in freq]
            off = [mpmath.mpf(1) / 4] * (size - 1)
            if kind == "cos" and offset == 0:
                off[0] = mpmath.sqrt(2) / 4
            if offset == 1:
                diag[0] += mpmath.mpf(1) / 4 if kind == "cos" else -mpmath.mpf(1) / 4
            val = _sturm_eig_mp(diag, off, pos, mpmath.mp)
            if prev is not None and abs(val - prev) < mpmath.mpf(10) ** (-dps + 8):
                return +val
            prev = val
            size *= 2
    raise TruncationNotConverged("extended-precision truncation did not settle")


def pairing_gap(g: EllipseGeometry, hbar: float, n: int, dps: int = 60) -> float:
    """``b'_{n+1}(hbar) - a'_n(hbar)`` resolved in extended precision."""
    import mpmath

    with mpmath.workdps(dps):
        a = angular_characteristic_mp(g, hbar, AngularMode(Parity.EVEN, n), dps)
        b = angular_characteristic_mp(g, hbar, AngularMode(Parity.ODD, n + 1), dps)
        return float(b - a)


# --------------------------------------------------------------------------
# Prufer phase shooting (oracle)


def _prufer_end(qfun, x1: float, theta0: float, scale: float, rtol: float = PRUFER_RTOL) -> float:
    """Phase at ``x1`` of ``y'' + Q y = 0`` with ``y = R sin th``, ``y' = scale R cos th``."""

    def rhs(x, th):
        s, co = math.sin(th[0]), math.cos(th[0])
        return [scale * co * co + qfun(x) / scale * s * s]

    sol = integrate.solve_ivp(rhs, (0.0, x1), [theta0], method="DOP853", rtol=rtol, atol=rtol)
    if not sol.success:
        raise ShootingBracketFailed(sol.message)
    return float(sol.y[0, -1])


def _phase_targets(start_even: bool, end_dirichlet: bool, k: int) -> tuple[float, float]:
    """Initial phase and the terminal phase of the k-th state (k = 0, 1, ...)."""
    th0 = 0.5 * math.pi if start_even else 0.0
    # k interior zeros, then a zero (Dirichlet) or an extremum (Neumann) at the end
    end = (k + 1) * math.pi if end_dirichlet else 0.5 * math.pi + k * math.pi
    return th0, end


def _shoot(phase, target: float, lo: float, hi: float, increasing: bool, xtol: float) -> float:
    # phase(.) is monotone; expand the bracket until it straddles target
    f = (lambda v: phase(v) - target) if increasing else (lambda v: target - phase(v))
    for _ in range(60):
        if f(lo) < 0:
            break
        width = hi - lo
        lo -= max(width, 1.0)
    else:
        raise ShootingBracketFailed("could not bracket from below")
    for _ in range(60):
        if f(hi) > 0:
            break
        width = hi - lo
        hi += max(width, 1.0)
    else:
        raise ShootingBracketFailed("could not bracket from above")
    return optimize.brentq(f, lo, hi, xtol=xtol, rtol=1e-15, maxiter=200)


def _quarter_bc(parity_y: Parity, n: int) -> tuple[bool, bool, int]:
    # boundary conditions of G on [0, pi/2]: (even at 0, Dirichlet at pi/2, k)
    even0 = parity_y is Parity.EVEN
    if even0:
        return True, n % 2 == 1, n // 2
    return False, n % 2 == 0, (n - 1) // 2 if n % 2 == 1 else n // 2 - 1


def mathieu_shooting(kind: str, n: int, q: float, *, xtol: float = 1e-13) -> float:
    """``a_n(q)`` (``kind='a'``) or ``b_n(q)`` (``'b'``) by Prufer shooting on a quarter period."""
    parity = Parity.EVEN if kind == "a" else Parity.ODD
    even0, dir_end, k = _quarter_bc(parity, n)
    th0, target = _phase_targets(even0, dir_end, k)
    scale = math.sqrt(max(1.0, 2.0 * abs(q)) + n * n)

    def phase(a):
        return _prufer_end(lambda x: a - 2.0 * q * math.cos(2.0 * x), 0.5 * math.pi, th0, scale)

    guess = n * n - 2.0 * abs(q)
    return _shoot(phase, target, guess - 2.0, guess + 2.0 + 2.0 * abs(q), True, xtol)


def angular_characteristic_shooting(g: EllipseGeometry, hbar: float, mode: AngularMode) -> float:
    """Angular value from Prufer shooting in the ``alpha`` form."""
    q = q_parameter(g, hbar)
    a = mathieu_shooting("a" if mode.parity_y is Parity.EVEN else "b", mode.n, q)
    return alpha_from_standard(a, q)


def angular_phase_index(g: EllipseGeometry, hbar: float, parity_y: Parity, alpha: float, n_parity: int) -> float:
    """Continuous angular index: equals ``n`` at ``alpha = a'_n`` (or ``b'_n``).

    Within one quarter-period family the phase grows by ``pi`` per state
    and ``n`` by 2.
    """
    parity_y = Parity(parity_y)
    base = n_parity if parity_y is Parity.EVEN else (1 if n_parity == 1 else 2)
    even0, dir_end, k0 = _quarter_bc(parity_y, base)
    th0, t0 = _phase_targets(even0, dir_end, k0)
    h = hbar * hbar / g.c**2
    scale = math.sqrt(max(abs(alpha), 1.0) / h)
    th = _prufer_end(lambda x: (alpha - math.cos(x) ** 2) / h, 0.5 * math.pi, th0, scale)
    return base + 2.0 * (th - t0) / math.pi


# --------------------------------------------------------------------------
# radial problem


def _radial_basis(parity: Parity, bc: BC, size: int, x: np.ndarray):
    """Values and second x-derivatives of the boundary-adapted basis at ``x``."""
    p = 0 if parity is Parity.EVEN else 1
    degs = p + 2 * np.arange(size + 1)
    t = np.arccos(x)[:, None]
    d = degs[None, :].astype(float)
    st, ct = np.sin(t), np.cos(t)
    val = np.cos(d * t)
    d2 = (d * np.sin(d * t) * ct - d * d * np.cos(d * t) * st) / st**3
    if bc is BC.DIRICHLET:
        # T_{d_{k+1}} - T_{d_k} vanishes at x = 1
        return val[:, 1:] - val[:, :-1], d2[:, 1:] - d2[:, :-1]
    # Neumann: T_d'(1) = d^2, so T_d / d^2 differences have zero slope
    w = np.where(degs > 0, 1.0 / np.maximum(degs, 1) ** 2, 0.0)
    if p == 0:
        v = np.concatenate([val[:, :1], val[:, 2:] * w[2:] - val[:, 1:-1] * w[1:-1]], axis=1)
        s = np.concatenate([d2[:, :1], d2[:, 2:] * w[2:] - d2[:, 1:-1] * w[1:-1]], axis=1)
        return v, s
    return val[:, 1:] * w[1:] - val[:, :-1] * w[:-1], d2[:, 1:] * w[1:] - d2[:, :-1] * w[:-1]


def _radial_derivative_at(parity: Parity, bc: BC, size: int, x: float, order: int) -> np.ndarray:
    # first derivative (order=1) or value (order=0) of the basis at a single x, stable at x = 1, 0
    p = 0 if parity is Parity.EVEN else 1
    degs = p + 2 * np.arange(size + 1)
    cheb = np.polynomial.chebyshev
    raw = np.empty(size + 1)
    for i, d in enumerate(degs):
        coef = np.zeros(d + 1)
        coef[d] = 1.0
        raw[i] = cheb.chebval(x, cheb.chebder(coef, order) if order else coef)
    if bc is BC.DIRICHLET:
        return raw[1:] - raw[:-1]
    w = np.where(degs > 0, 1.0 / np.maximum(degs, 1) ** 2, 0.0)
    if p == 0:
        return np.concatenate([raw[:1], raw[2:] * w[2:] - raw[1:-1] * w[1:-1]])
    return raw[1:] * w[1:] - raw[:-1] * w[:-1]


@lru_cache(maxsize=4096)
def _collocation(a: float, b: float, hbar: float, parity: str, bc: str, size: int):
    g = EllipseGeometry(a, b)
    parity, bc = Parity(parity), BC(bc)
    x = np.cos((2.0 * np.arange(1, size + 1) - 1.0) * math.pi / (4.0 * size))
    val, d2 = _radial_basis(parity, bc, size, x)
    h = hbar * hbar / (g.c * g.c)
    A = h / g.rho_max**2 * d2 + (np.cosh(g.rho_max * x) ** 2)[:, None] * val
    w, vr = linalg.eig(A, val)
    keep = np.isfinite(w)
    w, vr = w[keep], vr[:, keep]
    order = np.argsort(-w.real)
    w, vr = w[order], vr[:, order]
    w.setflags(write=False)
    vr.setflags(write=False)
    return w, vr


def _radial_solve(g: EllipseGeometry, hbar: float, mode: RadialMode, vectors: bool = False):
    pos = mode.position
    size = max(32, 2 * (pos + 12))
    prev = None
    while size <= MAX_COLLOCATION:
        w, vr = _collocation(g.a, g.b, float(hbar), mode.parity.value, mode.bc.value, size)
        if pos >= w.size:
            size *= 2
            continue
        val = w[pos]
        if abs(val.imag) > 1e-8 * max(1.0, abs(val.real)):
            prev = None
            size *= 2
            continue
        val = float(val.real)
        if prev is not None and abs(val - prev[0]) < EIG_TOL * max(1.0, abs(val)):
            if vectors:
                return prev[0], prev[1], prev[2]
            return prev[0]
        prev = (val, np.real(vr[:, pos]), size)
        size *= 2
    raise TruncationNotConverged(f"radial collocation did not settle below {MAX_COLLOCATION} nodes")


@lru_cache(maxsize=65536)
def _radial_cached(a: float, b: float, hbar: float, parity: str, m: int, bc: str) -> float:
    return _radial_solve(EllipseGeometry(a, b), hbar, RadialMode(parity, m, bc))


def radial_characteristic(g: EllipseGeometry, hbar: float, mode: RadialMode) -> float:
    """``A'_m(hbar)`` (even ``F``) or ``B'_m(hbar)`` (odd ``F``) by collocation."""
    if not hbar > 0:
        raise ValueError("hbar must be positive")
    return _radial_cached(g.a, g.b, float(hbar), mode.parity.value, int(mode.m), mode.bc.value)


def _radial_theta0(mode_parity: Parity) -> float:
    return 0.5 * math.pi if mode_parity is Parity.EVEN else 0.0


def _radial_target(mode: RadialMode) -> float:
    # terminal Prufer phase of the mode; zeros on [0, rho_max) counted by m
    m = mode.m
    if mode.parity is Parity.EVEN:
        return (m + 1) * math.pi if mode.bc is BC.DIRICHLET else 0.5 * math.pi + m * math.pi
    return m * math.pi if mode.bc is BC.DIRICHLET else (m - 0.5) * math.pi


def _radial_phase(g: EllipseGeometry, hbar: float, parity: Parity, alpha: float) -> float:
    h = hbar * hbar / g.c**2
    scale = math.sqrt((abs(g.cosh2_max - alpha) + 1.0) / h)
    return _prufer_end(
        lambda r: (math.cosh(r) ** 2 - alpha) / h, g.rho_max, _radial_theta0(parity), scale
    )


def radial_phase_index(g: EllipseGeometry, hbar: float, parity: Parity, bc: BC, alpha: float) -> float:
    """Continuous radial index: equals ``m`` at the characteristic value of mode ``m``."""
    parity, bc = Parity(parity), BC(bc)
    m0 = 0 if parity is Parity.EVEN else 1
    t0 = _radial_target(RadialMode(parity, m0, bc))
    return m0 + (_radial_phase(g, hbar, parity, alpha) - t0) / math.pi


def radial_characteristic_shooting(g: EllipseGeometry, hbar: float, mode: RadialMode, *, xtol: float = 1e-13) -> float:
    """Radial value by Prufer shooting; the terminal phase decreases with ``alpha``."""
    target = _radial_target(mode)
    top = g.cosh2_max
    return _shoot(
        lambda al: _radial_phase(g, hbar, mode.parity, al), target, top - 1.0, top + 1.0, False, xtol
    )


def _radial_norm(coefs, parity, bc, size, rho_max):
    x, w = gauss_legendre(max(64, 4 * size))
    xs = 0.5 * (x + 1.0)
    val, _ = _radial_basis(parity, bc, size, xs)
    f = val @ coefs
    return math.sqrt(0.5 * rho_max * float(np.dot(w, f * f)))


def radial_eigenfunction(
    g: EllipseGeometry,
    hbar: float,
    mode: RadialMode,
    alpha: float,
    grid,
    *,
    method: str = "collocation",
):
    """``(F on grid, F(rho_max), F'(rho_max))`` with ``int_0^rho_max F^2 = 1``.

    ``F(0) > 0`` for even modes and ``F'(0) > 0`` for odd ones.
    ``method='shooting'`` integrates the amplitude equation from the
    origin instead of using the collocation eigenvector.

    Raises
    ------
    NotACharacteristicValue
        If ``alpha`` is not the value of ``mode`` at ``hbar``, detected by
        the boundary residual (shooting) or by the collocated spectrum.
    """
    grid = np.asarray(grid, dtype=float)
    if method == "shooting":
        return _radial_shooting_profile(g, hbar, mode, alpha, grid)
    if method != "collocation":
        raise ValueError(f"unknown method {method!r}")
    val, coefs, size = _radial_solve(g, hbar, mode, vectors=True)
    if abs(val - alpha) > 1e-8 * max(1.0, abs(alpha)):
        raise NotACharacteristicValue(f"alpha={alpha} but mode value is {val}")
    coefs = coefs / _radial_norm(coefs, mode.parity, mode.bc, size, g.rho_max)
    # orientation at the origin
    d0 = _radial_derivative_at(mode.parity, mode.bc, size, 0.0, 0 if mode.parity is Parity.EVEN else 1)
    if float(d0 @ coefs) < 0:
        coefs = -coefs
    xs = np.clip(grid / g.rho_max, -1.0, 1.0)
    # evaluate with the Chebyshev module so x = +-1 is handled exactly
    vals = _radial_eval(coefs, mode.parity, mode.bc, size, xs)
    f_end = float(_radial_derivative_at(mode.parity, mode.bc, size, 1.0, 0) @ coefs)
    df_end = float(_radial_derivative_at(mode.parity, mode.bc, size, 1.0, 1) @ coefs) / g.rho_max
    return vals, f_end, df_end


def _radial_eval(coefs, parity, bc, size, xs):
    p = 0 if parity is Parity.EVEN else 1
    degs = p + 2 * np.arange(size + 1)
    full = np.zeros(degs[-1] + 1)
    if bc is BC.DIRICHLET:
        full[degs[1:]] += coefs
        full[degs[:-1]] -= coefs
    else:
        w = np.where(degs > 0, 1.0 / np.maximum(degs, 1) ** 2, 0.0)
        if p == 0:
            full[0] += coefs[0]
            full[degs[2:]] += coefs[1:] * w[2:]
            full[degs[1:-1]] -= coefs[1:] * w[1:-1]
        else:
            full[degs[1:]] += coefs * w[1:]
            full[degs[:-1]] -= coefs * w[:-1]
    return np.polynomial.chebyshev.chebval(xs, full)


def _radial_shooting_profile(g, hbar, mode, alpha, grid):
    h = hbar * hbar / g.c**2

    def rhs(r, y):
        return [y[1], -(math.cosh(r) ** 2 - alpha) / h * y[0], y[0] * y[0]]

    y0 = [1.0, 0.0, 0.0] if mode.parity is Parity.EVEN else [0.0, 1.0, 0.0]
    sol = integrate.solve_ivp(
        rhs, (0.0, g.rho_max), y0, method="DOP853", rtol=1e-13, atol=1e-15, dense_output=True
    )
    if not sol.success:
        raise ShootingBracketFailed(sol.message)
    f_end, df_end, mass = sol.y[:, -1]
    fine = sol.sol(np.linspace(0.0, g.rho_max, 2001))[0]
    peak = float(np.max(np.abs(fine)))
    if mode.bc is BC.DIRICHLET:
        resid = abs(f_end) / peak
    else:
        resid = abs(df_end) * math.sqrt(h) / peak
    if resid > BC_TOL:
        raise NotACharacteristicValue(f"boundary residual {resid:.3e} at alpha={alpha}")
    nrm = math.sqrt(mass)
    vals = sol.sol(np.abs(grid))[0] / nrm
    if mode.parity is Parity.ODD:
        vals = np.sign(grid) * vals
    return vals, float(f_end / nrm), float(df_end / nrm)


def count_interior_zeros(values) -> int:
    """Sign changes of a sampled function, ignoring exact zeros."""
    v = np.asarray(values, dtype=float)
    v = v[v != 0.0]
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


# --------------------------------------------------------------------------
# chains


def angular_chain(g: EllipseGeometry, hbar: float, count: int) -> list[tuple[str, int, float]]:
    """The first ``count`` angular values in the order ``a'_0, b'_1, a'_1, b'_2, ...``."""
    out = []
    k = 0
    while len(out) < count:
        if k == 0:
            out.append(("a", 0, angular_characteristic(g, hbar, AngularMode(Parity.EVEN, 0))))
        else:
            out.append(("b", k, angular_characteristic(g, hbar, AngularMode(Parity.ODD, k))))
            if len(out) < count:
                out.append(("a", k, angular_characteristic(g, hbar, AngularMode(Parity.EVEN, k))))
        k += 1
    return out[:count]


def radial_chain(g: EllipseGeometry, hbar: float, count: int, bc: BC = BC.DIRICHLET) -> list[tuple[str, int, float]]:
    """The first ``count`` radial values ``A'_0, B'_1, A'_1, B'_2, ...`` (decreasing)."""
    out = []
    k = 0
    while len(out) < count:
        if k == 0:
            out.append(("A", 0, radial_characteristic(g, hbar, RadialMode(Parity.EVEN, 0, bc))))
        else:
            out.append(("B", k, radial_characteristic(g, hbar, RadialMode(Parity.ODD, k, bc))))
            if len(out) < count:
                out.append(("A", k, radial_characteristic(g, hbar, RadialMode(Parity.EVEN, k, bc))))
        k += 1
    return out[:count]


def characteristic_curve(g: EllipseGeometry, family: str, index: int, hbars, bc: BC = BC.DIRICHLET) -> np.ndarray:
    """Sample ``hbar -> alpha`` for one of the families ``a``, ``b``, ``A``, ``B``."""
    hbars = np.asarray(hbars, dtype=float)
    if family in ("a", "b"):
        mode = AngularMode(Parity.EVEN if family == "a" else Parity.ODD, index)
        return np.array([angular_characteristic(g, h, mode) for h in hbars])
    if family in ("A", "B"):
        mode = RadialMode(Parity.EVEN if family == "A" else Parity.ODD, index, bc)
        return np.array([radial_characteristic(g, h, mode) for h in hbars])
    raise ValueError(f"unknown family {family!r}")
