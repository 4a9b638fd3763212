"""Eigenvalues of the ellipse from intersecting characteristic curves.

A separable eigenfunction ``F_m(rho) G_n(theta)`` exists at ``hbar`` when
the angular and radial values coincide, ``a'_n(hbar) = A'_m(hbar)`` (even
in ``y``) or ``b'_n(hbar) = B'_m(hbar)`` (odd in ``y``). The gap
``angular - radial`` is strictly increasing in ``hbar`` (the angular value
grows and the radial value drops with ``hbar^2``), so each lattice point
has exactly one root. It is seeded from leading-order Bohr-Sommerfeld rules
and refined by bracketing.

Index bookkeeping
-----------------
Records carry the solver indices ``(m, n)`` of :mod:`ellipse_lab.mathieu`.
The Bohr-Sommerfeld indices subtract one from both for odd-in-``y``
classes, and the Maslov-shifted quantum numbers ``(m~, n~)`` add the
shifts below so that ``I_rho ~ m~ hbar`` and ``I_theta ~ n~ hbar``::

                     radial (D / N)            angular
    outside, e or o  m_bs + 3/4 / m_bs + 1/4   n  (= n_bs or n_bs + 1)
    inside,  even y  m_bs + 1/2 / m_bs         n_bs + 1/2
    inside,  odd y   m_bs + 1   / m_bs + 1/2   n_bs + 1/2
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import optimize, stats

from .actions import Branch, action_angular, action_ratio_A0, branch_interval, invert_A0, sector
from .billiard import EPS_SEP
from .errors import (
    MultipleRoots,
    NoBracket,
    OutOfActionInterval,
    OutOfSector,
    SeparatrixLevel,
    TruncationNotConverged,
)
from .geometry import EllipseGeometry
from .mathieu import (
    BC,
    AngularMode,
    Parity,
    RadialMode,
    angular_characteristic,
    angular_phase_index,
    radial_characteristic,
    radial_phase_index,
)

EXPAND_FACTOR = 1.5
EXPAND_STEPS = 8
HBAR_XTOL = 1e-13
SCAN_POINTS = 17
# hbar range (in units of c) over which the truncations are known to settle
HBAR_FLOOR = 1e-3
HBAR_CEIL = 1e3


@dataclass(frozen=True)
class SymmetryClass:
    """Parities under ``x -> -x`` and ``y -> -y``; ``code`` is ``'ee'``, ``'eo'``, ..."""

    parity_x: Parity
    parity_y: Parity

    def __post_init__(self):
        object.__setattr__(self, "parity_x", Parity(self.parity_x))
        object.__setattr__(self, "parity_y", Parity(self.parity_y))

    @classmethod
    def parse(cls, code: str) -> "SymmetryClass":
        code = code.strip().lower()
        table = {"e": Parity.EVEN, "o": Parity.ODD}
        if len(code) != 2 or any(ch not in table for ch in code):
            raise ValueError(f"class code must be two letters from e/o, got {code!r}")
        return cls(table[code[0]], table[code[1]])

    @property
    def code(self) -> str:
        return self.parity_x.value[0] + self.parity_y.value[0]

    @property
    def n_parity(self) -> int:
        """Parity of the angular order ``n`` in this class.

        ``cos n theta`` has x-parity ``(-1)^n``; ``sin n theta`` has
        ``(-1)^(n+1)``.
        """
        x_odd = self.parity_x is Parity.ODD
        if self.parity_y is Parity.EVEN:
            return 1 if x_odd else 0
        return 0 if x_odd else 1

    @property
    def n_min(self) -> int:
        if self.parity_y is Parity.EVEN:
            return self.n_parity
        return 1 if self.n_parity == 1 else 2

    @property
    def m_min(self) -> int:
        return 0 if self.parity_y is Parity.EVEN else 1

    def angular_mode(self, n: int) -> AngularMode:
        if n % 2 != self.n_parity or n < self.n_min:
            raise ValueError(f"n={n} is not an angular order of class {self.code}")
        return AngularMode(self.parity_y, n)

    def radial_mode(self, m: int, bc: BC) -> RadialMode:
        return RadialMode(self.parity_y, m, bc)


ALL_CLASSES = tuple(SymmetryClass.parse(c) for c in ("ee", "oe", "eo", "oo"))


@dataclass(frozen=True)
class EigenvalueRecord:
    m: int
    n: int
    cls: SymmetryClass
    bc: BC
    hbar: float
    lam: float
    alpha: float
    branch: Branch
    gap_residual: float = 0.0
    hbar_err: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["cls"] = self.cls.code
        d["bc"] = self.bc.value
        d["branch"] = self.branch.value
        d["lambda"] = d.pop("lam")
        return d


# --------------------------------------------------------------------------
# Bohr-Sommerfeld bookkeeping


def bs_indices(m: int, n: int, cls: SymmetryClass) -> tuple[int, int]:
    """Bohr-Sommerfeld lattice indices of solver indices ``(m, n)``."""
    if cls.parity_y is Parity.ODD:
        return m - 1, n - 1
    return m, n


def maslov_indices(m: int, n: int, cls: SymmetryClass, branch: Branch, bc: BC) -> tuple[float, float]:
    """Maslov-shifted quantum numbers ``(m~, n~)``."""
    branch, bc = Branch(branch), BC(bc)
    mb, nb = bs_indices(m, n, cls)
    odd = cls.parity_y is Parity.ODD
    if branch is Branch.OUTSIDE:
        mt = mb + (0.75 if bc is BC.DIRICHLET else 0.25)
        nt = nb + (1.0 if odd else 0.0)
    else:
        if bc is BC.DIRICHLET:
            mt = mb + (1.0 if odd else 0.5)
        else:
            mt = mb + (0.5 if odd else 0.0)
        nt = nb + 0.5
    return float(mt), float(nt)


def m_from_maslov(mt_target: float, cls: SymmetryClass, branch: Branch, bc: BC) -> int:
    """Solver index ``m`` whose shifted radial number is closest to ``mt_target``."""
    shift = maslov_indices(cls.m_min, cls.n_min, cls, branch, bc)[0] - cls.m_min
    return max(cls.m_min, int(round(mt_target - shift)))


def bs_seed(
    g: EllipseGeometry, m: int, n: int, cls: SymmetryClass, branch: Branch, bc: BC, eps: float = EPS_SEP
) -> float:
    """Leading-order seed ``hbar = I_theta(alpha_(0)(m~/n~)) / n~``.

    Raises ``OutOfSector`` when ``m~/n~`` is not a value of ``A0`` on the
    truncated branch interval.
    """
    mt, nt = maslov_indices(m, n, cls, branch, bc)
    if nt <= 0:
        raise OutOfSector(f"n~={nt} gives no ratio")
    alpha0 = invert_A0(g, mt / nt, branch, eps=eps)
    return action_angular(g, alpha0) / nt


# --------------------------------------------------------------------------
# intersection


def _gap(g, amode, rmode):
    def f(hbar):
        return angular_characteristic(g, hbar, amode) - radial_characteristic(g, hbar, rmode)

    return f


def _default_seed(g, m, n, cls, bc):
    for branch in (Branch.OUTSIDE, Branch.INSIDE):
        try:
            return bs_seed(g, m, n, cls, branch, bc)
        except OutOfSector:
            continue
    # lattice point off both sectors (near the separatrix): seed at alpha = 1
    return action_angular(g, 1.0) / max(float(n), 0.5)


def _bracket(f, seed: float, factor: float, steps: int, floor: float, ceil: float):
    lo = hi = seed
    flo = fhi = f(seed)
    if flo == 0.0:
        return seed, seed
    for _ in range(steps):
        if flo < 0.0 < fhi:
            return lo, hi
        if flo >= 0.0:
            if lo <= floor:
                return None
            lo = max(lo / factor, floor)
            flo = f(lo)
        if fhi <= 0.0:
            if hi >= ceil:
                return None
            hi = min(hi * factor, ceil)
            fhi = f(hi)
    if flo < 0.0 < fhi:
        return lo, hi
    return None


def solve_intersection(
    g: EllipseGeometry,
    m: int,
    n: int,
    cls: SymmetryClass | str,
    bc: BC | str = BC.DIRICHLET,
    *,
    hbar_seed: float | None = None,
    xtol: float = HBAR_XTOL,
) -> EigenvalueRecord:
    """Solve ``angular_n(hbar) = radial_m(hbar)`` for one lattice point.

    The seed bracket is grown by a factor 1.5 up to 8 times and, failing
    that, once more with 16 steps. Inside the final bracket the gap is
    sampled and more than one sign change raises ``MultipleRoots``.
    """
    if isinstance(cls, str):
        cls = SymmetryClass.parse(cls)
    bc = BC(bc)
    amode = cls.angular_mode(n)
    rmode = cls.radial_mode(m, bc)
    f = _gap(g, amode, rmode)
    seed = hbar_seed if hbar_seed is not None else _default_seed(g, m, n, cls, bc)
    floor, ceil = HBAR_FLOOR * g.c, HBAR_CEIL * g.c
    if not floor <= seed <= ceil:
        raise NoBracket(f"seed hbar={seed} outside [{floor}, {ceil}]")
    try:
        br = _bracket(f, seed, EXPAND_FACTOR, EXPAND_STEPS, floor, ceil)
        if br is None:
            br = _bracket(f, seed, EXPAND_FACTOR, 2 * EXPAND_STEPS, floor, ceil)
    except TruncationNotConverged:
        # the expansion walked into a range the truncations cannot reach
        br = None
    if br is None:
        raise NoBracket(f"no sign change of the gap around hbar={seed} for (m, n)=({m}, {n})")
    lo, hi = br
    if lo == hi:
        root = lo
    else:
        grid = np.geomspace(lo, hi, SCAN_POINTS)
        vals = np.array([f(h) for h in grid])
        changes = int(np.count_nonzero(np.signbit(vals[1:]) != np.signbit(vals[:-1])))
        if changes != 1:
            raise MultipleRoots(f"{changes} sign changes of the gap on [{lo}, {hi}] for (m, n)=({m}, {n})")
        k = int(np.nonzero(np.signbit(vals[1:]) != np.signbit(vals[:-1]))[0][0])
        root = optimize.brentq(f, grid[k], grid[k + 1], xtol=xtol, rtol=1e-15)
    a_ang = angular_characteristic(g, root, amode)
    a_rad = radial_characteristic(g, root, rmode)
    alpha = 0.5 * (a_ang + a_rad)
    branch = Branch.INSIDE if alpha < 1.0 else Branch.OUTSIDE
    return EigenvalueRecord(m, n, cls, bc, float(root), 1.0 / root, float(alpha), branch,
                            float(abs(a_ang - a_rad)), xtol)


def gap_is_monotone(g: EllipseGeometry, rec: EigenvalueRecord, width: float = 0.2, points: int = 33) -> bool:
    """Sample the gap on ``hbar* (1 +- width)`` and report strict monotonicity."""
    f = _gap(g, rec.cls.angular_mode(rec.n), rec.cls.radial_mode(rec.m, rec.bc))
    hs = np.linspace(rec.hbar * (1 - width), rec.hbar * (1 + width), points)
    vals = np.array([f(h) for h in hs])
    return bool(np.all(np.diff(vals) > 0))


# --------------------------------------------------------------------------
# fixed point of the quantization map


def _shifted_phase_indices(g, hbar, cls, bc, m, n, branch):
    mt, nt = maslov_indices(m, n, cls, branch, bc)

    def n_rho(alpha):
        return radial_phase_index(g, hbar, cls.parity_y, bc, alpha) + (mt - m)

    def n_theta(alpha):
        return angular_phase_index(g, hbar, cls.parity_y, alpha, n % 2) + (nt - n)

    return n_rho, n_theta, mt, nt


def alpha_of_ratio(g: EllipseGeometry, hbar: float, m: int, n: int, cls: SymmetryClass, bc: BC, branch: Branch) -> float:
    """``alpha(hbar, m~/n~)``: solve ``S_rho(alpha) / S_theta(alpha) = m~/n~``.

    The semiclassical actions are ``hbar`` times the continuous Prufer
    indices, shifted so that they equal ``m~`` and ``n~`` on the
    characteristic values. ``S_rho - r S_theta`` is decreasing in ``alpha``.
    """
    n_rho, n_theta, mt, nt = _shifted_phase_indices(g, hbar, cls, bc, m, n, branch)
    r = mt / nt
    lo, hi = branch_interval(g, branch, 1e-9)
    f = lambda al: n_rho(al) - r * n_theta(al)  # noqa: E731
    flo, fhi = f(lo), f(hi)
    if not (flo > 0 > fhi):
        raise NoBracket(f"ratio {r} not attained on the {Branch(branch).value} branch at hbar={hbar}")
    return optimize.brentq(f, lo, hi, xtol=1e-14, rtol=1e-15)


def fixed_point_hbar(
    g: EllipseGeometry,
    m: int,
    n: int,
    cls: SymmetryClass | str,
    bc: BC | str,
    branch: Branch | str,
    *,
    hbar0: float | None = None,
    tol: float = 1e-12,
    maxiter: int = 60,
) -> tuple[float, int]:
    """Iterate ``hbar <- Q(hbar) = S_theta(alpha(hbar, m~/n~)) / n~``.

    Returns ``(hbar, iterations)``. Since the actions used here are exact
    (phase indices rather than a truncated expansion) the fixed point is
    the intersection itself.
    """
    if isinstance(cls, str):
        cls = SymmetryClass.parse(cls)
    bc, branch = BC(bc), Branch(branch)
    hbar = hbar0 if hbar0 is not None else bs_seed(g, m, n, cls, branch, bc)
    for it in range(1, maxiter + 1):
        alpha = alpha_of_ratio(g, hbar, m, n, cls, bc, branch)
        _, n_theta, _, nt = _shifted_phase_indices(g, hbar, cls, bc, m, n, branch)
        new = hbar * n_theta(alpha) / nt
        if abs(new - hbar) <= tol * hbar:
            return new, it
        hbar = new
    raise NoBracket(f"fixed-point iteration did not settle in {maxiter} steps")


# --------------------------------------------------------------------------
# ladders


@dataclass(frozen=True)
class Ladder:
    alpha_target: float
    r0: float
    branch: Branch
    cls: SymmetryClass
    bc: BC
    entries: tuple = field(default_factory=tuple)


def _check_level(g, alpha, eps):
    top = g.cosh2_max
    if abs(alpha - 1.0) <= eps:
        raise SeparatrixLevel(f"alpha={alpha} is within {eps} of the separatrix")
    if not (eps < alpha < top - eps):
        raise OutOfActionInterval(f"alpha={alpha} outside ({eps}, {top - eps})")


def ladder_point(g: EllipseGeometry, r0: float, n: int, cls: SymmetryClass, bc: BC, branch: Branch, eps: float = EPS_SEP) -> tuple[int, int]:
    """Lattice point ``(m, n)`` of the class with ``m~/n~`` closest to ``r0``, inside the sector."""
    if n % 2 != cls.n_parity:
        n += 1
    n = max(n, cls.n_min)
    _, nt = maslov_indices(cls.m_min, n, cls, branch, bc)
    m = m_from_maslov(r0 * nt, cls, branch, bc)
    k1, k2 = sector(g, branch, eps)
    for _ in range(4):
        mt, _ = maslov_indices(m, n, cls, branch, bc)
        if mt / nt > k2 and m > cls.m_min:
            m -= 1
        elif mt / nt < k1:
            m += 1
        else:
            break
    return m, n


def build_ladder(
    g: EllipseGeometry,
    alpha_target: float,
    cls: SymmetryClass | str,
    bc: BC | str,
    n_list,
    *,
    eps: float = EPS_SEP,
    executor=None,
) -> Ladder:
    """Solve lattice points ``(m_j, n_j)`` with ``m~_j / n~_j -> A0(alpha_target)``.

    ``n_j`` are bumped by one where needed to match the parity of the
    class. ``executor`` (anything with ``map``) parallelizes the solves.
    """
    if isinstance(cls, str):
        cls = SymmetryClass.parse(cls)
    bc = BC(bc)
    _check_level(g, alpha_target, eps)
    branch = Branch.of(alpha_target)
    r0 = action_ratio_A0(g, alpha_target)
    points = [ladder_point(g, r0, int(n), cls, bc, branch, eps) for n in n_list]

    def solve(pt):
        m, n = pt
        seed = bs_seed(g, m, n, cls, branch, bc, eps)
        return solve_intersection(g, m, n, cls, bc, hbar_seed=seed)

    mapper = executor.map if executor is not None else map
    entries = tuple(mapper(solve, points))
    for rec in entries:
        if abs(rec.alpha - 1.0) <= eps or Branch.of(rec.alpha) is not branch:
            raise SeparatrixLevel(f"ladder entry (m, n)=({rec.m}, {rec.n}) left the branch: alpha={rec.alpha}")
    return Ladder(float(alpha_target), float(r0), branch, cls, bc, entries)


@dataclass(frozen=True)
class AsymptoticReport:
    n: tuple
    e: tuple
    slope: float | None
    slope_ci_low: float | None
    bounded: bool


def asymptotic_check(g: EllipseGeometry, ladder: Ladder, eps: float = EPS_SEP) -> AsymptoticReport:
    """``e_j = n~_j |lambda_j - n~_j / I_theta(alpha_(0)(m~_j / n~_j))|`` along a ladder.

    ``bounded`` is true when the least-squares slope of ``log e`` against
    ``log n`` is not positive at 95% confidence.
    """
    ns, es = [], []
    for rec in ladder.entries:
        mt, nt = maslov_indices(rec.m, rec.n, rec.cls, ladder.branch, rec.bc)
        alpha0 = invert_A0(g, mt / nt, ladder.branch, eps=eps)
        pred = nt / action_angular(g, alpha0)
        ns.append(rec.n)
        es.append(nt * abs(rec.lam - pred))
    if len(ns) < 3:
        return AsymptoticReport(tuple(ns), tuple(es), None, None, True)
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.maximum(np.asarray(es), 1e-300))
    fit = stats.linregress(x, y)
    tq = stats.t.ppf(0.975, len(ns) - 2)
    low = fit.slope - tq * fit.stderr
    return AsymptoticReport(tuple(ns), tuple(es), float(fit.slope), float(low), bool(low <= 0.0))


# --------------------------------------------------------------------------
# whole spectrum


def enumerate_spectrum(g: EllipseGeometry, bc: BC | str, lambda_max: float, classes=ALL_CLASSES) -> list[EigenvalueRecord]:
    """All separable eigenvalues ``0 < lambda <= lambda_max``, sorted.

    Uses that ``lambda`` increases with ``m`` at fixed ``n`` and with ``n``
    at fixed ``m`` inside each class. The constant Neumann mode
    (``lambda = 0``, reached only as ``hbar -> inf``) is left out.
    """
    bc = BC(bc)
    out = []
    for cls in classes:
        n = cls.n_min
        while True:
            m = cls.m_min
            if bc is BC.NEUMANN and cls.code == "ee" and n == 0:
                m += 1
            row = []
            while True:
                rec = solve_intersection(g, m, n, cls, bc)
                if rec.lam > lambda_max:
                    break
                row.append(rec)
                m += 1
            if not row:
                break
            out.extend(row)
            n += 2
    out.sort(key=lambda r: r.lam)
    return out


@dataclass(frozen=True)
class SpacingReport:
    records: tuple
    gaps: tuple
    clusters: tuple
    flagged: tuple


def spacing_report(
    g: EllipseGeometry, bc: BC | str, lambda_max: float, tol_cluster: float = 1e-6
) -> SpacingReport:
    """Merged spectrum with nearest-neighbour gaps and near-degenerate clusters.

    Neighbours closer than ``tol_cluster * lambda`` are grouped. Clusters of
    three or more are flagged for inspection; nothing is asserted about
    true multiplicities.
    """
    recs = enumerate_spectrum(g, bc, lambda_max)
    lams = np.array([r.lam for r in recs])
    gaps = tuple(float(x) for x in np.diff(lams)) if lams.size > 1 else ()
    clusters = []
    cur = [0] if recs else []
    for i, gp in enumerate(gaps):
        if gp < tol_cluster * lams[i + 1]:
            cur.append(i + 1)
        else:
            if len(cur) > 1:
                clusters.append(tuple(cur))
            cur = [i + 1]
    if len(cur) > 1:
        clusters.append(tuple(cur))
    flagged = tuple(c for c in clusters if len(c) >= 3)
    return SpacingReport(tuple(recs), gaps, tuple(clusters), flagged)
