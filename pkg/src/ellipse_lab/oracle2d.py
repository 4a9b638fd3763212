"""Finite-difference Dirichlet eigenvalues on the ellipse interior.

Independent check of the separable solver. Nodes sit on a Cartesian grid
through the origin, so both axis reflections map the grid to itself and
the four symmetry classes survive discretization. Arms that cross the
boundary use the Shortley-Weller unequal-arm stencil::

    -u_xx ~ (2/h^2) [ u_P / (te tw) - u_E / (te (te + tw)) - u_W / (tw (te + tw)) ]

with boundary values zero and ``te, tw`` the arm fractions in ``(0, 1]``.
The stencil is not symmetric, so the sparse eigenproblem is solved in
shift-invert mode around zero with ARPACK's general driver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

from .errors import SolverStagnated
from .geometry import EllipseGeometry

RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class Domain:
    """A domain symmetric under both axis reflections.

    ``half_x(y)`` and ``half_y(x)`` give the positive boundary crossing of
    the horizontal line through ``y`` and the vertical line through ``x``.
    """

    half_width: float
    half_height: float
    half_x: Callable[[np.ndarray], np.ndarray]
    half_y: Callable[[np.ndarray], np.ndarray]
    name: str = ""


def ellipse_domain(g: EllipseGeometry) -> Domain:
    a, b = g.a, g.b
    return Domain(
        a, b,
        lambda y: a * np.sqrt(np.maximum(1.0 - (y / b) ** 2, 0.0)),
        lambda x: b * np.sqrt(np.maximum(1.0 - (x / a) ** 2, 0.0)),
        f"ellipse({a:g},{b:g})",
    )


def rectangle_domain(width: float, height: float) -> Domain:
    """Centered rectangle; the unit square has ``lambda_1^2 = 2 pi^2``."""
    hw, hh = 0.5 * width, 0.5 * height
    return Domain(hw, hh, lambda y: np.full_like(y, hw), lambda x: np.full_like(x, hh), f"rect({width:g},{height:g})")


@dataclass(frozen=True)
class GridOperator:
    h: float
    x: np.ndarray
    y: np.ndarray
    ix: np.ndarray
    iy: np.ndarray
    matrix: sparse.csr_matrix
    symmetric: bool

    @property
    def size(self) -> int:
        return self.ix.size


def _fractions(pos, half, h):
    # arm fractions toward +half and -half from the node coordinate pos
    te = np.minimum((half - pos) / h, 1.0)
    tw = np.minimum((half + pos) / h, 1.0)
    return te, tw


def grid_operator(dom: Domain, h: float, *, boundary_snap: float = 1e-12) -> GridOperator:
    """Assemble the Shortley-Weller operator on nodes strictly inside ``dom``."""
    nx = int(math.floor(dom.half_width / h))
    ny = int(math.floor(dom.half_height / h))
    I, J = np.meshgrid(np.arange(-nx, nx + 1), np.arange(-ny, ny + 1), indexing="ij")
    X, Y = I * h, J * h
    # a node is interior if it lies strictly inside both chords through it
    hx = dom.half_x(Y)
    hy = dom.half_y(X)
    inside = (np.abs(X) < hx - boundary_snap * h) & (np.abs(Y) < hy - boundary_snap * h)
    ix, iy = I[inside], J[inside]
    xs, ys = X[inside], Y[inside]
    index = -np.ones(I.shape, dtype=np.int64)
    index[inside] = np.arange(ix.size)
    n = ix.size

    rows, cols, vals = [], [], []
    diag = np.zeros(n)
    for axis in (0, 1):
        pos = xs if axis == 0 else ys
        half = dom.half_x(ys) if axis == 0 else dom.half_y(xs)
        te, tw = _fractions(pos, half, h)
        s = te + tw
        diag += 2.0 / (h * h * te * tw)
        for step, t_arm in ((1, te), (-1, tw)):
            ni = ix + (step if axis == 0 else 0)
            nj = iy + (step if axis == 1 else 0)
            ok = (ni >= -nx) & (ni <= nx) & (nj >= -ny) & (nj <= ny)
            nb = np.full(n, -1, dtype=np.int64)
            nb[ok] = index[ni[ok] + nx, nj[ok] + ny]
            # a full arm to an interior node couples; a cut arm hits u = 0
            link = (nb >= 0) & (t_arm >= 1.0)
            coef = -2.0 / (h * h * t_arm * s)
            rows.append(np.nonzero(link)[0])
            cols.append(nb[link])
            vals.append(coef[link])
    rows.append(np.arange(n))
    cols.append(np.arange(n))
    vals.append(diag)
    A = sparse.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n, n))
    sym = abs(A - A.T).max() <= 1e-12 * abs(A).max()
    return GridOperator(h, xs, ys, ix, iy, A, bool(sym))


@dataclass(frozen=True)
class FDResult:
    h: float
    lambda2: np.ndarray
    residuals: np.ndarray
    vectors: np.ndarray
    operator: GridOperator


def _solve(op: GridOperator, k: int) -> FDResult:
    A = op.matrix.tocsc()
    try:
        vals, vecs = spla.eigs(A, k=k, sigma=0.0, which="LM", tol=1e-12, maxiter=5000)
    except spla.ArpackNoConvergence as exc:
        raise SolverStagnated(f"ARPACK did not converge for k={k}, h={op.h}") from exc
    order = np.argsort(vals.real)
    vals, vecs = vals[order], vecs[:, order]
    if np.abs(vals.imag).max() > 1e-8 * np.abs(vals.real).max():
        raise SolverStagnated("complex eigenvalues in the low spectrum")
    lam2 = vals.real
    # a real eigenvector: take the larger of the real and imaginary parts
    V = np.where(np.linalg.norm(vecs.real, axis=0) >= np.linalg.norm(vecs.imag, axis=0), vecs.real, vecs.imag)
    V = V / np.linalg.norm(V, axis=0)
    res = np.linalg.norm(A @ V - V * lam2, axis=0) / np.maximum(1.0, np.abs(lam2))
    if np.any(res > RESIDUAL_TOL):
        raise SolverStagnated(f"residual {res.max():.2e} exceeds {RESIDUAL_TOL}")
    return FDResult(op.h, lam2, res, V, op)


def fd_spectrum(dom: Domain, h: float, k: int) -> FDResult:
    return _solve(grid_operator(dom, h), k)


@dataclass(frozen=True)
class RichardsonEstimate:
    lambda2: np.ndarray
    error: np.ndarray
    coarse: FDResult
    fine: FDResult
    classes: tuple


def fd_eigenvalues(g: EllipseGeometry | Domain, h: float, k: int, *, extra: int = 4) -> RichardsonEstimate:
    """``k`` smallest Dirichlet ``lambda^2``, extrapolated over ``(h, h/2)``.

    ``(4 l(h/2) - l(h)) / 3`` removes the ``h^2`` term; the error estimate
    is its distance from the fine-grid value. A few extra modes are
    computed so that modes crossing between the grids are matched by
    symmetry class rather than by position.
    """
    dom = g if isinstance(g, Domain) else ellipse_domain(g)
    if not isinstance(g, Domain) and h > g.b / 50.0 * (1.0 + 1e-12):
        raise ValueError(f"h={h} must be at most b/50={g.b / 50.0}")
    if not 1 <= k <= 20:
        raise ValueError("k must be in 1..20")
    kk = k + extra
    coarse = fd_spectrum(dom, h, kk)
    fine = fd_spectrum(dom, 0.5 * h, kk)
    cc = [mode_class(coarse, j) for j in range(kk)]
    cf = [mode_class(fine, j) for j in range(kk)]
    out, err, cls = [], [], []
    for j in range(k):
        # pair the fine mode with the coarse mode of the same class and rank
        rank = cf[: j + 1].count(cf[j])
        same = [i for i, c in enumerate(cc) if c == cf[j]]
        if len(same) < rank:
            raise SolverStagnated(f"no coarse partner for fine mode {j} ({cf[j]})")
        lc, lf = coarse.lambda2[same[rank - 1]], fine.lambda2[j]
        ext = (4.0 * lf - lc) / 3.0
        out.append(ext)
        err.append(abs(ext - lf))
        cls.append(cf[j])
    return RichardsonEstimate(np.array(out), np.array(err), coarse, fine, tuple(cls))


def mode_class(res: FDResult, j: int) -> str:
    """Parity code (x then y, ``e``/``o``) of an eigenvector from reflections."""
    op = res.operator
    v = res.vectors[:, j]
    lookup = {(a, b): i for i, (a, b) in enumerate(zip(op.ix.tolist(), op.iy.tolist()))}
    mx = np.array([lookup[(-a, b)] for a, b in zip(op.ix.tolist(), op.iy.tolist())])
    my = np.array([lookup[(a, -b)] for a, b in zip(op.ix.tolist(), op.iy.tolist())])
    px = "e" if np.dot(v, v[mx]) > 0 else "o"
    py = "e" if np.dot(v, v[my]) > 0 else "o"
    return px + py


def convergence_order(dom: Domain, h: float, j: int = 0) -> float:
    """Observed order from the grids ``h, h/2, h/4`` for mode ``j``."""
    l = [fd_spectrum(dom, h / 2**i, j + 1).lambda2[j] for i in range(3)]
    return math.log2(abs(l[0] - l[1]) / abs(l[1] - l[2]))
