"""Quadrature helpers shared by the level-set and action integrals.

Integrands reaching this module have already had their endpoint
singularities removed by a substitution, so a Gauss-Legendre rule whose
order is doubled until successive estimates agree is spectrally accurate.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import TruncationNotConverged


@lru_cache(maxsize=32)
def _gl(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(n: int):
    """Nodes and weights of the ``n``-point rule on ``[-1, 1]`` (cached)."""
    return _gl(int(n))


def smooth_quad(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    *,
    tol: float = 1e-13,
    n0: int = 32,
    n_max: int = 4096,
    panels: int = 1,
    edges=None,
) -> tuple[float, float]:
    """Integrate a smooth vectorized ``f`` over ``[lo, hi]``.

    The interval is split into ``panels`` equal pieces, or at the explicit
    sorted ``edges`` when given. The rule order doubles until two
    successive estimates differ by less than ``tol * max(1, |I|)``.
    Returns ``(value, error_estimate)``.
    """
    if hi == lo:
        return 0.0, 0.0
    edges = np.linspace(lo, hi, panels + 1) if edges is None else np.asarray(edges, dtype=float)
    panels = edges.size - 1
    prev = None
    n = n0
    while n <= n_max:
        x, w = _gl(n)
        total = 0.0
        for p in range(panels):
            a, b = edges[p], edges[p + 1]
            mid, half = 0.5 * (a + b), 0.5 * (b - a)
            total += half * float(np.dot(w, f(mid + half * x)))
        if prev is not None:
            err = abs(total - prev)
            if err <= tol * max(1.0, abs(total)):
                return float(total), float(err)
        prev = total
        n *= 2
    raise TruncationNotConverged(
        f"Gauss-Legendre rule did not settle on [{lo}, {hi}] up to {n_max} nodes"
    )


def graded_edges(lo: float, hi: float, points, delta: float, ratio: float = 3.0) -> np.ndarray:
    """Panel edges on ``[lo, hi]`` graded geometrically toward ``points``.

    Near a point ``s`` where the integrand varies on the scale ``delta``
    the edges sit at ``s +- delta * ratio^j``, which keeps every panel a
    fixed relative distance from the nearby complex singularity.
    """
    out = {lo, hi}
    for s in points:
        if lo <= s <= hi:
            out.add(s)
        d = delta
        while d < hi - lo:
            for e in (s - d, s + d):
                if lo < e < hi:
                    out.add(e)
            d *= ratio
    return np.array(sorted(out))


def periodic_trapezoid(values: np.ndarray, period: float = 2 * np.pi) -> float:
    """Trapezoid rule on a uniform periodic grid (spectral for smooth data)."""
    values = np.asarray(values)
    return float(values.sum() * period / values.shape[-1])
