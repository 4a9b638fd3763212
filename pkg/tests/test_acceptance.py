"""The eleven acceptance criteria at their stated tolerances.

Each test records one PASS/FAIL line, printed again in the terminal
summary, and then asserts. Ladders are solved once per module.
"""

import math

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from ellipse_lab.billiard import (
    ROTATION_CALIBRATION,
    billiard_step,
    calibrate_rotation,
    calibrated_empirical_rotation,
    check_regular_level,
    point_from_eta,
    rotation_number,
    uniformizing_angle,
)
from ellipse_lab.cauchy import boundary_trace, convergence_study, op_I_expectation
from ellipse_lab.errors import EllipseLabError
from ellipse_lab.mathieu import (
    BC,
    AngularMode,
    Parity,
    angular_characteristic,
    mathieu_a,
    mathieu_b,
    mathieu_shooting,
    pairing_gap,
    radial_chain,
)
from ellipse_lab.oracle2d import fd_eigenvalues
from ellipse_lab.rigidity import (
    SymmetricVariation,
    abel_forward,
    abel_identity,
    abel_inverse,
    hadamard_neumann,
    kernel_test_inside,
    neumann_limit,
)
from ellipse_lab.spectrum import asymptotic_check, build_ladder, enumerate_spectrum

N_LIST = (10, 20, 40, 80)


def record(k: int, ok: bool, name: str, detail: str) -> None:
    line = f"criterion {k:2d} {'PASS' if ok else 'FAIL'} {name}: {detail}"
    ACCEPTANCE_LINES[k] = line
    print(line)


@pytest.fixture(scope="module")
def ladders(g):
    cache = {}

    def get(alpha, bc):
        key = (alpha, bc)
        if key not in cache:
            cache[key] = build_ladder(g, alpha, "ee", bc, N_LIST)
        return cache[key]

    return get


def test_c01_mathieu_baseline():
    zero = max(
        max(abs(mathieu_a(n, 0.0) - n * n) for n in range(10)),
        max(abs(mathieu_b(n, 0.0) - n * n) for n in range(1, 11)),
    )
    diff = 0.0
    for q in (0.5, 1.0, 5.0):
        for n in range(10):
            diff = max(diff, abs(mathieu_a(n, q) - mathieu_shooting("a", n, q)))
            diff = max(diff, abs(mathieu_b(n + 1, q) - mathieu_shooting("b", n + 1, q)))
    ok = zero <= 1e-10 and diff <= 1e-8
    record(1, ok, "Mathieu baseline", f"max|a_n(0)-n^2|={zero:.1e} (tol 1e-10), matrix vs shooting {diff:.1e} (tol 1e-8)")
    assert ok


def test_c02_interlacing(g):
    worst_pair, worst_ab, worst_rad = math.inf, math.inf, math.inf
    for hbar in (0.2, 0.1, 0.05):
        # angular chain a'_0 < b'_1 < a'_1 < b'_2 < ..., 12 values: a'_0..a'_5, b'_1..b'_6
        for n in range(6):
            # the tunnelling pair (a'_n, b'_{n+1}) needs extended precision
            worst_pair = min(worst_pair, pairing_gap(g, hbar, n))
            if n >= 1:
                a = angular_characteristic(g, hbar, AngularMode(Parity.EVEN, n))
                b = angular_characteristic(g, hbar, AngularMode(Parity.ODD, n))
                worst_ab = min(worst_ab, a - b)
        for bc in (BC.DIRICHLET, BC.NEUMANN):
            vals = np.array([v for _, _, v in radial_chain(g, hbar, 12, bc)])
            worst_rad = min(worst_rad, float(np.min(vals[:-1] - vals[1:])))
    ok = worst_pair > 0 and worst_ab > 0 and worst_rad > 0
    record(
        2, ok, "interlacing chains",
        f"min b'_(n+1)-a'_n={worst_pair:.2e}, min a'_n-b'_n={worst_ab:.2e}, min radial step={worst_rad:.2e}",
    )
    assert ok


def test_c03_exponential_pairing(g):
    hbars = (0.2, 0.1, 0.05, 0.025)
    ok = True
    parts = []
    for n in (0, 1, 2):
        gaps = [pairing_gap(g, h, n) for h in hbars]
        ratios = [gaps[i + 1] / gaps[i] for i in range(len(gaps) - 1)]
        ok &= all(0 < r < 1 for r in ratios)
        ok &= all(ratios[i + 1] <= ratios[i] for i in range(len(ratios) - 1))
        parts.append(f"n={n} ratios " + "/".join(f"{r:.1e}" for r in ratios))
    record(3, ok, "exponential pairing", "; ".join(parts))
    assert ok


def _random_regular_start(g, rng):
    while True:
        th = rng.uniform(0.0, 2.0 * math.pi)
        eta = rng.uniform(-0.98, 0.98)
        p = point_from_eta(g, th, eta)
        alpha = p.alpha(g)
        try:
            check_regular_level(g, alpha, 0.01)
        except EllipseLabError:
            continue
        return p, alpha


def test_c04_billiard_conservation(g):
    rng = np.random.default_rng(20240607)
    drift, spread = 0.0, 0.0
    for _ in range(100):
        p, alpha = _random_regular_start(g, rng)
        iota = uniformizing_angle(g, alpha, p)
        adv = np.empty(10_000)
        for i in range(adv.size):
            p = billiard_step(g, p)
            drift = max(drift, abs(p.alpha(g) - alpha))
            nxt = uniformizing_angle(g, alpha, p)
            adv[i] = (nxt - iota) % 1.0
            iota = nxt
        adv = adv[0] + ((adv - adv[0] + 0.5) % 1.0 - 0.5)
        spread = max(spread, float(np.abs(adv - adv.mean()).max()))
    ok = drift <= 1e-9 and spread <= 1e-8
    record(4, ok, "billiard conservation", f"max alpha drift={drift:.1e} (tol 1e-9), advance spread={spread:.1e} (tol 1e-8)")
    assert ok


def test_c05_rotation_numbers(g):
    levels = np.concatenate([np.linspace(0.05, 0.95, 10), np.linspace(1.05, 1.95, 10)])
    diff = max(abs(calibrated_empirical_rotation(g, a, 10_000) - rotation_number(g, a)) for a in levels)
    calib = max(abs(calibrate_rotation(g, a) - ROTATION_CALIBRATION) for a in (0.3, 0.7, 1.3, 1.7))
    ok = diff <= 1e-6 and calib <= 1e-8 * ROTATION_CALIBRATION
    record(5, ok, "rotation numbers", f"max |formula-empirical|={diff:.1e} (tol 1e-6), calibration drift={calib:.1e}")
    assert ok


def test_c06_oracle_equivalence(g21):
    recs = enumerate_spectrum(g21, "dirichlet", 4.1)[:5]
    est = fd_eigenvalues(g21, 0.02, 5)
    sep = np.array([r.lam**2 for r in recs])
    rel = np.abs(sep - est.lambda2) / est.lambda2
    classes_ok = tuple(r.cls.code for r in recs) == est.classes
    ok = len(recs) == 5 and float(rel.max()) <= 5e-3 and classes_ok
    record(6, ok, "eigenvalue oracle equivalence", f"max rel diff of lambda^2={rel.max():.1e} (tol 5e-3), classes {','.join(est.classes)}")
    assert ok


def test_c07_ladder_asymptotics(g, ladders):
    parts, ok = [], True
    for alpha in (1.2, 0.5):
        rep = asymptotic_check(g, ladders(alpha, BC.DIRICHLET))
        ok &= rep.bounded and max(rep.n) == 80
        parts.append(f"alpha={alpha} slope={rep.slope:+.2f} (CI low {rep.slope_ci_low:+.2f})")
    record(7, ok, "ladder asymptotics bounded", "; ".join(parts))
    assert ok


def test_c08_quantum_limits(g, ladders):
    a = lambda t: np.cos(2.0 * t)  # noqa: E731
    parts, ok = [], True
    for bc in (BC.DIRICHLET, BC.NEUMANN):
        for alpha in (0.5, 1.2):
            rep = convergence_study(g, alpha, a, "ee", bc, N_LIST, ladder=ladders(alpha, bc))
            err80 = rep.rows[-1].rel_error
            ok &= rep.rows[-1].n == 80 and err80 <= 0.05 and rep.decreasing
            parts.append(f"{bc.value[0].upper()} alpha={alpha} err80={err80:.2%} slope={rep.slope:+.2f}")
    record(8, ok, "quantum limits (cos 2 theta)", "; ".join(parts))
    assert ok


def test_c09_op_I_identity(g):
    recs = enumerate_spectrum(g, "dirichlet", 7.0)[:10] + enumerate_spectrum(g, "neumann", 7.0)[:10]
    e1, ek = 0.0, 0.0
    for rec in recs:
        tr = boundary_trace(g, rec)
        e1 = max(e1, abs(op_I_expectation(tr, g) - rec.alpha))
        for k in (2, 3):
            ek = max(ek, abs(op_I_expectation(tr, g, power=k) - rec.alpha**k))
    ok = len(recs) == 20 and e1 <= 1e-7 and ek <= 1e-6
    record(9, ok, "Op(I) identity", f"{len(recs)} records, max|<I>-alpha|={e1:.1e} (tol 1e-7), max k<=3 moment err={ek:.1e} (tol 1e-6)")
    assert ok


ABEL_FUNCS = (
    lambda u: 1.0 + 0.0 * u,
    lambda u: u,
    lambda u: u * u,
    lambda u: np.exp(u),
    lambda u: np.cos(3.0 * u),
)


def test_c10_abel_machinery(g):
    pts = np.linspace(0.0, 1.0, 21)
    ident = 0.0
    for i in range(1, 21):
        for j in range(20):
            if pts[j] < pts[i]:
                ident = max(ident, abs(abel_identity(pts[i], pts[j]) - math.pi / 2))
    us = np.linspace(0.05, 0.95, 19)
    trip = 0.0
    for f in ABEL_FUNCS:
        fwd = lambda x, f=f: np.array([abel_forward(f, float(xi)) for xi in np.atleast_1d(x)])  # noqa: E731
        trip = max(trip, max(abs(abel_inverse(fwd, float(u)) - float(f(u))) for u in us))
    reps = {K: kernel_test_inside(g, K) for K in (4, 8, 12)}
    rec_err = max(r.reconstruction_error for r in reps.values())
    abel_err = max(r.abel_error for r in reps.values())
    sig = {K: r.sigma_min for K, r in reps.items()}
    ok = ident <= 1e-10 and trip <= 1e-6 and rec_err <= 1e-4 and abel_err <= 1e-4 and min(sig.values()) > 0
    record(
        10, ok, "Abel machinery",
        f"identity err={ident:.1e}, round trip={trip:.1e}, reconstruction={rec_err:.1e}, Abel pipeline={abel_err:.1e}, "
        + "sigma_min " + " ".join(f"K={K}:{s:.3f}" for K, s in sig.items()),
    )
    assert ok


def test_c11_neumann_rigidity(g, ladders):
    variations = {"1": [1.0], "0.3+cos2t": [0.3, 1.0]}
    parts, ok = [], True
    for alpha in (1.2, 0.5):
        rec = ladders(alpha, BC.NEUMANN).entries[-1]
        tr = boundary_trace(g, rec)
        for name, coef in variations.items():
            var = SymmetricVariation(np.array(coef), g.cosh2_max)
            val = hadamard_neumann(tr, var, g) / rec.lam**2
            lim = neumann_limit(g, alpha, var)
            rel = abs(val - lim) / abs(lim)
            ok &= rec.n == 80 and rel <= 0.05
            parts.append(f"alpha={alpha} rhodot={name} {val:.4f} vs {lim:.4f} ({rel:.1%})")
    record(11, ok, "Neumann rigidity algebra", "; ".join(parts))
    assert ok
