"""Command-line entry point: ``ellipse-lab <command> [subcommand] [flags]``.

Tables are written as CSV preceded by ``#`` metadata lines (version,
config hash, calibration constants); single records as JSON. Usage errors
exit with status 2, numerical failures with status 1 and the error class
name on stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np

from . import __version__
from .actions import Branch, action_table, branch_interval
from .billiard import (
    ROTATION_CALIBRATION,
    calibrated_empirical_rotation,
    iterate,
    point_on_level,
    rotation_number,
)
from .config import RunConfig
from .errors import EllipseLabError, OutOfActionInterval, SymbolSyntaxError
from .geometry import arclength, boundary_speed, make_ellipse
from .mathieu import BC, characteristic_curve
from .symbols import parse_symbol

PARAM_KEYS = (
    "alpha", "steps", "alpha_grid", "branch", "family", "index", "hbar_grid", "bc", "m", "n", "cls",
    "lambda_max", "symbol", "basis", "f", "h", "k", "points",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _grid(text: str) -> np.ndarray:
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:n, got {text!r}") from None
    if n < 1 or (n > 1 and hi <= lo):
        raise argparse.ArgumentTypeError(f"bad grid {text!r}")
    return np.linspace(lo, hi, n)


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _common() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    p.add_argument("--a", type=float, default=None, help="semi-major axis (default sqrt 2)")
    p.add_argument("--b", type=float, default=None, help="semi-minor axis (default 1)")
    p.add_argument("--threads", type=int, default=None, help="bound on worker threads")
    p.add_argument("--config", default=None, help="JSON config file; its values override flags")
    p.add_argument("--eps-sep", type=float, default=None, dest="eps_sep", help="separatrix exclusion width")
    p.add_argument("--out", default=None, help="output path (default stdout)")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    p = _Parser(prog="ellipse-lab", description="Elliptical billiard laboratory")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    bil = sub.add_parser("billiard", help="classical billiard map").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = bil.add_parser("orbit", parents=[common])
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--steps", type=int, default=1000)
    q = bil.add_parser("rotation", parents=[common])
    q.add_argument("--alpha-grid", type=_grid, required=True, dest="alpha_grid")
    q.add_argument("--steps", type=int, default=10_000)

    act = sub.add_parser("actions", help="action variables").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = act.add_parser("table", parents=[common])
    q.add_argument("--alpha-grid", type=_grid, required=True, dest="alpha_grid")
    q.add_argument("--branch", choices=["inside", "outside"], required=True)

    mat = sub.add_parser("mathieu", help="characteristic curves").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = mat.add_parser("curves", parents=[common])
    q.add_argument("--family", choices=["a", "b", "A", "B"], required=True)
    q.add_argument("--index", type=int, required=True)
    q.add_argument("--hbar-grid", type=_grid, required=True, dest="hbar_grid")
    q.add_argument("--bc", choices=["dirichlet", "neumann"], default="dirichlet")

    spe = sub.add_parser("spectrum", help="separable eigenvalues").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = spe.add_parser("solve", parents=[common])
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--class", dest="cls", choices=["ee", "eo", "oe", "oo"], required=True)
    q.add_argument("--bc", choices=["dirichlet", "neumann"], required=True)
    q = spe.add_parser("ladder", parents=[common])
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--class", dest="cls", choices=["ee", "eo", "oe", "oo"], required=True)
    q.add_argument("--bc", choices=["dirichlet", "neumann"], required=True)
    q.add_argument("--n", type=_int_list, required=True)
    q = spe.add_parser("table", parents=[common])
    q.add_argument("--lambda-max", type=float, required=True, dest="lambda_max")
    q.add_argument("--bc", choices=["dirichlet", "neumann"], default="dirichlet")

    q = sub.add_parser("quantum-limit", parents=[common], help="Cauchy data against the limit measure")
    q.add_argument("--alpha", type=float, required=True)
    q.add_argument("--symbol", required=True)
    q.add_argument("--class", dest="cls", choices=["ee", "eo", "oe", "oo"], required=True)
    q.add_argument("--bc", choices=["dirichlet", "neumann"], required=True)
    q.add_argument("--n", type=_int_list, required=True)

    rig = sub.add_parser("rigidity", help="Leray transform and Abel inversion").add_subparsers(dest="sub", required=True, parser_class=_Parser)
    q = rig.add_parser("scan", parents=[common])
    q.add_argument("--basis", type=int, required=True)
    q.add_argument("--alpha-grid", type=_grid, required=True, dest="alpha_grid")
    q.add_argument("--branch", choices=["inside", "outside"], required=True)
    q = rig.add_parser("abel-roundtrip", parents=[common])
    q.add_argument("--f", required=True)
    q.add_argument("--points", type=int, default=19)

    q = sub.add_parser("oracle2d", parents=[common], help="finite-difference Dirichlet eigenvalues")
    q.add_argument("--h", type=float, default=0.01)
    q.add_argument("--k", type=int, default=8)
    return p


def _config(args) -> RunConfig:
    base = {}
    if args.config:
        with open(args.config) as fh:
            base = json.load(fh)
    params = {k: getattr(args, k) for k in PARAM_KEYS if getattr(args, k, None) is not None}
    for k, v in list(params.items()):
        if isinstance(v, np.ndarray):
            params[k] = [float(x) for x in v]
    params.update(base.pop("params", {}))
    kw = {k: getattr(args, k) for k in ("a", "b", "threads", "eps_sep", "out") if getattr(args, k, None) is not None}
    kw.update(base)
    cfg = RunConfig(params=params, **kw)
    # config file values override flags
    for k, v in params.items():
        if k in ("alpha_grid", "hbar_grid"):
            v = _grid(v) if isinstance(v, str) else np.asarray(v, dtype=float)
        setattr(args, k, v)
    return cfg


def _header(cfg: RunConfig, extra=()) -> list[str]:
    lines = [
        f"# ellipse-lab {__version__}",
        f"# config_hash={cfg.hash}",
        f"# config={cfg.canonical_json()}",
        f"# rotation_calibration={ROTATION_CALIBRATION!r}",
        f"# eps_sep={cfg.eps_sep!r}",
    ]
    lines.extend(f"# {e}" for e in extra)
    return lines


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(cfg: RunConfig, columns, rows, extra=()) -> None:
    buf = io.StringIO()
    for line in _header(cfg, extra):
        buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    with _sink(cfg.out) as fh:
        fh.write(buf.getvalue())


def _executor(cfg):
    return ThreadPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 else None


# --------------------------------------------------------------------------
# commands


def cmd_billiard(args, cfg, g):
    if args.sub == "orbit":
        orb = iterate(g, point_on_level(g, args.alpha), args.steps)
        th, pt = orb.theta, orb.p_theta
        s = arclength(g, th)
        eta = pt / boundary_speed(g, th)
        al = orb.alphas(g)
        write_csv(cfg, ["theta", "p_theta", "eta", "s", "alpha"], zip(th.tolist(), pt.tolist(), eta.tolist(), np.atleast_1d(s).tolist(), al.tolist()))
        return
    rows = []
    for al in args.alpha_grid:
        rf = rotation_number(g, float(al), cfg.eps_sep)
        re = calibrated_empirical_rotation(g, float(al), args.steps)
        rows.append((float(al), rf, re, abs(rf - re)))
    write_csv(cfg, ["alpha", "r_formula", "r_empirical", "delta"], rows)


def cmd_actions(args, cfg, g):
    lo, hi = branch_interval(g, Branch(args.branch), cfg.eps_sep)
    grid = args.alpha_grid
    if grid.min() < lo or grid.max() > hi:
        raise OutOfActionInterval(f"alpha grid leaves the {args.branch} interval [{lo}, {hi}]")
    rows = [(v.alpha, v.I_rho, v.I_theta, v.A0) for v in action_table(g, grid)]
    write_csv(cfg, ["alpha", "I_rho", "I_theta", "A0"], rows)


def cmd_mathieu(args, cfg, g):
    vals = characteristic_curve(g, args.family, args.index, args.hbar_grid, BC(args.bc))
    write_csv(cfg, ["hbar", "alpha"], zip(args.hbar_grid.tolist(), np.asarray(vals).tolist()))


def cmd_spectrum(args, cfg, g):
    from .spectrum import asymptotic_check, build_ladder, enumerate_spectrum, solve_intersection, SymmetryClass

    if args.sub == "solve":
        rec = solve_intersection(g, args.m, args.n, SymmetryClass.parse(args.cls), BC(args.bc))
        d = rec.to_dict()
        d["config_hash"] = cfg.hash
        with _sink(cfg.out) as fh:
            fh.write(json.dumps(d, sort_keys=True, indent=2) + "\n")
        return
    if args.sub == "ladder":
        ex = _executor(cfg)
        try:
            lad = build_ladder(g, args.alpha, args.cls, args.bc, args.n, eps=cfg.eps_sep, executor=ex)
        finally:
            if ex is not None:
                ex.shutdown()
        rep = asymptotic_check(g, lad, cfg.eps_sep)
        rows = [(r.m, r.n, r.hbar, r.lam, r.alpha, e, r.hbar_err) for r, e in zip(lad.entries, rep.e)]
        extra = [f"slope={rep.slope!r}", f"slope_ci_low={rep.slope_ci_low!r}", f"bounded={rep.bounded}"]
        write_csv(cfg, ["m", "n", "hbar", "lambda", "alpha", "e_j", "hbar_err"], rows, extra)
        return
    recs = enumerate_spectrum(g, args.bc, args.lambda_max)
    rows = [(i + 1, r.cls.code, r.m, r.n, r.hbar, r.lam, r.lam**2, r.alpha, r.hbar_err) for i, r in enumerate(recs)]
    write_csv(cfg, ["index", "class", "m", "n", "hbar", "lambda", "lambda2", "alpha", "hbar_err"], rows)


def cmd_quantum_limit(args, cfg, g):
    from .cauchy import convergence_study

    sym = parse_symbol(args.symbol, "theta")
    ex = _executor(cfg)
    try:
        rep = convergence_study(g, args.alpha, sym, args.cls, args.bc, args.n, symbol=args.symbol, executor=ex)
    finally:
        if ex is not None:
            ex.shutdown()
    rows = [(r.n, r.m, r.lam, r.matrix_element, r.limit, r.rel_error) for r in rep.rows]
    write_csv(cfg, ["n", "m", "lambda", "matrix_element", "limit", "rel_error"], rows, [f"slope={rep.slope!r}"])


def cmd_rigidity(args, cfg, g):
    from .rigidity import abel_forward, abel_inverse, transform_matrix

    if args.sub == "scan":
        lo, hi = branch_interval(g, Branch(args.branch), cfg.eps_sep)
        grid = args.alpha_grid
        if grid.min() < lo or grid.max() > hi:
            raise OutOfActionInterval(f"alpha grid leaves the {args.branch} interval [{lo}, {hi}]")
        ex = _executor(cfg)
        try:
            T = transform_matrix(g, grid, args.basis, executor=ex)
        finally:
            if ex is not None:
                ex.shutdown()
        sv = np.linalg.svd(T / np.linalg.norm(T, axis=0), compute_uv=False)
        cols = ["alpha"] + [f"T_{j}" for j in range(args.basis)]
        rows = [[float(a)] + T[i].tolist() for i, a in enumerate(grid)]
        write_csv(cfg, cols, rows, [f"sigma_min={float(sv[-1])!r}"])
        return
    f = parse_symbol(args.f, "u")
    us = np.linspace(0.05, 0.95, args.points)
    fwd = lambda x: np.array([abel_forward(f, float(xi)) for xi in np.atleast_1d(x)])  # noqa: E731
    rows = []
    for u in us:
        back = abel_inverse(fwd, float(u))
        rows.append((float(u), float(f(u)), back, abs(back - float(f(u)))))
    write_csv(cfg, ["u", "f", "roundtrip", "abs_error"], rows, [f"sup_error={max(r[3] for r in rows)!r}"])


def cmd_oracle2d(args, cfg, g):
    from .oracle2d import fd_eigenvalues

    est = fd_eigenvalues(g, args.h, args.k)
    res = est.fine.residuals[: args.k]
    rows = [
        (i + 1, float(l2), math.sqrt(l2), float(r), float(e), c)
        for i, (l2, r, e, c) in enumerate(zip(est.lambda2, res, est.error, est.classes))
    ]
    write_csv(cfg, ["index", "lambda2", "lambda", "residual", "richardson_error", "class"], rows)


COMMANDS = {
    "billiard": cmd_billiard,
    "actions": cmd_actions,
    "mathieu": cmd_mathieu,
    "spectrum": cmd_spectrum,
    "quantum-limit": cmd_quantum_limit,
    "rigidity": cmd_rigidity,
    "oracle2d": cmd_oracle2d,
}


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except (ValueError, TypeError, OSError, argparse.ArgumentTypeError) as exc:
        print(f"ellipse-lab: {exc}", file=sys.stderr)
        return 2
    try:
        g = make_ellipse(cfg.a, cfg.b)
        COMMANDS[args.command](args, cfg, g)
    except SymbolSyntaxError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except EllipseLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
