"""
Command-line front end.

    psiwave resonance --k 1 3 --branch minus --y-range -6 -0.1 60
    psiwave growth    --k 1 1 --y 1 --eps 0.01
    psiwave scan      --k 1 1 --branch plus --y 0.01 0.1 1 10 100
    psiwave validate  --k 2 2 --eps 0.02

Exit codes: 0 ok, 1 usage, 2 solver failure, 3 near-exceptional point,
``3 + number of failed checks`` (at most 125) for ``validate``.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import bloch, entanglement, reduced, resonance, spectral
from .errors import PSIError, ResonanceError
from .resonance import Branch
from .wavefield import PrimaryWave, kperp_dot

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SOLVER = 2
EXIT_NEAR_EXCEPTIONAL = 3
EXIT_VALIDATION_BASE = 3
EXIT_CAP = 125


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    m_hat: int = 1
    n_hat: int = 1
    N: float = 1.0
    eps: float = 0.01
    M: int = 32
    tolerances: dict = field(default_factory=lambda: {
        "resonance": resonance.DEFAULT_TOL,
        "gap_threshold": resonance.DEFAULT_GAP_THRESHOLD,
    })
    output_format: str = "csv"
    seed: int = 0

    def __post_init__(self):
        if self.output_format not in ("csv", "json"):
            raise UsageError(f"format must be csv or json, got {self.output_format!r}")
        if any(not v > 0 for v in self.tolerances.values()):
            raise UsageError("tolerances must be positive")
        if self.M < 0:
            raise UsageError("M must be non-negative")
        try:
            self.pw
        except ValueError as exc:
            raise UsageError(str(exc)) from exc

    @property
    def pw(self) -> PrimaryWave:
        return PrimaryWave(self.m_hat, self.n_hat, self.N, self.eps)


_FILE_KEYS = {
    "k": lambda s: [int(t) for t in s.split()],
    "m_hat": int, "n_hat": int, "N": float, "eps": float, "M": int, "seed": int,
    "format": str, "gap_threshold": float, "tol": float,
}


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, val = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in _FILE_KEYS:
                raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _FILE_KEYS[key](val)
            except ValueError as exc:
                raise UsageError(f"{path}:{lineno}: bad value for {key}: {val!r}") from exc
    if "k" in out:
        if len(out["k"]) != 2:
            raise UsageError("k needs two integers")
        out["m_hat"], out["n_hat"] = out.pop("k")
    return out


def build_config(args) -> RunConfig:
    vals = read_config_file(args.config) if args.config else {}
    if args.k is not None:
        vals["m_hat"], vals["n_hat"] = args.k
    for key in ("N", "eps", "M", "seed", "gap_threshold", "tol"):
        v = getattr(args, key)
        if v is not None:
            vals[key] = v
    if args.format is not None:
        vals["format"] = args.format
    tols = {
        "resonance": vals.pop("tol", resonance.DEFAULT_TOL),
        "gap_threshold": vals.pop("gap_threshold", resonance.DEFAULT_GAP_THRESHOLD),
    }
    # growth reports are nested, so JSON is their natural default
    fmt = vals.pop("format", "json" if args.command == "growth" else "csv")
    return RunConfig(tolerances=tols, output_format=fmt, **vals)


# -- output helpers ---------------------------------------------------------

def fmt17(x) -> str:
    return f"{float(x):.17g}"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt17(v) if isinstance(v, (float, np.floating)) else v for v in r])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def emit(text: str, out):
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def y_values(args) -> list[float]:
    if args.y_range is not None:
        a, b, s = args.y_range
        n = int(s)
        if n != s or n < 1 or (n > 1 and a == b):
            raise UsageError(f"empty or invalid y range: {a} {b} {s}")
        ys = np.linspace(a, b, n).tolist()
    else:
        ys = list(args.y or [])
    if not ys:
        raise UsageError("no y values given (use --y or --y-range)")
    # deterministic dedup keeping first occurrence
    return list(dict.fromkeys(ys))


def _branch(args, y) -> Branch:
    if args.branch:
        return Branch.parse(args.branch)
    return resonance.branch_of(y)


# -- commands ---------------------------------------------------------------

def cmd_resonance(config: RunConfig, branch, ys, out=None) -> int:
    """Trace a branch of the resonant set and write ``y,x,residual``."""
    pw = config.pw
    tol = config.tolerances["resonance"]
    rows = []
    for y in ys:
        try:
            p = resonance.solve_branch(pw, y, branch, tol)
        except resonance.NoRootError:
            # the curve has a gap at the kink ordinate; nothing to interpolate
            print(f"# no root at kink ordinate y={y}", file=sys.stderr)
            continue
        except PSIError as exc:
            print(f"solver failure at y={y}: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        res = abs(resonance.residual_F(pw, p.mu[0], y))
        if res > tol:
            print(f"solver failure at y={y}: |F|={res:.3e}", file=sys.stderr)
            return EXIT_SOLVER
        rows.append((float(y), float(p.mu[0]), res))
    if config.output_format == "json":
        text = json_text([{"y": r[0], "x": r[1], "residual": r[2]} for r in rows])
    else:
        text = csv_text(["y", "x", "residual"], rows)
    emit(text, out)
    return EXIT_OK


def _parallel_report(config: RunConfig, mu) -> dict:
    # mu parallel to k is never resonant: L1 vanishes and the spectrum stays on the axis
    pw = config.pw
    T = bloch.assemble(pw, mu, config.M)
    ev = spectral.eig_all(T)
    ev2 = spectral.eig_all(bloch.assemble(pw, mu, 2 * config.M))
    mr = float(ev.real.max())
    return {
        "pw": {"m_hat": pw.m_hat, "n_hat": pw.n_hat, "N": pw.N},
        "mu": [float(mu[0]), float(mu[1])],
        "M": config.M, "eps": config.eps,
        "max_re": mr, "pred_max_re": 0.0, "residual": abs(mr),
        "conv_gap": abs(mr - float(ev2.real.max())),
        "e_mu": 0.0, "stable_flag": True, "resonant": False,
    }


def cmd_growth(config: RunConfig, mu_y=None, branch=None, mu=None, out=None) -> int:
    """Prediction versus numerics at one resonant point, as JSON."""
    pw = config.pw
    tol = config.tolerances["resonance"]
    try:
        if mu is None:
            mu = resonance.solve_branch(pw, mu_y, branch or resonance.branch_of(mu_y), tol).mu
        else:
            mu = np.asarray(mu, dtype=float)
            try:
                resonance.check_resonant(pw, mu, tol)
            except ResonanceError:
                if kperp_dot(pw, mu) == 0.0:
                    emit(json_text(_parallel_report(config, mu)), out)
                    return EXIT_OK
                raise
        rep = spectral.unstable_pair(pw, mu, config.eps, config.M,
                                     gap_threshold=config.tolerances["gap_threshold"])
    except ValueError as exc:
        if isinstance(exc, PSIError):
            print(f"solver failure: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PSIError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    pred = reduced.lambda_pm(pw, mu, config.eps)
    d = rep.to_dict()
    d["lambda_plus_pred"] = [pred.lambda_plus_pred.real, pred.lambda_plus_pred.imag]
    d["lambda_minus_pred"] = [pred.lambda_minus_pred.real, pred.lambda_minus_pred.imag]
    d["stable_flag"] = pred.stable_flag
    d["resonant"] = True
    if config.output_format == "csv":
        keys = ["M", "eps", "max_re", "pred_max_re", "residual", "conv_gap", "e_mu"]
        text = csv_text(["mu1", "mu2"] + keys, [[float(mu[0]), float(mu[1])] + [d[k] for k in keys]])
    else:
        text = json_text(d)
    emit(text, out)
    if rep.gap.near_exceptional:
        print(f"near-exceptional point: gap={rep.gap.gap:.3e}", file=sys.stderr)
        return EXIT_NEAR_EXCEPTIONAL
    return EXIT_OK


def _scan_row(config, y, branch):
    pw = config.pw
    p = resonance.solve_branch(pw, y, branch, config.tolerances["resonance"])
    rep = spectral.unstable_pair(pw, p.mu, config.eps, config.M, check_convergence=False,
                                 gap_threshold=config.tolerances["gap_threshold"])
    return (y, rep.e_value, rep.max_re, rep.pred_max_re, rep.residual)


def cmd_scan(config: RunConfig, branch, ys, out=None, jobs: int = 1) -> int:
    """``y,e_mu,max_re_numeric,pred,residual`` along a branch."""
    pw = config.pw

    def job(y):
        try:
            return _scan_row(config, y, branch or resonance.branch_of(y)), None
        except (PSIError, ValueError) as exc:
            return (y, math.nan, math.nan, math.nan, math.nan), f"{exc}"

    with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
        results = list(ex.map(job, ys))  # map keeps input order
    failed = 0
    for (row, err) in results:
        if err is not None:
            failed += 1
            print(f"row y={row[0]} failed: {err}", file=sys.stderr)
    rows = [r for r, _ in results]
    if config.output_format == "json":
        keys = ["y", "e_mu", "max_re_numeric", "pred", "residual"]
        text = json_text([dict(zip(keys, r)) for r in rows])
    else:
        text = csv_text(["y", "e_mu", "max_re_numeric", "pred", "residual"], rows)
    emit(text, out)
    good = [r for r, err in results if err is None and r[0] > 0]
    if good:
        lo = min(good, key=lambda r: r[0])
        hi = max(good, key=lambda r: r[0])
        print(f"# smallest y={lo[0]}: e/tau={lo[1] / (lo[0] / pw.n_hat):.6g} "
              f"(limit {reduced.e_small_tau_slope(pw):.6g})", file=sys.stderr)
        print(f"# largest y={hi[0]}: e={hi[1]:.6g} (limit {reduced.e_large_limit(pw):.6g})",
              file=sys.stderr)
    return EXIT_SOLVER if failed else EXIT_OK


# -- validation suite -------------------------------------------------------

def _rel(a, b):
    s = max(abs(a), abs(b))
    return 0.0 if s == 0 else abs(a - b) / s


def _samples(pw, count=12):
    ys = np.concatenate([np.geomspace(0.05, 50, count // 2), -np.geomspace(0.05, 50, count // 2)])
    pts = []
    for y in ys:
        if y == -pw.n_hat:
            continue
        pts.append(resonance.solve_branch(pw, y, resonance.branch_of(y)).mu)
    return pts


def validation_checks(config: RunConfig):
    """Yield ``(name, ok, detail)`` for every self-check."""
    pw = config.pw
    eps = config.eps
    tol = config.tolerances["resonance"]
    pts = _samples(pw)
    generic = [p for p in pts if not resonance.gap_alpha(pw, p).near_exceptional]

    worst = max(abs(resonance.residual_F(pw, *p)) for p in pts)
    yield "resonance_residual", worst <= tol, f"max |F| = {worst:.2e}"

    x = resonance.solve_branch(pw, -2 * pw.n_hat, "minus").mu[0]
    yield "anchor_minus_branch", abs(x) <= 1e-12, f"phi_-(-2n) = {x:.2e}"

    worst = 0.0
    for p in pts:
        for c in entanglement.Coefficient:
            cf = entanglement.closed_form(pw, p, c, normalized=True)
            bf = entanglement.bruteforce(pw, p, c, normalized=True)
            worst = max(worst, abs(cf - bf) / max(abs(cf), abs(bf), 1e-300))
    yield "closed_forms_vs_bruteforce", worst <= 1e-12, f"max rel err = {worst:.2e}"

    worst = 0.0
    for p in generic:
        c_cf = reduced.beta_gamma_combos(pw, p)
        c_rr = reduced.residue_route(pw, p).combos
        worst = max(worst, _rel(c_cf[0], c_rr[0]), _rel(c_cf[1], c_rr[1]))
    yield "combos_vs_residue_route", worst <= 1e-10, f"max rel err = {worst:.2e}"

    worst = 0.0
    for p in pts:
        e = reduced.e_mu(pw, p)
        b1, b0 = reduced.b_coeffs(pw, p)
        worst = max(worst, abs(e + b1 * b0) / max(1.0, abs(e)))
    yield "factorization", worst <= 1e-13, f"max |e + b1 b0| = {worst:.2e}"

    # e rebuilt from the triad coefficients, against e from the residue route
    worst = 0.0
    for p in generic:
        b = float(np.hypot(*p))
        if abs(b - pw.k_norm) < 1e-6 or b > pw.k_norm:
            continue
        c1, c0 = reduced.residue_route(pw, p).combos
        i11, i00 = reduced.iota0(pw, p)
        worst = max(worst, _rel(reduced.e_from_I(pw, p), -(c1 / i00) * (c0 / i11)))
    yield "triad_identity", worst <= 1e-10, f"max rel err = {worst:.2e}"

    worst_re = worst_band = worst_aff = 0.0
    for p in pts[::3]:
        T = bloch.assemble(pw, p, 4, eps)
        scale = np.abs(T.entries).max()
        worst_re = max(worst_re, np.abs(T.entries.real).max() / scale)
        for band in range(2, 9):
            for s in (band, -band):
                worst_band = max(worst_band, np.abs(bloch.band_project(T, s).entries).max())
        T0 = bloch.assemble(pw, p, 4, 0.0).entries
        T1 = bloch.assemble(pw, p, 4, 1.0).entries
        worst_aff = max(worst_aff, np.abs(T.entries - T0 - eps * (T1 - T0)).max() / scale)
    ok = worst_re <= 1e-15 and worst_band == 0 and worst_aff <= 1e-15
    yield "operator_structure", ok, (f"real part {worst_re:.1e}, far bands {worst_band:.1e}, "
                                     f"affinity {worst_aff:.1e}")

    worst_m = worst_c = 0.0
    for p in pts[::3]:
        ev = spectral.eig_all(bloch.assemble(pw, p, 6, eps))
        evm = spectral.eig_all(bloch.assemble(pw, -np.asarray(p), 6, eps))
        worst_m = max(worst_m, spectral.mirror_defect(ev))
        worst_c = max(worst_c, spectral.multiset_distance(evm, ev.conj()))
    yield "spectral_symmetries", worst_m <= 1e-8 and worst_c <= 1e-8, \
        f"mirror {worst_m:.1e}, mu-conjugation {worst_c:.1e}"

    p = resonance.solve_branch(pw, 3.0, "plus").mu
    if eps == 0:
        rep = spectral.unstable_pair(pw, p, 0.0, 8, check_convergence=False)
        wu = reduced.w_underline(pw, p)
        dev = max(abs(z - 1j * wu) for z in rep.unstable_pair)
        yield "spectral_prediction", dev <= 1e-12, f"eps = 0: pair deviation {dev:.1e}"
    else:
        e0 = min(eps, spectral.EPS_MAX)
        h = spectral.halving_study(pw, p, (e0, e0 / 2), M=16)
        rep = spectral.unstable_pair(pw, p, e0, 16, check_convergence=False)
        off = int(np.count_nonzero(np.abs(rep.eigenvalues.real) > 1e-8))
        rel = h.residuals[0] / max(rep.pred_max_re, 1e-300)
        ok = off == 2 and h.residuals[1] <= 0.35 * h.residuals[0] and rel < 0.1
        yield "spectral_prediction", ok, (f"off-axis {off}, residual {h.residuals[0]:.2e} "
                                          f"({rel:.1e} relative), halving ratio {h.ratios[0]:.2f}")


def cmd_validate(config: RunConfig, out=None) -> int:
    results = []
    try:
        for name, ok, detail in validation_checks(config):
            results.append((name, bool(ok), detail))
    except PSIError as exc:
        print(f"solver failure during validation: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    if config.output_format == "json":
        text = json_text([{"check": n, "pass": ok, "detail": d} for n, ok, d in results])
    else:
        text = "".join(f"{'PASS' if ok else 'FAIL'} {n}: {d}\n" for n, ok, d in results)
    emit(text, out)
    failed = sum(not ok for _, ok, _ in results)
    return 0 if failed == 0 else min(EXIT_VALIDATION_BASE + failed, EXIT_CAP)


# -- argument parsing -------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file; flags override it")
    common.add_argument("--k", nargs=2, type=int, metavar=("m", "n"), help="primary wavevector")
    common.add_argument("--N", type=float, help="buoyancy frequency (default 1)")
    common.add_argument("--eps", type=float, help="wave amplitude (default 0.01)")
    common.add_argument("--M", type=int, help="harmonic cutoff (default 32)")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--seed", type=int)
    common.add_argument("--gap-threshold", dest="gap_threshold", type=float)
    common.add_argument("--tol", type=float, help="resonance residual tolerance (default 1e-12)")

    p = _Parser(prog="psiwave", description=__doc__.split("\n\n")[0].strip())
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def ys(sp):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--y", nargs="+", type=float)
        g.add_argument("--y-range", dest="y_range", nargs=3, type=float, metavar=("a", "b", "s"))

    sp = sub.add_parser("resonance", parents=[common], help="trace a branch of the resonant set")
    sp.add_argument("--branch", choices=("plus", "minus"), required=True)
    ys(sp)

    sp = sub.add_parser("growth", parents=[common], help="prediction vs spectrum at one point")
    sp.add_argument("--branch", choices=("plus", "minus"))
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--y", type=float)
    g.add_argument("--mu", nargs=2, type=float, metavar=("mu1", "mu2"))

    sp = sub.add_parser("scan", parents=[common], help="growth function along a branch")
    sp.add_argument("--branch", choices=("plus", "minus"))
    sp.add_argument("--jobs", type=int, default=1)
    ys(sp)

    sub.add_parser("validate", parents=[common], help="run the self-validation suite")
    return p


def main(argv=None) -> int:
    try:
        args = make_parser().parse_args(argv)
    except SystemExit as exc:
        # argparse exits on --help and on usage errors
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        config = build_config(args)
        if args.command == "resonance":
            return cmd_resonance(config, Branch.parse(args.branch), _checked_ys(args), args.out)
        if args.command == "growth":
            return cmd_growth(config, args.y, args.branch, args.mu, args.out)
        if args.command == "scan":
            return cmd_scan(config, args.branch, _checked_ys(args), args.out, args.jobs)
        return cmd_validate(config, args.out)
    except (UsageError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _checked_ys(args):
    ys = y_values(args)
    if args.branch:
        b = Branch.parse(args.branch)
        bad = [y for y in ys if (y <= 0 if b is Branch.PLUS else y >= 0)]
        if bad and args.command == "resonance":
            raise UsageError(f"y values {bad} are not on the {b.value} branch")
    return ys
