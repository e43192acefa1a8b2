"""Command-line front end.

Subcommands: ``solve``, ``analyze``, ``sweep``, ``bound``, ``oracle``. Each
writes one CSV (``--out``) and a short human-readable report on stdout.

Exit codes: 0 success, 1 bad configuration, 2 non-unique or singular
system, 3 oracle disagreement.
"""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, assembly, sylvester
from .errors import NonUniqueError, SingularMatrixError, ValidationError
from .scheme import Grid, SchemeCoefficients, SchemeId, SignalSpec, build_coefficients, sample_boundary

EXIT_OK, EXIT_CONFIG, EXIT_DEGENERATE, EXIT_ORACLE = 0, 1, 2, 3

COMMANDS = ("solve", "analyze", "sweep", "bound", "oracle")
# the sweep reproduces the CFL experiment; the matrix commands need even n_x - 1, n_t
DEFAULT_SIZES = {"sweep": (64, 50)}
MATRIX_SIZES = (9, 8)
DEFAULT_CFL = {"sweep": (0.7, 0.9, 1.0), "bound": tuple(round(0.05 * k, 2) for k in range(1, 21))}


def fmt(x):
    """17 significant digits, so CSVs round-trip exactly."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


@dataclass
class RunConfig:
    command: str
    scheme: SchemeId
    n_x: int
    n_t: int
    c: float
    length: float | None
    horizon: float | None
    h: float | None
    tau: float | None
    cfl: tuple = ()
    wavelength: float = 1.0
    out: Path | None = None
    tol: float | None = None
    seed: int = 0
    count: int = 50
    u0: float = 1.0
    uL: float = 1.0
    extras: dict = field(default_factory=dict)

    def grids(self):
        """One grid per CFL value (or the single grid fixed by h/tau or length/horizon)."""
        if self.h is not None or self.tau is not None:
            return [Grid(h=self.h, tau=self.tau, c=self.c, n_x=self.n_x, n_t=self.n_t)]
        if self.horizon is not None:
            return [Grid.from_extent(self.length, self.horizon, self.n_x, self.n_t, self.c)]
        return [Grid.from_cfl(self.length, self.n_x, self.n_t, self.c, cfl) for cfl in self.cfl]

    def grid(self):
        return self.grids()[0]

    def coefficients(self, grid):
        if self.scheme is SchemeId.CUSTOM:
            return self.extras["weights"]
        return build_coefficients(self.scheme, grid)


def parse_weights(text):
    names = set(SchemeCoefficients.custom(alpha=1.0).weights())
    out = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in names:
            raise ValidationError(f"bad weight {item!r}; expected name=value with name in {sorted(names)}")
        try:
            out[key] = float(value)
        except ValueError:
            raise ValidationError(f"weight {key} is not a number: {value!r}") from None
    return out


def build_parser():
    parser = argparse.ArgumentParser(prog="fdsylvester", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scheme", default="lax", help="leapfrog | lax | lax-wendroff | crank-nicolson | custom")
        p.add_argument("--nx", type=int, default=None, help="number of space steps n_x")
        p.add_argument("--nt", type=int, default=None, help="number of time steps n_t")
        p.add_argument("--c", type=float, default=1.0, help="advection speed")
        p.add_argument("--length", type=float, default=None, help="domain length L (default 1)")
        p.add_argument("--horizon", type=float, default=None, help="final time T (fixes tau = T / n_t)")
        p.add_argument("--h", type=float, default=None, help="space step (use with --tau)")
        p.add_argument("--tau", type=float, default=None, help="time step (use with --h)")
        p.add_argument("--cfl", type=float, action="append", default=None, help="CFL number; repeatable")
        p.add_argument("--wavelength", type=float, default=1.0)
        p.add_argument("--out", type=Path, default=None, help=f"CSV output path (default {name}.csv)")
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--weights", default=None,
                       help="stencil weights for --scheme custom, e.g. beta=2,delta=1,epsilon=1")
        if name == "oracle":
            p.add_argument("--count", type=int, default=50, help="number of random instances")
        if name == "bound":
            p.add_argument("--u0", type=float, default=1.0, help="left Dirichlet value")
            p.add_argument("--uL", type=float, default=1.0, help="right Dirichlet value")
    return parser


def make_config(args):
    cmd = args.command
    nx_default, nt_default = DEFAULT_SIZES.get(cmd, MATRIX_SIZES)
    n_x = nx_default if args.nx is None else args.nx
    n_t = nt_default if args.nt is None else args.nt
    step_family = args.h is not None or args.tau is not None
    extent_family = args.length is not None or args.horizon is not None
    if step_family:
        if args.h is None or args.tau is None:
            raise ValidationError("--h and --tau must be given together")
        if extent_family or args.cfl:
            raise ValidationError("--h/--tau cannot be combined with --length, --horizon or --cfl")
    if args.horizon is not None and args.cfl:
        raise ValidationError("--horizon fixes tau; do not also pass --cfl")
    if cmd == "sweep" and (step_family or args.horizon is not None):
        raise ValidationError("sweep fixes tau from each --cfl value")
    cfl = tuple(args.cfl) if args.cfl else DEFAULT_CFL.get(cmd, (0.5,))
    if any(not (0 < v <= 1) for v in cfl) and cmd in ("sweep", "bound"):
        raise ValidationError("every --cfl must lie in (0, 1]")
    if any(v <= 0 for v in cfl):
        raise ValidationError("--cfl must be positive")
    cfg = RunConfig(
        command=cmd, scheme=SchemeId.parse(args.scheme), n_x=n_x, n_t=n_t, c=args.c,
        length=1.0 if args.length is None and not step_family else args.length,
        horizon=args.horizon, h=args.h, tau=args.tau, cfl=cfl,
        wavelength=args.wavelength, out=args.out or Path(f"{cmd}.csv"),
        tol=args.tol, seed=args.seed,
        count=getattr(args, "count", 50), u0=getattr(args, "u0", 1.0), uL=getattr(args, "uL", 1.0),
    )
    if (cfg.scheme is SchemeId.CUSTOM) != (args.weights is not None):
        raise ValidationError("--weights is required with, and only with, --scheme custom")
    if args.weights is not None:
        cfg.extras["weights"] = SchemeCoefficients.custom(**parse_weights(args.weights))
    if cfg.count < 1:
        raise ValidationError("--count must be >= 1")
    SignalSpec(cfg.wavelength)
    cfg.grids()  # validates every grid up front
    return cfg


def write_csv(path, header, rows):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def _summary_path(out):
    out = Path(out)
    return out.with_name(out.stem + ".summary.csv")


# ---------------------------------------------------------------- commands

def run_solve(cfg):
    g = cfg.grid()
    signal = SignalSpec(cfg.wavelength)
    co = cfg.coefficients(g)
    bd = sample_boundary(signal, g)
    system = assembly.assemble_system(co, g, bd)
    try:
        if system.has_cross:
            rep = sylvester.solve_system(system)
        else:
            rep = sylvester.solve_bartels_stewart(system.m1, system.m2, system.m0,
                                                  gap_rtol=cfg.tol or sylvester.GAP_RTOL)
    except NonUniqueError as exc:
        print(f"non-unique system: spectra gap {exc.gap:.6e}", file=sys.stdout)
        return EXIT_DEGENERATE
    u = rep.x
    ref = assembly.reference_timestep(co, g, bd).values
    res_ref = assembly.residual(system, ref).values
    # closing the last column with the reference's own advanced level makes
    # the two routes comparable column for column
    closed = sylvester.solve_system(system, rhs=system.m0 + res_ref).x
    diff = u - ref
    rows = []
    for i in range(1, g.n_x):
        for n in range(1, g.n_t + 1):
            rows.append((i, n, g.x[i], g.t[n], u[i - 1, n - 1], ref[i - 1, n - 1],
                         diff[i - 1, n - 1], closed[i - 1, n - 1]))
    write_csv(cfg.out, ["i", "n", "x", "t", "u_sylvester", "u_reference", "difference", "u_closed"], rows)
    summary = [
        ("scheme", co.scheme_id.value), ("sigma", g.sigma),
        ("residual_norm_sylvester", rep.residual_norm),
        ("residual_norm_reference", float(np.linalg.norm(res_ref))),
        ("spectra_gap", rep.spectra_gap),
        ("max_abs_difference", float(np.max(np.abs(diff)))),
        ("max_abs_closed_difference", float(np.max(np.abs(closed - ref)))),
    ]
    write_csv(_summary_path(cfg.out), ["quantity", "value"], summary)
    for k, v in summary:
        print(f"{k:28s} {fmt(v)}")
    return EXIT_OK


def sweep_rows(cfg):
    signal = SignalSpec(cfg.wavelength)
    rows = []
    for cfl, g in sorted(zip(cfg.cfl, cfg.grids()), key=lambda p: p[0]):
        co = cfg.coefficients(g)
        bd = sample_boundary(signal, g)
        u = assembly.reference_timestep(co, g, bd).values
        ue = assembly.exact_matrix(signal, g).values
        err = np.sqrt(np.sum((u - ue) ** 2, axis=0) * g.h)
        for n in range(1, g.n_t + 1):
            rows.append((cfl, n, g.t[n], err[n - 1]))
    return rows


def run_sweep(cfg):
    rows = sweep_rows(cfg)
    write_csv(cfg.out, ["cfl", "n", "t", "l2_error"], rows)
    for cfl in sorted(set(cfg.cfl)):
        errs = [r[3] for r in rows if r[0] == cfl]
        print(f"cfl {cfl:<5g} max L2 error {max(errs):.6e}  final {errs[-1]:.6e}")
    return EXIT_OK


def analyze_rows(cfg):
    g = cfg.grid()
    signal = SignalSpec(cfg.wavelength)
    co = cfg.coefficients(g)
    bd = sample_boundary(signal, g)
    system = assembly.assemble_system(co, g, bd)
    rows = [("grid", "sigma", g.sigma), ("grid", "h", g.h), ("grid", "tau", g.tau)]
    rows += [("coefficients", k, v) for k, v in co.weights().items()]

    uq = sylvester.uniqueness_check(system, rtol=cfg.tol or sylvester.GAP_RTOL)
    rows += [("uniqueness", "paper_verdict", uq.paper_verdict.value),
             ("uniqueness", "exact_verdict", uq.exact_verdict.value),
             ("uniqueness", "paper_gap", uq.paper_gap),
             ("uniqueness", "exact_gap", uq.exact_gap)]

    inv = sylvester.invertibility_check_m1(system)
    rows += [("invertibility", "paper_determinant", inv.paper_determinant),
             ("invertibility", "exact_determinant", inv.exact_determinant),
             ("invertibility", "paper_verdict", inv.paper_verdict.value),
             ("invertibility", "exact_verdict", inv.exact_verdict.value)]
    if inv.lax_wendroff_condition is not None:
        rows.append(("invertibility", "lax_wendroff_condition", inv.lax_wendroff_condition))

    nil = sylvester.nilpotency_order(system)
    rows += [("nilpotency", "order", "none" if nil.order is None else nil.order),
             ("nilpotency", "degenerate", nil.degenerate),
             ("nilpotency", "decomposition_holds", nil.decomposition_holds)]

    sp = analysis.singular_values_paper(co, g)
    rows += [("spectra", "paper_m1_pair_lo", sp.m1_singular_pair[0]),
             ("spectra", "paper_m1_pair_hi", sp.m1_singular_pair[1]),
             ("spectra", "paper_m2_alpha_sq", sp.m2_singular_pair[0]),
             ("spectra", "paper_m2_gamma_sq", sp.m2_singular_pair[1])]
    rows += [("spectra", f"exact_m1_sigma_{k}", v) for k, v in enumerate(sp.exact_m1)]
    rows += [("spectra", f"exact_m2_sigma_{k}", v) for k, v in enumerate(sp.exact_m2)]
    rows += [("spectra", "max_deviation_m1_sq", sp.max_deviation_m1),
             ("spectra", "max_deviation_m2_sq", sp.max_deviation_m2)]

    if system.has_cross:
        rows.append(("bound", "status", "not applicable: cross operator"))
    else:
        br = analysis.error_bound(system, assembly.exact_matrix(signal, g))
        rows += [("bound", k, getattr(br, k)) for k in (
            "lhs", "f_tilde_norm", "f_norm", "u1_norm_sq", "v2_norm_sq",
            "m1_norm_sq_paper", "m1_norm_sq_exact", "m2_norm_sq_paper", "m2_norm_sq_exact",
            "m0_norm", "u_exact_norm", "rhs")]
        rows.append(("bound", "holds", br.holds))
    return rows


def run_analyze(cfg):
    rows = analyze_rows(cfg)
    write_csv(cfg.out, ["section", "quantity", "value"], rows)
    d = {(s, q): v for s, q, v in rows}
    print(f"uniqueness     {d['uniqueness', 'paper_verdict']} (paper)  {d['uniqueness', 'exact_verdict']} (exact)")
    print(f"M1             {d['invertibility', 'paper_verdict']} (paper formula, det {fmt(d['invertibility', 'paper_determinant'])})"
          f"  {d['invertibility', 'exact_verdict']} (exact, det {fmt(d['invertibility', 'exact_determinant'])})")
    print(f"nilpotency     order {d['nilpotency', 'order']}")
    print(f"singular vals  max |paper - sigma^2|: M1 {fmt(d['spectra', 'max_deviation_m1_sq'])}"
          f"  M2 {fmt(d['spectra', 'max_deviation_m2_sq'])}")
    if ("bound", "lhs") in d:
        print(f"bound          |F11~| = {fmt(d['bound', 'lhs'])} <= {fmt(d['bound', 'rhs'])}: {fmt(d['bound', 'holds'])}")
    return EXIT_OK


def run_bound(cfg):
    signal = SignalSpec(cfg.wavelength)
    rows = []
    for cfl in sorted(cfg.cfl):
        lb = analysis.lax_bound(cfl, cfg.n_x, cfg.n_t, cfg.u0, cfg.uL)
        lhs = rhs = ""
        g = Grid.from_cfl(cfg.length, cfg.n_x, cfg.n_t, cfg.c, cfl)
        if g.is_even:
            co = build_coefficients(SchemeId.LAX, g)
            system = assembly.assemble_system(co, g, sample_boundary(signal, g))
            br = analysis.error_bound(system, assembly.exact_matrix(signal, g))
            lhs, rhs = br.lhs, br.rhs
        rows.append((cfl, lb, lhs, rhs))
    write_csv(cfg.out, ["cfl", "lax_bound", "f11_norm", "bound_rhs"], rows)
    best = min(rows, key=lambda r: r[1])
    print(f"lax bound minimal at cfl = {fmt(best[0])} (value {fmt(best[1])})")
    return EXIT_OK


def run_oracle(cfg):
    rng = np.random.default_rng(cfg.seed)
    tol = cfg.tol or 1e-9
    rows, failures = [], 0
    for k in range(cfg.count):
        a, b, c = sylvester.random_instance(rng)
        x = sylvester.solve_bartels_stewart(a, b, c)
        xk = sylvester.kronecker_solve(a, b, c)
        rel = float(np.linalg.norm(x.x - xk) / max(np.linalg.norm(xk), np.finfo(float).tiny))
        failures += rel > tol
        rows.append((k, a.shape[0], b.shape[0], x.spectra_gap, x.residual_norm, rel))
    write_csv(cfg.out, ["instance", "m", "n", "spectra_gap", "residual_norm", "rel_error"], rows)
    print(f"{cfg.count} instances, max relative difference {max(r[5] for r in rows):.3e}, "
          f"{failures} above {tol:g}")
    return EXIT_ORACLE if failures else EXIT_OK


RUNNERS = {"solve": run_solve, "analyze": run_analyze, "sweep": run_sweep,
           "bound": run_bound, "oracle": run_oracle}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        cfg = make_config(args)
    except ValidationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return RUNNERS[cfg.command](cfg)
    except NonUniqueError as exc:
        print(f"non-unique system: spectra gap {exc.gap:.6e}", file=sys.stdout)
        return EXIT_DEGENERATE
    except SingularMatrixError as exc:
        print(f"singular system: {exc}", file=sys.stdout)
        return EXIT_DEGENERATE
    except ValidationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
