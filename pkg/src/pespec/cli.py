"""Command-line surface: batch runs, norm evaluation, verification
suites, and CSV/TBSF export.

All floating-point CSV values are printed with 17 significant digits and
files are written atomically (temp file + rename), so identical configs
and seeds produce byte-identical artifacts.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

import os

_threads = os.environ.get("PE_THREADS", "").strip()
if _threads and _threads != "0":
    for _var in (
        "OMP_NUM_THREADS",
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(_var, _threads)

import argparse
import math
import re
import sys
import tempfile

import numpy as np

from . import analysis, besov, fields, solver, suite
from .solver import BlowupError, SolverConfig
from .torus import ConstraintError, TorusGrid, grid_2d, grid_3d, load_tbsf

FLUX_TOL = 1e-9
COMMUTATOR_TOL = 1e-10
ENERGY_TOL = 1e-6
TERMINAL_TOL = 1e-8


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return "%.17g" % float(x)


def write_csv(path: str, header: list, rows: list) -> None:
    """Atomically write one CSV file with deterministic formatting."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    text = ",".join(header) + "\n"
    for row in rows:
        text += ",".join(_fmt(x) for x in row) + "\n"
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def parse_grid(text: str, lam_text: str = "1") -> TorusGrid:
    """Grid designator: one size means a 3D cube, two sizes a 2D slab."""
    sizes = [int(p) for p in re.split(r"[x,]", text) if p]
    lams = [float(p) for p in lam_text.split(",") if p]
    if len(sizes) == 1:
        sizes = sizes * 3
    if len(lams) == 1:
        lams = lams * len(sizes)
    if len(lams) != len(sizes):
        raise ValueError("lambda list does not match grid dimension")
    if len(sizes) == 2:
        return grid_2d(sizes[0], sizes[1], tuple(lams))
    if len(sizes) == 3:
        return grid_3d(sizes[0], sizes[1], sizes[2], tuple(lams))
    raise ValueError("grid must be 2D or 3D")


def _norms_rows(series) -> tuple[list, list]:
    header = ["time", "energy", "dissipation"] + list(series.besov_traces)
    idx = series.snapshot_indices
    rows = []
    for row_i, step in enumerate(idx):
        row = [series.times[step], series.energy[step], series.dissipation[step]]
        row.extend(series.besov_traces[k][row_i] for k in series.besov_traces)
        rows.append(row)
    return header, rows


def _energy_rows(series) -> tuple[list, list]:
    residual = analysis.energy_residual(series)
    header = ["time", "energy", "dissipation", "residual"]
    rows = [
        [t, e, d, r]
        for t, e, d, r in zip(series.times, series.energy, series.dissipation, residual)
    ]
    return header, rows


def _load_run(args) -> tuple[SolverConfig, "object"]:
    parsed = solver.load_config(args.config)
    v0 = fields.make_named_field(parsed.init_name, parsed.config.grid,
                                 **parsed.init_params)
    return parsed.config, v0


def cmd_simulate(args) -> int:
    config, v0 = _load_run(args)
    try:
        series = solver.simulate(config, v0, out_dir=args.out, tag=args.tag)
    except BlowupError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        if args.out and exc.series is not None:
            h, rows = _energy_rows(exc.series)
            write_csv(os.path.join(args.out, "energy.csv"), h, rows)
        return 1
    if args.out:
        h, rows = _norms_rows(series)
        write_csv(os.path.join(args.out, "norms.csv"), h, rows)
        h, rows = _energy_rows(series)
        write_csv(os.path.join(args.out, "energy.csv"), h, rows)
    residual = analysis.energy_residual(series)
    print(
        f"steps={len(series.times) - 1} energy0={_fmt(series.energy[0])} "
        f"energyT={_fmt(series.energy[-1])} max|residual|={_fmt(np.max(np.abs(residual)))}"
    )
    return 0


def cmd_norm(args) -> int:
    u = load_tbsf(args.field)
    spec = besov.parse_spec(args.spec)
    print(_fmt(besov.besov_norm(u, spec)))
    return 0


def cmd_flux_check(args) -> int:
    grid = parse_grid(args.grid, args.grid_lambda)
    v_d = fields.random_state(grid, seed=args.seed, amplitude=1.0, mean_free_z=True)
    v_1 = fields.random_state(grid, seed=args.seed + 1, amplitude=1.0, mean_free_z=True)
    fb = analysis.flux_decompose(v_d, v_1)
    if args.out:
        header = ["j_range"] + [f"J{i}" for i in range(1, 7)] + [
            "direct_H", "direct_z", "mismatch",
        ]
        row = [f"{fb.j_range[0]}:{fb.j_range[-1]}", *fb.J, fb.direct_H, fb.direct_z,
               fb.mismatch]
        write_csv(os.path.join(args.out, "flux_breakdown.csv"), header, [row])
    print(f"sum_J={_fmt(fb.total)} direct={_fmt(fb.direct_H + fb.direct_z)} "
          f"mismatch={_fmt(fb.mismatch)}")
    return 0 if fb.mismatch <= FLUX_TOL else 1


def cmd_mollify_check(args) -> int:
    import inspect

    grid = parse_grid(args.grid, args.grid_lambda)
    maker = fields.NAMED_FIELDS.get(args.field)
    params = {}
    if maker is not None and "seed" in inspect.signature(maker).parameters:
        params["seed"] = args.seed
    v = fields.make_named_field(args.field, grid, **params)
    levels = [int(x) for x in args.levels.split(",") if x]
    rows = []
    worst = 0.0
    for n_level in levels:
        terms = analysis.mollified_commutators(v, n_level, p=args.p)
        worst = max(worst, terms.residual_vv, terms.residual_wv)
        rows.append(
            [terms.N]
            + [terms.norms[f"I{m}"] for m in range(1, 9)]
            + [terms.residual_vv, terms.residual_wv, args.p, args.gamma]
        )
    if args.out:
        header = ["N"] + [f"I{m}" for m in range(1, 9)] + [
            "res_vv", "res_wv", "p", "gamma",
        ]
        write_csv(os.path.join(args.out, "commutators.csv"), header, rows)
    print(f"levels={levels} worst_residual={_fmt(worst)}")
    return 0 if worst <= COMMUTATOR_TOL else 1


def cmd_energy_check(args) -> int:
    config, v0 = _load_run(args)
    series = solver.simulate(config, v0)
    residual = analysis.energy_residual(series)
    peak = float(np.max(np.abs(residual)))
    if args.out:
        h, rows = _energy_rows(series)
        write_csv(os.path.join(args.out, "energy.csv"), h, rows)
    print(f"max|residual|={_fmt(peak)} tol={_fmt(args.tol)}")
    return 0 if peak <= args.tol else 1


def cmd_uniqueness(args) -> int:
    config, v0 = _load_run(args)
    report = analysis.uniqueness_experiment(
        config, v0, delta=args.delta, variant=args.variant, p=args.p,
        gamma=args.gamma, seed=args.seed,
    )
    if args.out:
        header = ["t", "lhs", "envelope", "C"]
        rows = [
            [t, l, e, report.C]
            for t, l, e in zip(report.times, report.lhs, report.envelope)
        ]
        write_csv(os.path.join(args.out, "gronwall.csv"), header, rows)
    print(
        f"variant={report.variant} delta={_fmt(report.delta)} C={_fmt(report.C)} "
        f"terminal_ratio={_fmt(report.terminal_ratio)} envelope_ok={report.envelope_ok}"
    )
    if args.delta != 0.0:
        return 0 if report.envelope_ok else 1
    return 0 if report.terminal_ratio <= TERMINAL_TOL else 1


def cmd_proptest(args) -> int:
    results = suite.run_all(out=sys.stdout)
    failures = [r for r in results if not r.passed]
    print(f"{len(results) - len(failures)}/{len(results)} checks passed")
    return 0 if not failures else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pe",
        description="Spectral hydrostatic-flow toolkit: runs, norms, and "
        "verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument("--out", default=None, help="directory for CSV/TBSF artifacts")

    def add_grid(p):
        p.add_argument("--grid", required=True,
                       help="sizes, e.g. 16 (3D cube) or 64,64 (2D)")
        p.add_argument("--grid-lambda", default="1", dest="grid_lambda",
                       help="scale parameter per axis (default 1)")
        p.add_argument("--seed", type=int, default=7)

    p = sub.add_parser("simulate", help="integrate a configured run")
    p.add_argument("--config", required=True)
    p.add_argument("--tag", default="run", help="snapshot filename prefix")
    add_out(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("norm", help="evaluate one Besov norm of a snapshot")
    p.add_argument("--field", required=True, help="TBSF snapshot path")
    p.add_argument("--spec", required=True,
                   help='e.g. "s=-0.25,p=4,q=inf,axis=z,inner=LinfH"')
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("flux-check", help="verify the six-term flux split")
    add_grid(p)
    add_out(p)
    p.set_defaults(func=cmd_flux_check)

    p = sub.add_parser("mollify-check", help="verify the commutator identity")
    add_grid(p)
    add_out(p)
    p.add_argument("--levels", default="2,3,4", help="comma list of cutoff levels")
    p.add_argument("--field", default="random-H",
                   help=f"named field: {', '.join(sorted(fields.NAMED_FIELDS))}")
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--gamma", type=float, default=4.0)
    p.set_defaults(func=cmd_mollify_check)

    p = sub.add_parser("energy-check", help="run and bound the energy residual")
    p.add_argument("--config", required=True)
    p.add_argument("--tol", type=float, default=ENERGY_TOL)
    add_out(p)
    p.set_defaults(func=cmd_energy_check)

    p = sub.add_parser("uniqueness", help="two-run separation vs envelope")
    p.add_argument("--config", required=True)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--variant", default="dealias", choices=analysis.VARIANTS)
    p.add_argument("--p", type=float, default=4.0)
    p.add_argument("--gamma", type=float, default=4.0)
    p.add_argument("--seed", type=int, default=2024)
    add_out(p)
    p.set_defaults(func=cmd_uniqueness)

    p = sub.add_parser("proptest", help="run the fast self-check battery")
    p.set_defaults(func=cmd_proptest)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except BlowupError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1
    except ConstraintError as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
