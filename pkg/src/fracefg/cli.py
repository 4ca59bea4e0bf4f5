"""Command-line entry points: ``run``, ``suite`` and ``flops``.

Usage::

    python -m fracefg run case.toml --out results/
    python -m fracefg suite configs/ --seed-tables my_tables.csv
    python -m fracefg flops case.toml

Exit codes: 0 success, 2 invalid configuration, 3 nonlinear iteration
failed to converge, 4 internal invariant or solver failure.

Each ``run`` writes into ``<out>/<case id>/``:

``solution.csv``  x, y, u0, v0, w0 (MLS-reconstructed at the nodes)
``profile.csv``   x, y, w0, w_bar along the horizontal centre line
``report.json``   report rows, convergence history and timing
``flops.json``    operation-count estimate
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from pathlib import Path

from . import __version__
from .config import RunConfig, build_case, load_config
from .errors import (ConfigurationError, CoverageError, InvariantError,
                     NonConvergenceError, SolverError)
from .plate import PlateModel
from .report import (compare_tables, ensure_dir, load_reference,
                     write_json, write_nodal_csv, write_profile_csv)
from .solver import estimate_flops, solve_case

__all__ = ["main", "run_config", "EXIT_OK", "EXIT_VALIDATION",
           "EXIT_NONCONVERGENCE", "EXIT_INTERNAL", "SUITE_COLUMNS"]

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3
EXIT_INTERNAL = 4

SUITE_COLUMNS = ("case_id", "status", "w0", "normalized", "table", "row",
                 "column", "reference", "rel_error", "passed")

log = logging.getLogger("fracefg")


def run_config(cfg: RunConfig, out_dir, reference, model_cache=None):
    """Solve one configuration and write its artifacts; return the report."""
    t0 = time.perf_counter()
    case = build_case(cfg)
    model = None
    key = None
    if model_cache is not None:
        key = (cfg.shape, cfg.a, cfg.b, cfg.h, cfg.E, cfg.nu, cfg.alpha,
               cfg.h_l, cfg.n_gjp, repr(sorted(cfg.grid.items())),
               cfg.mesh_order, cfg.mesh_cells)
        model = model_cache.get(key)
    if model is None:
        model = PlateModel(case)
        if key is not None:
            model_cache[key] = model
    else:
        case.cloud, case.mesh = model.case.cloud, model.case.mesh
    t1 = time.perf_counter()
    out = ensure_dir(Path(out_dir) / cfg.case_id)
    try:
        result = solve_case(case, cfg.solver, model)
    except NonConvergenceError as exc:
        write_json(out / "report.json", {
            "case_id": cfg.case_id, "status": "nonconvergence",
            "message": str(exc),
            "history": [h.as_dict() for h in exc.history]})
        raise
    t2 = time.perf_counter()
    rows = compare_tables(case, result.center_deflection, cfg.compare,
                          reference)
    write_nodal_csv(out / "solution.csv", case, result.u_g)
    write_profile_csv(out / "profile.csv", case, result.u_g,
                      cfg.profile_points)
    flops = estimate_flops(case).as_dict()
    write_json(out / "flops.json", flops)
    report = {
        "case_id": cfg.case_id,
        "status": "ok",
        "mode": cfg.mode,
        "units": {"w0": "m", "q0": "Pa", "lengths": "m"},
        "q0": cfg.q0,
        "p_bar": cfg.p_bar,
        "p_bar_convention": cfg.p_bar_convention if cfg.p_bar else None,
        "alpha": cfg.alpha,
        "h_l": cfg.h_l,
        "n_nodes": case.n,
        "gdof": case.gdof,
        "rows": [r.as_dict() for r in rows],
        "history": [h.as_dict() for h in result.history],
        "flops": flops,
        "seconds": {"operators": t1 - t0, "solve": t2 - t1},
    }
    write_json(out / "report.json", report)
    return report


def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed-tables", metavar="PATH", default=None,
                        help="golden reference CSV (default: bundled tables)")
    common.add_argument("--out", metavar="DIR", default=None,
                        help="output directory (default: config or ./out)")
    common.add_argument("-v", "--verbose", action="store_true")
    p = argparse.ArgumentParser(prog="fracefg", parents=[common],
                                description="fractional-order EFG plate solver")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="solve one configuration")
    r.add_argument("config")
    s = sub.add_parser("suite", parents=[common],
                       help="solve every *.toml in a directory")
    s.add_argument("directory")
    f = sub.add_parser("flops", parents=[common],
                       help="print the operation-count estimate")
    f.add_argument("config")
    return p


def _status_code(exc):
    if isinstance(exc, (ConfigurationError, CoverageError)):
        return EXIT_VALIDATION
    if isinstance(exc, NonConvergenceError):
        return EXIT_NONCONVERGENCE
    return EXIT_INTERNAL


def _cmd_run(args, reference):
    cfg = load_config(args.config)
    out = args.out or cfg.out_dir or "out"
    report = run_config(cfg, out, reference)
    for row in report["rows"]:
        msg = f"{row['case_id']}: w0 = {row['w0']:.6e} m, {row['formula']}"
        if row["reference"] is not None:
            msg += (f" -> {row['normalized']:.5g} vs {row['reference']:.5g}"
                    f" (rel. error {row['rel_error']:.2%},"
                    f" {'pass' if row['passed'] else 'FAIL'})")
        elif row["table"]:
            msg += " (reference row missing; report incomplete)"
        print(msg)
    return EXIT_OK


def _cmd_suite(args, reference):
    d = Path(args.directory)
    if not d.is_dir():
        raise ConfigurationError(f"{d}: not a directory")
    paths = sorted(d.glob("*.toml"))
    if not paths:
        raise ConfigurationError(f"{d}: no *.toml configurations")
    # validate everything up front
    cfgs = [load_config(p) for p in paths]
    out = Path(args.out or "out")
    ensure_dir(out)
    cache = {}
    worst = EXIT_OK
    lines = []
    for cfg in cfgs:
        try:
            rep = run_config(cfg, out, reference, cache)
            for row in rep["rows"]:
                lines.append([cfg.case_id, "ok", row["w0"], row["normalized"],
                              row["table"], row["row"], row["column"],
                              row["reference"], row["rel_error"],
                              row["passed"]])
        except Exception as exc:  # noqa: BLE001 - reported per case
            code = _status_code(exc)
            if code == EXIT_INTERNAL and not isinstance(
                    exc, (InvariantError, SolverError)):
                raise
            worst = max(worst, code)
            lines.append([cfg.case_id, type(exc).__name__] + [""] * 8)
            log.error("%s: %s", cfg.case_id, exc)
    with open(out / "suite.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(SUITE_COLUMNS)
        wr.writerows(lines)
    for line in lines:
        print(",".join("" if v is None else str(v) for v in line))
    return worst


def _cmd_flops(args, reference):
    cfg = load_config(args.config)
    rep = estimate_flops(build_case(cfg)).as_dict()
    for k in ("gdof", "n_elements", "n_gp", "n_gjp", "b_tilde", "stiffness",
              "total", "b_tilde_order", "stiffness_order"):
        print(f"{k}: {rep[k]}")
    return EXIT_OK


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        reference = load_reference(args.seed_tables)
        handler = {"run": _cmd_run, "suite": _cmd_suite,
                   "flops": _cmd_flops}[args.command]
        return handler(args, reference)
    except NonConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for h in exc.history[-5:]:
            print(f"  step {h.step} iter {h.iteration}: |du| = {h.du_norm:.3e}",
                  file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (ConfigurationError, CoverageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InvariantError, SolverError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
