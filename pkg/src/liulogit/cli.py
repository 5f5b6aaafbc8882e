"""Command-line interface.

Subcommands: fit (maximum likelihood report), diagnose (collinearity
diagnostics), compare (SMSE table and superiority verdicts on a
dataset), simulate (Monte Carlo table reproduction). Every run writes a
manifest.json into the output directory recording the exact parameters,
input digests, and output digests needed to reproduce it byte for byte.

Exit codes: 0 success, 2 input or usage error, 3 numerical failure.
"""

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .comparison import compare
from .dataio import (
    default_restrictions_path,
    load_config,
    load_csv,
    load_restrictions,
    sha256_file,
    wide_table_text,
)
from .diagnostics import diagnostics
from .exceptions import NumericalError, SeparationError
from .model import fit_mle
from .shrinkage import (
    ESTIMATOR_NAMES,
    aulle_report,
    lle_report,
    mle_report,
    smse_over_grid,
    sraulle_report,
    srmle_report,
)
from .simulation import (
    DEFAULT_D_GRID,
    SimulationConfig,
    emit_table,
    run_monte_carlo,
)

# pairs reported by `compare`: is the second estimator superior to the first?
COMPARISON_PAIRS = (
    ("MLE", "SRAULLE"),
    ("LLE", "SRAULLE"),
    ("AULLE", "SRAULLE"),
    ("SRMLE", "SRAULLE"),
)


def _parse_d_grid(text):
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad d-grid {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("d-grid must not be empty")
    return values


def _parse_int_list(text):
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _parse_float_list(text):
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="liulogit",
        description=(
            "Shrinkage and stochastically restricted estimators for "
            "multicollinear binary logistic regression."
        ),
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_data_args(p):
        p.add_argument("--data", required=True, help="CSV file with a header row")
        p.add_argument(
            "--response",
            required=True,
            help="response column name or 0-based index",
        )

    def add_out_dir(p):
        p.add_argument(
            "--out-dir",
            default="liulogit-out",
            help="directory for output files and the run manifest",
        )

    p_fit = sub.add_parser("fit", help="maximum likelihood fit and report")
    add_data_args(p_fit)
    p_fit.add_argument("--tol", type=float, default=1e-8)
    p_fit.add_argument("--max-iter", type=int, default=100)
    add_out_dir(p_fit)
    p_fit.set_defaults(func=run_fit)

    p_diag = sub.add_parser("diagnose", help="collinearity diagnostics")
    add_data_args(p_diag)
    scale = p_diag.add_mutually_exclusive_group()
    scale.add_argument(
        "--scaled-condition",
        dest="scaled_condition",
        action="store_true",
        default=True,
        help="condition number of unit-length-scaled X'X (default)",
    )
    scale.add_argument(
        "--raw-condition",
        dest="scaled_condition",
        action="store_false",
        help="condition number of raw X'X",
    )
    add_out_dir(p_diag)
    p_diag.set_defaults(func=run_diagnose)

    p_cmp = sub.add_parser(
        "compare", help="SMSE table and superiority verdicts on a dataset"
    )
    add_data_args(p_cmp)
    p_cmp.add_argument(
        "--restrictions",
        default=None,
        help="restriction spec file (default: the bundled restriction set)",
    )
    p_cmp.add_argument(
        "--d-grid",
        type=_parse_d_grid,
        default=DEFAULT_D_GRID,
        help="comma-separated shrinkage values in (0, 1)",
    )
    p_cmp.add_argument(
        "--h-from-mle",
        action="store_true",
        help="replace the file's h with H times the fitted MLE coefficients",
    )
    p_cmp.add_argument("--tol", type=float, default=1e-8)
    p_cmp.add_argument("--max-iter", type=int, default=100)
    add_out_dir(p_cmp)
    p_cmp.set_defaults(func=run_compare)

    p_sim = sub.add_parser("simulate", help="Monte Carlo comparison tables")
    p_sim.add_argument(
        "--config",
        default=None,
        help="JSON configuration or a previous run's manifest.json",
    )
    p_sim.add_argument("--seed", type=int, default=None, help="master seed")
    p_sim.add_argument("--reps", type=int, default=None, help="replications per cell")
    p_sim.add_argument("--d-grid", type=_parse_d_grid, default=None)
    p_sim.add_argument("--n-values", type=_parse_int_list, default=None)
    p_sim.add_argument("--rho-values", type=_parse_float_list, default=None)
    p_sim.add_argument("--p", type=int, default=None, help="number of predictors")
    p_sim.add_argument(
        "--restrictions", default=None, help="restriction spec file"
    )
    p_sim.add_argument(
        "--redraw-design",
        action="store_true",
        default=None,
        help="draw a fresh design every replication",
    )
    p_sim.add_argument(
        "--fixed-h",
        action="store_true",
        default=None,
        help="freeze the restriction disturbance at one draw per cell",
    )
    p_sim.add_argument(
        "--jobs",
        type=int,
        default=1,
        help="worker threads over (n, rho) cells; never changes results",
    )
    add_out_dir(p_sim)
    p_sim.set_defaults(func=run_simulate)
    return parser


def _prepare_out_dir(args):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir


def _write_manifest(out_dir, command, parameters, inputs, outputs, extra=None):
    manifest = {
        "command": command,
        "version": __version__,
        "parameters": parameters,
        "inputs": {str(path): sha256_file(path) for path in inputs},
        "outputs": {name: sha256_file(out_dir / name) for name in outputs},
    }
    if extra:
        manifest.update(extra)
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _float_cell(value):
    return repr(float(value))


def run_fit(args):
    out_dir = _prepare_out_dir(args)
    data = load_csv(args.data, args.response)
    fit = fit_mle(data, tol=args.tol, max_iter=args.max_iter)
    if not fit.converged:
        raise NumericalError(
            f"IRLS did not converge within {args.max_iter} iterations "
            f"(score norm {fit.score_norm:.3e}); cannot report"
        )
    report = mle_report(fit)
    labels = data.labels()

    print(f"maximum likelihood fit on {data.n} rows, {data.p} columns")
    print(f"converged in {fit.iterations} iterations "
          f"(score norm {fit.score_norm:.3e})")
    width = max(len(s) for s in labels)
    for name, b, v in zip(labels, report.beta, np.diag(report.covariance)):
        print(f"  {name.ljust(width)}  {b: .6f}  (se {np.sqrt(v):.6f})")
    print(f"SMSE (trace of the covariance): {report.smse:.4f}")

    coef_name = "coefficients.csv"
    with open(out_dir / coef_name, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["feature", "estimate", "standard_error"])
        for name, b, v in zip(labels, report.beta, np.diag(report.covariance)):
            writer.writerow([name, _float_cell(b), _float_cell(np.sqrt(v))])
    cov_name = "covariance.csv"
    with open(out_dir / cov_name, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["feature"] + list(labels))
        for name, row in zip(labels, report.covariance):
            writer.writerow([name] + [_float_cell(v) for v in row])

    _write_manifest(
        out_dir,
        "fit",
        {
            "data": str(args.data),
            "response": str(args.response),
            "tol": args.tol,
            "max_iter": args.max_iter,
        },
        inputs=[args.data],
        outputs=[coef_name, cov_name],
        extra={
            "iterations": fit.iterations,
            "score_norm": fit.score_norm,
            "smse": report.smse,
        },
    )
    print(f"wrote {out_dir / coef_name}, {out_dir / cov_name}, "
          f"{out_dir / 'manifest.json'}")
    return 0


def run_diagnose(args):
    out_dir = _prepare_out_dir(args)
    data = load_csv(args.data, args.response)
    report = diagnostics(data, scaled_condition=args.scaled_condition)
    labels = data.labels()

    print(f"pairwise Pearson correlations ({data.n} rows, {data.p} columns)")
    print(
        wide_table_text(
            labels, labels, report.correlation_matrix, corner="", fmt="%.4f"
        )
    )
    kind = "unit-length-scaled" if report.scaled else "raw"
    print(f"condition number of {kind} X'X: {report.condition_number:.4f}")
    if report.flags:
        print("flagged pairs (|r| > 0.9):")
        for a, b, r in report.flags:
            print(f"  {a} ~ {b}: r = {r:.4f}")
    else:
        print("no column pair exceeds |r| > 0.9")

    diag_name = "diagnostics.csv"
    with open(out_dir / diag_name, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["feature"] + list(labels))
        for name, row in zip(labels, report.correlation_matrix):
            writer.writerow([name] + [_float_cell(v) for v in row])
        writer.writerow([])
        writer.writerow(["condition_number", _float_cell(report.condition_number)])
        writer.writerow(["scaled", int(report.scaled)])
        for a, b, r in report.flags:
            writer.writerow(["flag", a, b, _float_cell(r)])

    _write_manifest(
        out_dir,
        "diagnose",
        {
            "data": str(args.data),
            "response": str(args.response),
            "scaled_condition": args.scaled_condition,
        },
        inputs=[args.data],
        outputs=[diag_name],
        extra={"condition_number": report.condition_number},
    )
    print(f"wrote {out_dir / diag_name}, {out_dir / 'manifest.json'}")
    return 0


def run_compare(args):
    out_dir = _prepare_out_dir(args)
    data = load_csv(args.data, args.response)
    restrictions_path = (
        Path(args.restrictions)
        if args.restrictions
        else default_restrictions_path()
    )
    spec = load_restrictions(restrictions_path)
    if spec.p != data.p:
        raise ValueError(
            f"restriction file declares p={spec.p} but the dataset has "
            f"{data.p} design columns"
        )
    fit = fit_mle(data, tol=args.tol, max_iter=args.max_iter)
    if not fit.converged:
        raise NumericalError(
            f"IRLS did not converge within {args.max_iter} iterations "
            f"(score norm {fit.score_norm:.3e}); cannot compare"
        )
    restriction = spec.restriction
    if args.h_from_mle:
        restriction = type(restriction)(
            H=restriction.H,
            h=restriction.H @ fit.beta_hat,
            psi=restriction.psi,
        )
    # plug-in reference: SMSE values are estimates evaluated at the
    # fitted coefficients, not population quantities
    beta_ref = fit.beta_hat
    grid = smse_over_grid(fit, restriction, args.d_grid, beta_ref)

    d_labels = [f"d={d:g}" for d in grid.d_grid]
    values = [list(grid.smse[name]) for name in ESTIMATOR_NAMES]
    print(
        "estimated SMSE by estimator and d "
        "(plug-in reference: the fitted MLE coefficients)"
    )
    print(wide_table_text(ESTIMATOR_NAMES, d_labels, values, corner="estimator"))
    for name in ESTIMATOR_NAMES:
        print(f"best d for {name}: {grid.best_d[name]:g}")

    reports = _reports_by_d(fit, restriction, grid.d_grid, beta_ref)
    verdict_rows = []
    for d in grid.d_grid:
        for a_name, b_name in COMPARISON_PAIRS:
            verdict = compare(reports[(a_name, d)], reports[(b_name, d)])
            verdict_rows.append(
                [
                    f"{d:g}",
                    a_name,
                    b_name,
                    ""
                    if verdict.lambda_max is None
                    else _float_cell(verdict.lambda_max),
                    verdict.superior.value,
                    verdict.certificate,
                ]
            )

    table_txt = "smse_table.txt"
    (out_dir / table_txt).write_text(
        "estimated SMSE (plug-in reference: fitted MLE coefficients)\n"
        + wide_table_text(ESTIMATOR_NAMES, d_labels, values, corner="estimator")
        + "\n"
    )
    table_csv = "smse_table.csv"
    with open(out_dir / table_csv, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["estimator"] + [repr(float(d)) for d in grid.d_grid])
        for name in ESTIMATOR_NAMES:
            writer.writerow([name] + [f"{v:.4f}" for v in grid.smse[name]])
    grid_csv = "smse_full.csv"
    with open(out_dir / grid_csv, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["estimator", "d", "smse"])
        for name, d, value in grid.rows():
            writer.writerow([name, repr(float(d)), _float_cell(value)])
    verdict_csv = "verdicts.csv"
    with open(out_dir / verdict_csv, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            ["d", "estimator_a", "estimator_b", "lambda_max", "verdict", "certificate"]
        )
        writer.writerows(verdict_rows)
    estimates_csv = "estimates.csv"
    with open(out_dir / estimates_csv, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["estimator", "d"] + list(data.labels()))
        for d in grid.d_grid:
            for name in ESTIMATOR_NAMES:
                beta = reports[(name, d)].beta
                writer.writerow(
                    [name, repr(float(d))] + [_float_cell(v) for v in beta]
                )

    _write_manifest(
        out_dir,
        "compare",
        {
            "data": str(args.data),
            "response": str(args.response),
            "restrictions": str(restrictions_path),
            "d_grid": list(grid.d_grid),
            "h_from_mle": bool(args.h_from_mle),
            "tol": args.tol,
            "max_iter": args.max_iter,
            "reference": "plug-in MLE (estimated)",
        },
        inputs=[args.data, restrictions_path],
        outputs=[table_txt, table_csv, grid_csv, verdict_csv, estimates_csv],
        extra={"best_d": {k: float(v) for k, v in grid.best_d.items()}},
    )
    print(f"wrote tables and verdicts to {out_dir}")
    return 0


def _reports_by_d(fit, restriction, d_grid, beta_ref):
    reports = {}
    mle = mle_report(fit)
    srmle = srmle_report(fit, restriction)
    for d in d_grid:
        reports[("MLE", d)] = mle
        reports[("SRMLE", d)] = srmle
        reports[("LLE", d)] = lle_report(fit, d, beta_ref)
        reports[("AULLE", d)] = aulle_report(fit, d, beta_ref)
        reports[("SRAULLE", d)] = sraulle_report(fit, restriction, d, beta_ref)
    return reports


def run_simulate(args):
    out_dir = _prepare_out_dir(args)
    config_dict = load_config(args.config) if args.config else {}
    overrides = {
        "master_seed": args.seed,
        "replications": args.reps,
        "d_grid": args.d_grid,
        "n_values": args.n_values,
        "rho_values": args.rho_values,
        "p": args.p,
        "redraw_design": args.redraw_design,
        "fixed_h": args.fixed_h,
    }
    for key, value in overrides.items():
        if value is not None:
            config_dict[key] = value
    inputs = []
    if args.config:
        inputs.append(args.config)
    if args.restrictions:
        spec = load_restrictions(args.restrictions)
        config_dict["restriction"] = spec.restriction
        inputs.append(args.restrictions)
    config = SimulationConfig.from_dict(config_dict)
    if args.jobs < 1:
        raise ValueError("--jobs must be at least 1")

    result = run_monte_carlo(config, n_jobs=args.jobs)

    outputs = []
    for n in config.n_values:
        rendered = emit_table(result, n)
        txt_name = f"smse_table_n{n}.txt"
        csv_name = f"smse_table_n{n}.csv"
        (out_dir / txt_name).write_text(rendered.text)
        (out_dir / csv_name).write_text(rendered.csv)
        outputs.extend([txt_name, csv_name])
        print(rendered.text)

    results_name = "results.csv"
    with open(out_dir / results_name, "w", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(
            [
                "n",
                "rho",
                "estimator",
                "d",
                "smse",
                "mc_standard_error",
                "failed_replications",
                "valid",
            ]
        )
        for name, n, rho, d, cell in result.iter_rows():
            writer.writerow(
                [
                    n,
                    repr(float(rho)),
                    name,
                    repr(float(d)),
                    _float_cell(cell.smse),
                    _float_cell(cell.mc_standard_error),
                    cell.failed_replications,
                    int(cell.valid),
                ]
            )
    outputs.append(results_name)

    failure_counts = {
        f"n={n},rho={rho:g}": result.cell(
            "MLE", n, rho, config.d_grid[0]
        ).failed_replications
        for n in config.n_values
        for rho in config.rho_values
    }
    _write_manifest(
        out_dir,
        "simulate",
        {"jobs": args.jobs},
        inputs=inputs,
        outputs=outputs,
        extra={"config": config.to_dict(), "failure_counts": failure_counts},
    )
    print(f"wrote tables, {results_name} and manifest.json to {out_dir}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SeparationError, NumericalError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
