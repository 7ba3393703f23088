#!/usr/bin/env python3
"""
ParkedTrees command line

Coefficient tables, enumeration oracle, phase classification, asymptotic
comparisons, the scaling function and Monte Carlo for fully parked trees.

Usage:
    python scripts/parked.py coeffs --weights config/weights/poly_101.yaml --N 20 --P 20
    python scripts/parked.py oracle --weights config/weights/poly_101.yaml --nmax 7 --out oracle.csv
    python scripts/parked.py classify --weights config/weights/polylog_dilute.yaml --json
    python scripts/parked.py asymptotics --weights config/weights/poly_111.yaml --regime x
    python scripts/parked.py ialpha --alpha 3 --lambda 0.5 1 2 5
    python scripts/parked.py simulate --weights config/weights/half_zero_half.yaml --samples 1e7 --seed 42 --json
    python scripts/parked.py identities --weights config/weights/poly_101.yaml --order 40
    python scripts/parked.py verify-all --weights config/weights/poly_101.yaml

Exit codes: 0 success, 1 failed check, 2 invalid configuration or request.
Set PARKEDTREES_PRECISION_BITS to override the working precision.
"""

import argparse
import logging
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from mpmath import mp
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from src.analysis import (
    REGIMES,
    ScalingFunctionEvaluator,
    classify,
    constants,
    identity_suite,
    predict_and_compare,
    probabilistic_criterion,
    solve_functional_equation,
)
from src.config import Settings
from src.errors import ParkedTreesError
from src.parking import compare_with_oracle, enumerate_Fnp, gw_parking_mc
from src.pipeline import EXIT_CHECK_FAILED, EXIT_OK, RunConfig, exit_code_for, verify_all
from src.series import format_scalar
from src.storage import ResultWriter, coefficient_frame, dumps, series_frame

console = Console()

# Configure logging; reports printed with --json go to stdout, logs to stderr
logging.basicConfig(
    level=logging.INFO,
    format="%(message)s",
    handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True)],
)
logger = logging.getLogger(__name__)


class ParkedTreesRunner:
    """Runs one subcommand against a validated configuration."""

    def __init__(self, cfg: RunConfig):
        """
        Initialize the runner.

        Args:
            cfg: Validated run configuration.
        """
        self.cfg = cfg
        self.writer = ResultWriter(cfg.output_dir)

    def coeffs(self, out: str | None) -> dict:
        """F_{n,p} from the functional equation."""
        F, _ = solve_functional_equation(self.cfg.weights, self.cfg.N, self.cfg.P, self.cfg.backend)
        frame = series_frame(F)
        path = self.writer.write_table(out or f"{self.cfg.name}_coeffs.csv", frame)
        return {"N": self.cfg.N, "P": self.cfg.P, "rows": len(frame), "path": str(path)}

    def oracle(self, n_max: int, out: str | None) -> dict:
        """Exhaustive enumeration compared with the functional equation."""
        ws = self.cfg.weights
        table = enumerate_Fnp(ws, n_max, self.cfg.settings.oracle_budget)
        P = max(1, n_max * (ws.degree - 1) + 1)
        F, _ = solve_functional_equation(ws, n_max, P, self.cfg.backend)
        mismatches = [
            [n, p]
            for n in range(1, n_max + 1)
            for p in range(P + 1)
            if F.coefficient(n, p) != table.get(n, p)
        ]
        path = self.writer.write_table(
            out or f"{self.cfg.name}_oracle.csv", coefficient_frame(table.rows())
        )
        return {
            "n_max": n_max,
            "iterations": table.iterations,
            "mismatches": mismatches,
            "path": str(path),
        }

    def classify(self) -> dict:
        settings = self.cfg.settings
        report = classify(
            self.cfg.weights,
            self.cfg.precision_bits,
            settings.root_tolerance,
            settings.marginal_tolerance,
        )
        criterion = probabilistic_criterion(self.cfg.weights, settings.marginal_tolerance)
        return {"phase": report.to_dict(), "criterion": criterion.to_dict()}

    def asymptotics(self, regime: str, n_range, p_range, v, out: str | None) -> dict:
        report = classify(self.cfg.weights, self.cfg.precision_bits)
        consts = constants(self.cfg.weights, report, self.cfg.precision_bits)
        comparison = predict_and_compare(
            self.cfg.weights,
            regime,
            report,
            consts=consts,
            n_range=n_range,
            p_range=p_range,
            v=v,
            precision_bits=self.cfg.precision_bits,
        )
        path = self.writer.write_table(
            out or f"{self.cfg.name}_asymptotics_{regime}.csv", comparison.table
        )
        return {
            "constants": consts.to_dict(),
            "comparison": comparison.to_dict(),
            "table": comparison.table,
            "path": str(path),
        }

    def simulate(self, samples: int, n_max: int, p_max: int, out: str | None) -> dict:
        settings = self.cfg.settings
        result = gw_parking_mc(
            self.cfg.weights,
            samples,
            self.cfg.seed,
            max_size=settings.mc_max_size,
            workers=self.cfg.workers,
            chunk_size=settings.mc_chunk_size,
            progress=True,
        )
        frame = result.to_frame(n_max, p_max)
        report = {"result": result.to_dict()}
        if self.cfg.weights.degree is not None:
            table = enumerate_Fnp(self.cfg.weights, n_max, settings.oracle_budget)
            frame = compare_with_oracle(result, table, n_max, p_max)
            report["max_abs_z"] = float(frame["z"].abs().max())
        path = self.writer.write_table(out or f"{self.cfg.name}_mc.csv", frame)
        self.writer.write_table(f"{self.cfg.name}_mc_clusters.csv", result.cluster_frame())
        report["path"] = str(path)
        report["table"] = frame
        return report

    def identities(self, order: int) -> dict:
        return identity_suite(self.cfg.weights, order).to_dict()


# -------------------------------------------------------------------
# Display
# -------------------------------------------------------------------


def show_classification(results: dict) -> None:
    phase = results["phase"]
    table = Table(title="Phase")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green")
    for key in ("phase", "refinement", "Y_c", "x_c", "alpha", "rho", "marginal"):
        table.add_row(key, str(phase[key]))
    criterion = results["criterion"]
    table.add_row("2σ²+m²", str(criterion["value"]))
    table.add_row("criterion", f"{criterion['predicted_phase']} ({criterion['reason']})")
    console.print(table)


def show_frame(frame, title: str, limit: int = 40) -> None:
    table = Table(title=title)
    for column in frame.columns:
        table.add_column(str(column), style="cyan" if column in ("n", "p") else "white")
    for _, row in frame.head(limit).iterrows():
        table.add_row(*(str(v) for v in row.tolist()))
    console.print(table)
    if len(frame) > limit:
        console.print(f"[dim]... {len(frame) - limit} more rows[/dim]")


def show_verify(report: dict) -> None:
    table = Table(title="verify-all")
    table.add_column("Check", style="cyan")
    table.add_column("Status")
    table.add_column("Measured", max_width=40)
    table.add_column("Detail", style="dim", max_width=50)
    colors = {"pass": "green", "fail": "red", "skip": "yellow"}
    for check in report["checks"]:
        status = check["status"]
        table.add_row(
            check["name"],
            f"[{colors[status]}]{status}[/{colors[status]}]",
            str(check["measured"]),
            check["detail"],
        )
    console.print(table)
    summary = report["summary"]
    console.print(
        f"\n[bold]{summary['pass']} passed, {summary['fail']} failed, {summary['skip']} skipped[/bold]"
    )


def emit_json(report: dict) -> None:
    sys.stdout.write(dumps({k: v for k, v in report.items() if k != "table"}) + "\n")


# -------------------------------------------------------------------
# Entry point
# -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Fully parked trees: series, phases, asymptotics and verification",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--config",
        type=Path,
        default=None,
        help="Settings file (default: config/settings.yaml)",
    )
    parser.add_argument(
        "-v", "--verbose",
        action="store_true",
        help="Enable verbose output",
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--weights", type=Path, required=True, help="Weight sequence config (YAML/JSON)")
    common.add_argument("--precision", type=int, default=None, help="Working precision in bits")
    common.add_argument("--output-dir", type=Path, default=None, help="Directory for CSV/JSON outputs")
    common.add_argument("--json", action="store_true", help="Print the report as JSON on stdout")
    common.add_argument("--out", type=str, default=None, help="Output file name")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", parents=[common], help="Coefficient table from the functional equation")
    p.add_argument("--N", type=int, default=None, help="Largest power of x")
    p.add_argument("--P", type=int, default=None, help="Largest power of y")
    p.add_argument("--backend", choices=["exact", "float"], default=None, help="Coefficient backend")

    p = sub.add_parser("oracle", parents=[common], help="Exhaustive enumeration for small n")
    p.add_argument("--nmax", type=int, default=None, help="Largest tree size (default from settings)")

    sub.add_parser("classify", parents=[common], help="Phase and critical point")

    p = sub.add_parser("asymptotics", parents=[common], help="Coefficients against asymptotic formulas")
    p.add_argument("--regime", choices=REGIMES, required=True, help="Asymptotic regime")
    p.add_argument("--n", type=int, nargs="+", default=None, help="Values of n (x regime)")
    p.add_argument("--p", type=int, nargs="+", default=None, help="Values of p")
    p.add_argument("--v", type=float, default=None, help="n / p^(1/theta) (bivariate regime)")

    p = sub.add_parser("ialpha", help="Scaling function I_alpha")
    p.add_argument("--alpha", type=str, required=True, help='Exponent in (2, 3], e.g. 3 or "5/2"')
    p.add_argument("--lambda", dest="lambdas", type=float, nargs="+", required=True, help="Points lambda > 0")
    p.add_argument("--precision", type=int, default=None, help="Working precision in bits")
    p.add_argument("--json", action="store_true", help="Print the report as JSON on stdout")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo on geometric GW trees")
    p.add_argument("--samples", type=float, default=None, help="Number of trees (e.g. 1e7)")
    p.add_argument("--seed", type=int, default=None, help="Root seed")
    p.add_argument("--workers", type=int, default=None, help="Worker processes")
    p.add_argument("--nmax", type=int, default=5, help="Largest n in the output table")
    p.add_argument("--pmax", type=int, default=4, help="Largest p in the output table")

    p = sub.add_parser("identities", parents=[common], help="Exact series identity suite")
    p.add_argument("--order", type=int, default=None, help="Order of the checks")

    p = sub.add_parser("verify-all", parents=[common], help="Run every feasible check")
    p.add_argument("--seed", type=int, default=None, help="Monte Carlo seed")
    p.add_argument("--workers", type=int, default=None, help="Worker processes")

    return parser


def run_ialpha(args, settings: Settings) -> int:
    bits = args.precision or settings.precision_bits
    evaluator = ScalingFunctionEvaluator(
        args.alpha,
        term_budget=settings.ialpha_term_budget,
        tolerance=settings.ialpha_tolerance,
        precision_bits=bits,
    )
    rows = []
    for lam in args.lambdas:
        explicit = evaluator.explicit(lam)
        sigma = evaluator.sigma_series(lam)
        rows.append(
            {
                "lambda": lam,
                "explicit": format_scalar(explicit, 20),
                "sigma_series": format_scalar(sigma, 20),
                "relative_gap": float(abs(explicit - sigma) / abs(explicit)),
            }
        )
    report = {
        "alpha": format_scalar(evaluator.alpha),
        "tail_constant": format_scalar(evaluator.tail_constant(), 20),
        "values": rows,
    }
    if args.json:
        emit_json(report)
    else:
        table = Table(title=f"I_alpha, alpha = {report['alpha']}")
        for column in ("lambda", "explicit", "sigma_series", "relative_gap"):
            table.add_column(column, style="cyan" if column == "lambda" else "white")
        for row in rows:
            table.add_row(*(str(row[c]) for c in ("lambda", "explicit", "sigma_series", "relative_gap")))
        console.print(table)
        console.print(f"Tail constant: {report['tail_constant']}")
    return EXIT_OK


def run(args) -> int:
    settings = Settings.load(args.config)
    logging.getLogger().setLevel(logging.DEBUG if args.verbose else settings.log_level.upper())

    if args.command == "ialpha":
        return run_ialpha(args, settings)

    cfg = RunConfig.build(
        args.weights,
        settings,
        precision_bits=args.precision,
        output_dir=args.output_dir,
        N=getattr(args, "N", None),
        P=getattr(args, "P", None),
        backend_name=getattr(args, "backend", None),
        seed=getattr(args, "seed", None),
        workers=getattr(args, "workers", None),
    )
    mp.prec = cfg.precision_bits
    runner = ParkedTreesRunner(cfg)

    if args.command == "coeffs":
        report = runner.coeffs(args.out)
    elif args.command == "oracle":
        report = runner.oracle(args.nmax or settings.oracle_n_max, args.out)
        if report["mismatches"]:
            logger.error(f"Oracle mismatches at {report['mismatches'][:5]}")
    elif args.command == "classify":
        report = runner.classify()
        if not args.json:
            show_classification(report)
    elif args.command == "asymptotics":
        report = runner.asymptotics(args.regime, args.n, args.p, args.v, args.out)
        if not args.json:
            show_frame(report["table"], f"Regime {args.regime}")
    elif args.command == "simulate":
        samples = int(args.samples) if args.samples else settings.mc_samples
        report = runner.simulate(samples, args.nmax, args.pmax, args.out)
        if not args.json:
            show_frame(report["table"], "Monte Carlo")
    elif args.command == "identities":
        report = runner.identities(args.order or settings.identity_order)
        if not report["all_passed"]:
            logger.error("Identity suite failed")
    else:
        verify = verify_all(cfg)
        report = verify.to_dict()
        runner.writer.write_json(args.out or f"{cfg.name}_verify.json", report)
        if not args.json:
            show_verify(report)

    if args.json:
        emit_json(report)
    elif args.command in ("coeffs", "oracle", "identities"):
        console.print(f"[green]Done.[/green] {report.get('path', '')}")

    failed = (
        report.get("mismatches")
        or report.get("all_passed") is False
        or report.get("exit_code", EXIT_OK) != EXIT_OK
    )
    return EXIT_CHECK_FAILED if failed else EXIT_OK


def main():
    parser = build_parser()
    args = parser.parse_args()

    try:
        code = run(args)
    except (ParkedTreesError, FileNotFoundError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        code = exit_code_for(e)
    sys.exit(code)


if __name__ == "__main__":
    main()
