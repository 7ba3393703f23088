"""
Run configuration and the verify-all pipeline.

verify_all chains the checks that tie the analytic side to the ground
truth: series identities, the parametrization round trip, the enumeration
oracle, phase-route agreement, exponent algebra, the scaling function,
coefficient asymptotics and Monte Carlo.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from pathlib import Path

from mpmath import mp

from .analysis import (
    DENSE_OUT_OF_SCOPE,
    PhaseReport,
    ScalingFunctionEvaluator,
    classify,
    consistency_compose,
    constants,
    identity_suite,
    lagrange_check,
    predict_and_compare,
    probabilistic_criterion,
    solve_functional_equation,
    universal_exponents,
)
from .config import Settings
from .errors import (
    AssumptionError,
    BudgetExceededError,
    ConfigError,
    OutOfScopeError,
    ParkedTreesError,
)
from .parking import compare_with_oracle, enumerate_Fnp, forest_convolution_table, gw_parking_mc
from .series import Backend, format_scalar, to_mpf
from .weights import WeightSequence, check_assumptions, load_weights, moments

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG_ERROR = 2

PASS = "pass"
FAIL = "fail"
SKIP = "skip"

# Monte Carlo cells must agree within this many standard errors.
MC_Z_TOLERANCE = 3.0
MC_N_MAX = 5
MC_P_MAX = 4

IALPHA_POINTS = (0.5, 1, 2, 5)
IALPHA_TOLERANCE = 1e-8
# lambda^(beta0+1) I_alpha approaches its limit as 1 - c/lambda
IALPHA_TAIL_POINT = 1000
IALPHA_TAIL_TOLERANCE = 0.02

AMPLITUDE_TOLERANCE = 0.15

DEFAULT_REGIMES = {
    "yfixed": {"p": [64, 96, 128, 192, 256], "slope_tolerance": 0.1},
    "x": {"n": [200, 250, 300, 350, 400], "p": [0], "slope_tolerance": 0.05},
    "bivariate": {"p": [8, 10, 12, 14], "v": 1, "ratio_tolerance": 0.25},
}


def exit_code_for(error: Exception) -> int:
    """Exit status for an error that ended a run."""
    if isinstance(error, (AssumptionError, ConfigError, OutOfScopeError, FileNotFoundError)):
        return EXIT_CONFIG_ERROR
    return EXIT_CHECK_FAILED


@dataclass
class RunConfig:
    """
    Validated inputs of one run.

    Attributes:
        weights: Weight sequence.
        settings: Numerical settings.
        backend_name: "exact" or "float".
        N: x-order of coefficient tables.
        P: y-order of coefficient tables.
        precision_bits: Big-float precision.
        seed: Monte Carlo seed.
        workers: Monte Carlo worker processes.
        output_dir: Directory for CSV/JSON outputs.
        weights_path: Config file the weights came from, if any.
    """

    weights: WeightSequence
    settings: Settings
    backend_name: str = "exact"
    N: int = 64
    P: int = 64
    precision_bits: int = 256
    seed: int = 42
    workers: int = 1
    output_dir: Path = Path("./data")
    weights_path: Path | None = None

    @classmethod
    def build(
        cls,
        weights_path: str | Path,
        settings: Settings | None = None,
        **overrides,
    ) -> "RunConfig":
        """
        Load weights and settings and validate them.

        Args:
            weights_path: Weight config file.
            settings: Settings; loaded from config/settings.yaml if None.
            **overrides: Field overrides (None values are ignored).

        Returns:
            A validated RunConfig.
        """
        settings = settings or Settings.load()
        bits = overrides.get("precision_bits") or settings.precision_bits
        ws = load_weights(weights_path, precision_bits=bits)
        fields = {
            "N": settings.N,
            "P": settings.P,
            "precision_bits": bits,
            "seed": settings.mc_seed,
            "workers": settings.mc_workers,
            "output_dir": Path(settings.output_dir),
        }
        fields.update({k: v for k, v in overrides.items() if v is not None})
        if "backend_name" not in overrides or overrides["backend_name"] is None:
            fields["backend_name"] = "exact" if ws.is_exact else "float"
        cfg = cls(weights=ws, settings=settings, weights_path=Path(weights_path), **fields)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        """Raise ConfigError / AssumptionError before any computation."""
        if self.backend_name not in ("exact", "float"):
            raise ConfigError(f"Unknown backend {self.backend_name!r}")
        if self.backend_name == "exact" and not self.weights.is_exact:
            raise ConfigError("The exact backend needs rational weights")
        if self.N < 1 or self.P < 1:
            raise ConfigError(f"Truncation orders must be positive, got N={self.N}, P={self.P}")
        if self.precision_bits < 53:
            raise ConfigError(f"precision_bits must be at least 53, got {self.precision_bits}")
        if self.workers < 1:
            raise ConfigError(f"workers must be positive, got {self.workers}")
        self.output_dir = Path(self.output_dir)
        check_assumptions(self.weights)
        logger.debug(f"Validated run config for {self.weights.family} weights")

    @property
    def backend(self) -> Backend:
        return Backend.from_name(self.backend_name, self.precision_bits)

    @property
    def name(self) -> str:
        return self.weights_path.stem if self.weights_path else self.weights.family


@dataclass
class CheckResult:
    """
    Outcome of one verification check.

    Attributes:
        name: Check name.
        status: "pass", "fail" or "skip".
        measured: Measured quantity (discrepancy, slope, ratio, ...).
        tolerance: Tolerance it was compared against.
        detail: Explanation, mainly for skips and failures.
    """

    name: str
    status: str
    measured: object = None
    tolerance: object = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "measured": _plain(self.measured),
            "tolerance": _plain(self.tolerance),
            "detail": self.detail,
        }


def _plain(value):
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return format_scalar(value)


@dataclass
class VerifyReport:
    """All checks of a verify-all run."""

    weights: dict
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CHECK_FAILED if any(c.status == FAIL for c in self.checks) else EXIT_OK

    def counts(self) -> dict:
        out = {PASS: 0, FAIL: 0, SKIP: 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "weights": self.weights,
            "exit_code": self.exit_code,
            "summary": self.counts(),
            "checks": [c.to_dict() for c in self.checks],
        }


# -------------------------------------------------------------------
# Individual checks
# -------------------------------------------------------------------


def _skip(name: str, reason: str) -> CheckResult:
    logger.info(f"[{name}] skipped: {reason}")
    return CheckResult(name, SKIP, detail=reason)


def check_identities(cfg: RunConfig) -> list[CheckResult]:
    ws = cfg.weights
    if not ws.is_exact:
        return [_skip("identities", "exact series need rational weights")]
    report = identity_suite(ws, cfg.settings.identity_order)
    results = [
        CheckResult(
            "identities",
            PASS if report.all_passed else FAIL,
            measured=len(report.checks) - len(report.failures),
            tolerance=len(report.checks),
            detail=", ".join(report.failures),
        )
    ]
    lagrange = lagrange_check(ws, 20)
    results.append(
        CheckResult(
            "lagrange",
            PASS if lagrange.passed else FAIL,
            measured=lagrange.residual,
            tolerance=0,
        )
    )
    return results


def check_round_trip(cfg: RunConfig, order: int = 25) -> CheckResult:
    ws = cfg.weights
    if not ws.is_exact:
        return _skip("round_trip", "exact comparison needs rational weights")
    report = consistency_compose(ws, order, order)
    return CheckResult(
        "round_trip",
        PASS if report.exact_match else FAIL,
        measured=report.to_dict(),
        tolerance=0,
    )


def check_oracle(cfg: RunConfig) -> list[CheckResult]:
    ws = cfg.weights
    n_max = cfg.settings.oracle_n_max
    if ws.degree is None or not ws.is_exact:
        return [_skip("oracle", "enumeration needs exact weights with finite support")]
    try:
        table = enumerate_Fnp(ws, n_max, cfg.settings.oracle_budget)
    except BudgetExceededError as e:
        return [_skip("oracle", str(e))]

    P = max(1, n_max * (ws.degree - 1) + 1)
    F, _ = solve_functional_equation(ws, n_max, P, Backend.exact())
    mismatches = [
        (n, p)
        for n in range(1, n_max + 1)
        for p in range(P + 1)
        if F.coefficient(n, p) != table.get(n, p)
    ]
    forest = forest_convolution_table(ws, n_max)
    forest_mismatches = [
        (n, p)
        for n in range(1, n_max + 1)
        for p in range(P + 1)
        if forest.get(n, p) != table.get(n, p)
    ]
    return [
        CheckResult(
            "oracle",
            FAIL if mismatches else PASS,
            measured=len(mismatches),
            tolerance=0,
            detail=f"n <= {n_max}, {table.iterations} iterations"
            + (f"; first mismatch {mismatches[0]}" if mismatches else ""),
        ),
        CheckResult(
            "oracle_forest",
            FAIL if forest_mismatches else PASS,
            measured=len(forest_mismatches),
            tolerance=0,
        ),
    ]


def check_phase_routes(cfg: RunConfig, report: PhaseReport) -> CheckResult:
    criterion = probabilistic_criterion(cfg.weights, cfg.settings.marginal_tolerance)
    if not criterion.decisive:
        return _skip("phase_routes", criterion.reason)
    agree = criterion.predicted_phase == report.phase
    return CheckResult(
        "phase_routes",
        PASS if agree else FAIL,
        measured=criterion.predicted_phase,
        tolerance=report.phase,
        detail=criterion.reason,
    )


def check_exponents(alpha) -> CheckResult:
    e = universal_exponents(alpha)
    exact = isinstance(e.alpha, Fraction)
    gaps = [e.beta0 - (e.gamma0 - e.beta1) * e.theta, e.gamma1 - (e.gamma0 - 1 / e.theta)]
    if exact:
        ok = not any(gaps)
        if e.alpha == 3:
            ok = ok and e.as_tuple() == tuple(
                Fraction(v) for v in ("3/2", "-1/2", "3/2", "-3/2", "1/2")
            )
    else:
        ok = all(abs(to_mpf(g)) <= mp.mpf(2) ** (-(mp.prec - 8)) for g in gaps)
    return CheckResult("exponents", PASS if ok else FAIL, measured=e.to_dict(), tolerance=0)


def check_ialpha(cfg: RunConfig, alpha) -> list[CheckResult]:
    evaluator = ScalingFunctionEvaluator(
        alpha,
        term_budget=cfg.settings.ialpha_term_budget,
        tolerance=cfg.settings.ialpha_tolerance,
        precision_bits=cfg.precision_bits,
    )
    worst = 0.0
    for lam in IALPHA_POINTS:
        explicit = evaluator.explicit(lam)
        sigma = evaluator.sigma_series(lam)
        worst = max(worst, float(abs(explicit - sigma) / abs(explicit)))
    tail = evaluator.explicit(IALPHA_TAIL_POINT)
    beta0 = to_mpf(universal_exponents(evaluator.alpha).beta0)
    scaled = tail * mp.power(IALPHA_TAIL_POINT, beta0 + 1)
    tail_gap = float(abs(scaled / evaluator.tail_constant() - 1))
    return [
        CheckResult(
            "ialpha_two_series",
            PASS if worst <= IALPHA_TOLERANCE else FAIL,
            measured=worst,
            tolerance=IALPHA_TOLERANCE,
        ),
        CheckResult(
            "ialpha_tail",
            PASS if tail_gap <= IALPHA_TAIL_TOLERANCE else FAIL,
            measured=tail_gap,
            tolerance=IALPHA_TAIL_TOLERANCE,
        ),
    ]


def _is_periodic(ws: WeightSequence) -> bool:
    """Support in a proper sublattice l ≡ l0 (mod d), d >= 2."""
    if ws.degree is None:
        return False
    support = [l for l in range(ws.degree + 1) if ws.coefficient(l)]
    return reduce(math.gcd, (l - support[0] for l in support[1:]), 0) > 1


def check_asymptotics(cfg: RunConfig, report: PhaseReport) -> list[CheckResult]:
    ws = cfg.weights
    regimes = dict(DEFAULT_REGIMES)
    regimes.update(cfg.settings.asymptotics.get("regimes", {}))
    selected = cfg.settings.asymptotics.get("verify", ["yfixed", "x"])
    if _is_periodic(ws):
        return [_skip(f"asymptotics_{r}", "periodic support") for r in selected]

    consts = constants(ws, report, cfg.precision_bits)
    results = [
        CheckResult("mu_positive", PASS if consts.mu > 0 else FAIL, measured=consts.mu, tolerance=0)
    ]
    for regime in selected:
        opts = regimes.get(regime, {})
        comparison = predict_and_compare(
            ws,
            regime,
            report,
            consts=consts,
            n_range=opts.get("n"),
            p_range=opts.get("p"),
            v=opts.get("v"),
            precision_bits=cfg.precision_bits,
        )
        monotone = comparison.ratios_monotone_toward_one()
        if regime == "bivariate":
            tol = opts.get("ratio_tolerance", 0.25)
            gap = abs(comparison.final_ratio - 1)
            ok = monotone and gap <= tol
            results.append(
                CheckResult(
                    "asymptotics_bivariate",
                    PASS if ok else FAIL,
                    measured=comparison.final_ratio,
                    tolerance=tol,
                    detail="" if monotone else "ratios not monotone toward 1",
                )
            )
            continue
        tol = opts.get("slope_tolerance", 0.1)
        slope_gaps = [abs(s - comparison.expected_slope) for s in comparison.slopes.values()]
        amplitude_gap = abs(comparison.final_ratio - 1)
        ok = max(slope_gaps) <= tol and amplitude_gap <= AMPLITUDE_TOLERANCE and monotone
        results.append(
            CheckResult(
                f"asymptotics_{regime}",
                PASS if ok else FAIL,
                measured={"slopes": comparison.slopes, "final_ratio": comparison.final_ratio},
                tolerance={"slope": tol, "amplitude": AMPLITUDE_TOLERANCE},
                detail=f"expected slope {comparison.expected_slope}"
                + ("" if monotone else "; ratios not monotone toward 1"),
            )
        )
    return results


def check_monte_carlo(cfg: RunConfig) -> CheckResult:
    ws = cfg.weights
    _, _, is_probability = moments(ws)
    if not is_probability or ws.degree is None or not ws.is_exact:
        return _skip("monte_carlo", "needs an exact probability distribution with finite support")
    if cfg.settings.mc_samples < 1:
        return _skip("monte_carlo", "no samples requested")
    table = forest_convolution_table(ws, MC_N_MAX)
    result = gw_parking_mc(
        ws,
        cfg.settings.mc_samples,
        cfg.seed,
        max_size=cfg.settings.mc_max_size,
        workers=cfg.workers,
        chunk_size=cfg.settings.mc_chunk_size,
    )
    frame = compare_with_oracle(result, table, MC_N_MAX, MC_P_MAX)
    worst = float(frame["z"].abs().max())
    return CheckResult(
        "monte_carlo",
        PASS if worst <= MC_Z_TOLERANCE else FAIL,
        measured=worst,
        tolerance=MC_Z_TOLERANCE,
        detail=f"{result.samples} samples, seed {result.seed}",
    )


# -------------------------------------------------------------------
# verify_all
# -------------------------------------------------------------------


def _guarded(name: str, fn, *args) -> list[CheckResult]:
    """Run a check; library errors become failed or skipped results."""
    try:
        out = fn(*args)
    except OutOfScopeError as e:
        return [_skip(name, str(e))]
    except ParkedTreesError as e:
        logger.error(f"[{name}] {e}")
        return [CheckResult(name, FAIL, detail=str(e))]
    return out if isinstance(out, list) else [out]


def _identity_failure(results: list[CheckResult]) -> str | None:
    """Why asymptotic checks are held back, or None when the identities held."""
    failed = [c for c in results if c.status == FAIL]
    if not failed:
        return None
    return "identity suite failed: " + "; ".join(c.detail or c.name for c in failed)


def verify_all(cfg: RunConfig) -> VerifyReport:
    """
    Run every check feasible under cfg.

    Exponent, I_alpha and asymptotic checks are skipped when the identity
    suite failed or raised.

    Returns:
        VerifyReport; its exit_code is 1 when any check failed and 0
        otherwise (skipped checks do not fail the run).
    """
    report = VerifyReport(weights=cfg.weights.to_dict())
    checks = report.checks

    identity_results = _guarded("identities", check_identities, cfg)
    checks += identity_results
    held_back = _identity_failure(identity_results)
    checks += _guarded("round_trip", check_round_trip, cfg)
    checks += _guarded("oracle", check_oracle, cfg)

    try:
        phase = classify(
            cfg.weights,
            cfg.precision_bits,
            cfg.settings.root_tolerance,
            cfg.settings.marginal_tolerance,
        )
    except ParkedTreesError as e:
        logger.error(f"[phase] {e}")
        checks.append(CheckResult("phase", FAIL, detail=str(e)))
        phase = None

    if phase is not None:
        checks.append(CheckResult("phase", PASS, measured=phase.refinement))
        checks += _guarded("phase_routes", check_phase_routes, cfg, phase)
        if phase.refinement == DENSE_OUT_OF_SCOPE or phase.alpha is None:
            checks.append(_skip("asymptotics", "out of scope: dense phase"))
        elif held_back:
            checks += [_skip(name, held_back) for name in ("exponents", "ialpha", "asymptotics")]
        else:
            checks += _guarded("exponents", check_exponents, phase.alpha)
            checks += _guarded("ialpha", check_ialpha, cfg, phase.alpha)
            checks += _guarded("asymptotics", check_asymptotics, cfg, phase)

    checks += _guarded("monte_carlo", check_monte_carlo, cfg)

    counts = report.counts()
    logger.info(
        f"verify-all: {counts[PASS]} passed, {counts[FAIL]} failed, {counts[SKIP]} skipped"
    )
    return report
