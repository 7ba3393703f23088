import importlib.util
import json
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

import pandas as pd
import pytest

from src import pipeline
from src.analysis import IdentityCheck, IdentityReport, classify
from src.errors import AssumptionError, ConfigError, InconsistencyError, OutOfScopeError
from src.pipeline import (
    EXIT_CHECK_FAILED,
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    FAIL,
    PASS,
    SKIP,
    CheckResult,
    RunConfig,
    VerifyReport,
    check_exponents,
    check_ialpha,
    check_identities,
    check_oracle,
    check_phase_routes,
    exit_code_for,
    verify_all,
)

SCRIPT = Path(__file__).parent.parent / "scripts" / "parked.py"


@pytest.fixture(scope="module")
def cli():
    spec = importlib.util.spec_from_file_location("parked_cli", SCRIPT)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


@pytest.mark.parametrize(
    "error, code",
    [
        (AssumptionError("b_0>0"), EXIT_CONFIG_ERROR),
        (ConfigError("bad"), EXIT_CONFIG_ERROR),
        (OutOfScopeError("out of scope: dense phase"), EXIT_CONFIG_ERROR),
        (FileNotFoundError("missing"), EXIT_CONFIG_ERROR),
        (InconsistencyError("mismatch"), EXIT_CHECK_FAILED),
    ],
)
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_invalid_weights_fail_before_computing(weights_dir, settings):
    with pytest.raises(AssumptionError) as info:
        RunConfig.build(weights_dir / "invalid_b0.yaml", settings)
    assert info.value.assumption == "b_0>0"


def test_build_picks_backend(weights_dir, settings):
    cfg = RunConfig.build(weights_dir / "poly_101.yaml", settings, N=None, seed=7)
    assert cfg.backend.is_exact
    assert cfg.N == settings.N
    assert cfg.seed == 7
    assert cfg.name == "poly_101"

    with pytest.raises(ConfigError):
        RunConfig.build(weights_dir / "dense_mixture.yaml", settings, backend_name="exact")
    with pytest.raises(ConfigError):
        RunConfig.build(weights_dir / "poly_101.yaml", settings, workers=0)


def test_check_result_dict():
    result = CheckResult("oracle", PASS, measured=Fraction(1, 3), tolerance=0)
    assert result.to_dict() == {
        "name": "oracle",
        "status": "pass",
        "measured": "1/3",
        "tolerance": 0,
        "detail": "",
    }
    assert json.dumps(CheckResult("x", SKIP, measured={"a": [1, 2.5]}).to_dict())


def test_report_exit_code():
    report = VerifyReport(weights={}, checks=[CheckResult("a", PASS), CheckResult("b", SKIP)])
    assert report.exit_code == EXIT_OK
    report.checks.append(CheckResult("c", FAIL))
    assert report.exit_code == EXIT_CHECK_FAILED
    assert report.counts() == {PASS: 1, FAIL: 1, SKIP: 1}


def test_exponent_check():
    assert check_exponents(Fraction(3)).status == PASS
    assert check_exponents(Fraction(5, 2)).status == PASS


def test_oracle_check(weights_dir, settings):
    cfg = RunConfig.build(weights_dir / "poly_101.yaml", replace(settings, oracle_n_max=5))
    assert [c.status for c in check_oracle(cfg)] == [PASS, PASS]


def test_identity_check_passes(weights_dir, settings):
    cfg = RunConfig.build(weights_dir / "poly_101.yaml", replace(settings, identity_order=10))
    results = check_identities(cfg)
    assert [c.name for c in results] == ["identities", "lagrange"]
    assert all(c.status == PASS for c in results), [c.detail for c in results]


def test_ialpha_check_passes(weights_dir, settings):
    cfg = RunConfig.build(weights_dir / "poly_101.yaml", settings)
    results = check_ialpha(cfg, Fraction(5, 2))
    assert [c.name for c in results] == ["ialpha_two_series", "ialpha_tail"]
    assert all(c.status == PASS for c in results), [c.measured for c in results]


def test_phase_routes_agree(weights_dir, settings):
    cfg = RunConfig.build(weights_dir / "half_zero_half.yaml", settings)
    result = check_phase_routes(cfg, classify(cfg.weights))
    assert result.status == PASS


def test_verify_all_on_dense_weights(weights_dir, settings):
    quick = replace(settings, mc_samples=0, identity_order=10)
    cfg = RunConfig.build(weights_dir / "dense_mixture.yaml", quick)
    report = verify_all(cfg)
    by_name = {c.name: c for c in report.checks}
    assert by_name["asymptotics"].status == SKIP
    assert by_name["asymptotics"].detail == "out of scope: dense phase"
    assert by_name["phase"].measured == "DenseOutOfScope"
    assert by_name["phase_routes"].status == PASS
    assert report.exit_code == EXIT_OK


def test_cli_classify_json(cli, weights_dir, tmp_path, capsys):
    args = cli.build_parser().parse_args(
        ["classify", "--weights", str(weights_dir / "geometric_half.yaml"), "--json", "--output-dir", str(tmp_path)]
    )
    assert cli.run(args) == EXIT_OK
    report = json.loads(capsys.readouterr().out)
    assert report["phase"]["refinement"] == "GenericPlus"
    assert report["criterion"]["value"] == "5/1"


def test_cli_oracle_writes_csv(cli, weights_dir, tmp_path):
    args = cli.build_parser().parse_args(
        ["oracle", "--weights", str(weights_dir / "poly_101.yaml"), "--nmax", "4", "--output-dir", str(tmp_path)]
    )
    assert cli.run(args) == EXIT_OK
    frame = pd.read_csv(tmp_path / "poly_101_oracle.csv")
    assert list(frame.columns) == ["n", "p", "value", "num", "den"]
    first = frame.iloc[0]
    assert (first["n"], first["p"], first["value"]) == (1, 1, "1/1")


def test_cli_rejects_invalid_weights(cli, weights_dir, tmp_path):
    args = cli.build_parser().parse_args(
        ["classify", "--weights", str(weights_dir / "invalid_b0.yaml"), "--output-dir", str(tmp_path)]
    )
    with pytest.raises(AssumptionError) as info:
        cli.run(args)
    assert exit_code_for(info.value) == EXIT_CONFIG_ERROR


def test_cli_dense_asymptotics_is_out_of_scope(cli, weights_dir, tmp_path):
    args = cli.build_parser().parse_args(
        ["asymptotics", "--weights", str(weights_dir / "dense_mixture.yaml"), "--regime", "yfixed",
         "--output-dir", str(tmp_path)]
    )
    with pytest.raises(OutOfScopeError, match="out of scope: dense phase"):
        cli.run(args)


def _failing_suite(ws, order):
    return IdentityReport(
        family=ws.family, order=order, checks=[IdentityCheck("q(Y,Y) = phi'", False, order, "1/7")]
    )


def _raising_suite(ws, order):
    raise InconsistencyError("series mismatch")


@pytest.mark.parametrize("suite", [_failing_suite, _raising_suite])
def test_identity_failure_holds_back_asymptotics(suite, weights_dir, settings, monkeypatch):
    monkeypatch.setattr(pipeline, "identity_suite", suite)
    monkeypatch.setattr(pipeline, "check_round_trip", lambda cfg: CheckResult("round_trip", PASS))
    quick = replace(settings, mc_samples=0, oracle_n_max=4)
    cfg = RunConfig.build(weights_dir / "poly_111.yaml", quick)
    report = verify_all(cfg)
    by_name = {c.name: c for c in report.checks}
    assert by_name["identities"].status == FAIL
    assert by_name["phase"].status == PASS
    for name in ("exponents", "ialpha", "asymptotics"):
        assert by_name[name].status == SKIP
        assert by_name[name].detail.startswith("identity suite failed")
    assert not any(c.name.startswith(("asymptotics_", "ialpha_")) for c in report.checks)
    assert report.exit_code == EXIT_CHECK_FAILED
