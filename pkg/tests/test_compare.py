import numpy as np
import pytest

from robin_nls.cli import main
from robin_nls.compare import fit_exponent, run_compare, run_stability
from robin_nls.config import RunConfig
from robin_nls.errors import RegimeMismatch, ValidationFailure
from robin_nls.serialization import read_csv, read_json

GAUSSIAN = {"amplitude": 0.3, "lambda": 1, "q": -1.0}


def test_fit_exponent_recovers_a_power_law():
    t = [16.0, 32.0, 64.0]
    assert fit_exponent(t, [3.0 * s ** -0.75 for s in t]) == pytest.approx(0.75)
    assert fit_exponent(t, [1.0, 0.0, 0.5]) is None
    assert fit_exponent([16.0], [1.0]) is None


def test_requested_regime_must_match():
    config = RunConfig(subcommand="compare", generator="gaussian", generator_params=GAUSSIAN,
                       options={"regime": "defocusing_qpos"})
    with pytest.raises(RegimeMismatch):
        run_compare(config)


def test_stability_needs_a_soliton_generator():
    config = RunConfig(subcommand="compare", generator="gaussian", generator_params=GAUSSIAN)
    with pytest.raises(ValidationFailure):
        run_stability(config)


def test_pure_soliton_matches_its_prediction():
    config = RunConfig(
        subcommand="compare",
        generator="defocusing_soliton",
        generator_params={"omega": 1.0, "alpha": 1.0},
        options={"t0": 0.5, "dx": 0.01, "dt": 0.002, "zeta": [0.0, 0.5, 1.0, 2.0], "n_k": 257},
    )
    report = run_compare(config)
    assert report.regime == "defocusing_qpos"
    assert report.t_values == [0.5, 1.0, 2.0]
    assert report.passed
    assert max(report.errors) <= 1e-3


@pytest.mark.slow
def test_radiation_decays_like_the_leading_term():
    config = RunConfig(subcommand="compare", generator="gaussian", generator_params=GAUSSIAN)
    report = run_compare(config)
    assert report.regime == "defocusing_qneg"
    assert report.passed
    assert report.exponent >= 0.6
    assert abs(report.pde_modulus[-1] - report.leading_modulus[-1]) <= 0.2 * report.leading_modulus[-1]


@pytest.mark.slow
def test_perturbed_soliton_settles():
    config = RunConfig(
        subcommand="compare",
        generator="defocusing_soliton",
        generator_params={"omega": 1.0, "alpha": 1.0},
        options={"epsilon": 0.05},
    )
    report = run_stability(config)
    assert report.passed
    assert report.xi_shift < 0.1
    assert report.residuals[-1] < report.residuals[0]


# ============================================================================
# CLI
# ============================================================================

def test_cli_soliton(tmp_path):
    code = main(["--out-dir", str(tmp_path), "soliton", "--lambda", "-1", "--omega", "1", "--phi", "0.5"])
    assert code == 0
    header, values = read_csv(tmp_path / "soliton_samples.csv")
    assert header == ["x", "Re u", "Im u", "|u|"]
    assert values.shape == (401, 4)
    assert values[0, 3] == pytest.approx(1.0 / np.cosh(0.5))
    assert (tmp_path / "soliton_spectral.csv").exists()


def test_cli_scatter(tmp_path):
    code = main([
        "--out-dir", str(tmp_path), "scatter", "--generator", "gaussian",
        "--param", "amplitude=0.3", "--param", "lambda=1", "--param", "q=-1", "--n-k", "65",
    ])
    assert code == 0
    _, values = read_csv(tmp_path / "table.csv")
    assert values.shape == (65, 9)
    assert read_json(tmp_path / "table_checks.json")["violations"] == []


def test_cli_evolve_writes_snapshots(tmp_path):
    code = main([
        "--out-dir", str(tmp_path), "evolve", "--generator", "focusing_soliton",
        "--param", "omega=1", "--param", "phi=0.5",
        "--tfinal", "0.1", "--snap", "0.05", "--dx", "0.05", "--dt", "0.01",
    ])
    assert code == 0
    assert sorted(p.name for p in tmp_path.glob("snapshot_*.csv")) == [
        "snapshot_0000.csv", "snapshot_0001.csv", "snapshot_0002.csv",
    ]
    _, log = read_csv(tmp_path / "conserved.csv")
    assert log.shape[0] == 3
    assert np.max(log[:, 3]) <= 1e-6


def test_cli_exit_codes(tmp_path):
    assert main(["--out-dir", str(tmp_path), "scatter", "--profile", str(tmp_path / "missing.json")]) == 1
    assert main(["--out-dir", str(tmp_path), "scatter", "--generator", "gaussian", "--param", "amplitude"]) == 1
    assert main(["--out-dir", str(tmp_path), "scatter"]) == 1
    assert main([
        "--out-dir", str(tmp_path), "compare", "--generator", "gaussian",
        "--param", "amplitude=0.3", "--param", "lambda=1", "--param", "q=-1",
        "--regime", "defocusing_qpos",
    ]) == 3


def test_cli_strict_zeros_fail_on_a_common_zero(tmp_path):
    args = ["--out-dir", str(tmp_path), "zeros", "--generator", "focusing_soliton",
            "--param", "omega=1", "--param", "phi=-0.5", "--n-k", "257"]
    assert main(args) == 0
    assert read_json(tmp_path / "spectrum.json")["M"] == 1
    assert main(args + ["--strict"]) == 3
