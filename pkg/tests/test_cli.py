import math
from pathlib import Path

import numpy as np
import pytest
from typer.testing import CliRunner

from bandtest.band.io import BAND_HEADER, save_band, save_sample
from bandtest.cli import EXIT_FAILURE, EXIT_INFEASIBLE, app, run_command
from bandtest.core import CdfBand
from bandtest.utils.logger import configure_logger

runner = CliRunner()

ROC_CONFIG = "test=rks\nn=10\ntrials=40\nseed=11\nband.samples=600\nband.group_size=100\nthresholds.count=20\n"


def _write_sample(tmp_path: Path, name: str, values: list) -> str:
    path = str(tmp_path / name)
    save_sample(path, np.array(values, dtype=np.float64))
    return path


@pytest.fixture
def vacuous_band(tmp_path: Path) -> str:
    path = str(tmp_path / "vacuous.csv")
    save_band(path, CdfBand.vacuous())
    return path


def _stdout_line(capsys: pytest.CaptureFixture[str]) -> list[str]:
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 1
    return lines[0].split(",")


def test_elrdf_inside_vacuous_band(tmp_path: Path, vacuous_band: str, capsys: pytest.CaptureFixture[str]) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.2, 0.5, 0.8])
    assert run_command(["elrdf", "--sample", sample, "--band", vacuous_band]) == 0
    statistic, decision, iterations, residual = _stdout_line(capsys)
    assert float(statistic) == pytest.approx(0.0, abs=1e-9)
    assert decision == ""
    assert int(iterations) >= 0
    assert float(residual) <= 1e-6


def test_elrdf_decision_and_fit(tmp_path: Path, vacuous_band: str, capsys: pytest.CaptureFixture[str]) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.2, 0.5, 0.8])
    fit = tmp_path / "fit.csv"
    code = run_command(["elrdf", "--sample", sample, "--band", vacuous_band, "--eta", "0.1", "--fit", str(fit)])
    assert code == 0
    assert _stdout_line(capsys)[1] == "H0"
    lines = fit.read_text().splitlines()
    assert lines[0] == "knot,level"
    assert float(lines[-1].split(",")[1]) == pytest.approx(1.0)


def test_missing_sample_file_exits_with_failure(tmp_path: Path, vacuous_band: str) -> None:
    code = run_command(["elrdf", "--sample", str(tmp_path / "absent.txt"), "--band", vacuous_band])
    assert code == EXIT_FAILURE


def test_crossed_band_exits_as_infeasible(tmp_path: Path) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.2, 0.5])
    band = tmp_path / "crossed.csv"
    band.write_text(f"{BAND_HEADER}\n0,0.9,0.8\n1,1,1\n")
    assert run_command(["elrdf", "--sample", sample, "--band", str(band)]) == EXIT_INFEASIBLE
    assert run_command(["rks", "--sample", sample, "--band", str(band)]) == EXIT_INFEASIBLE


def test_ties_follow_the_tie_policy(tmp_path: Path, vacuous_band: str) -> None:
    sample = _write_sample(tmp_path, "ties.txt", [0.5, 0.5, 0.9])
    assert run_command(["elrdf", "--sample", sample, "--band", vacuous_band]) == EXIT_FAILURE
    assert run_command(["elrdf", "--sample", sample, "--band", vacuous_band, "--tie-policy", "jitter"]) == 0


def test_usage_errors_exit_with_failure(vacuous_band: str) -> None:
    assert run_command(["elrdf", "--band", vacuous_band]) == EXIT_FAILURE
    assert run_command(["no-such-command"]) == EXIT_FAILURE
    assert run_command(["elrdf", "--band", vacuous_band, "--no-such-option"]) == EXIT_FAILURE
    assert run_command(["--help"]) == 0


def test_elrdf_two_point_band(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.0, 1.0])
    band = tmp_path / "two_point.csv"
    band.write_text(f"{BAND_HEADER}\n0,0.8,0.9\n1,0.8,1\n")
    assert run_command(["elrdf", "--sample", sample, "--band", str(band), "--eta", "0.2"]) == 0
    statistic, decision, iterations, residual = _stdout_line(capsys)
    assert float(statistic) == pytest.approx(0.223144, abs=1e-6)
    assert decision == "H1"
    assert int(iterations) > 0
    assert float(residual) <= 1e-8


def test_elrdf_boundary_only_band(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.5, 1.0, 1.5])
    band = tmp_path / "zero_mass.csv"
    band.write_text(f"{BAND_HEADER}\n0.5,0,0\n2,0,1\n")
    assert run_command(["elrdf", "--sample", sample, "--band", str(band)]) == 0
    assert _stdout_line(capsys) == ["inf", "", "0", "0.0"]


def test_degen_single_group(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.9, 0.2, 0.5, 0.7])
    assert run_command(["degen", "--sample", sample, "--null", "uniform:0:1"]) == 0
    statistic, reference = (float(v) for v in _stdout_line(capsys))
    w = np.array([0.2, 0.3, 0.2, 0.2])
    assert statistic == pytest.approx(-float(np.mean(np.log(4 * w))))
    assert reference == pytest.approx(math.log(1.25))


def test_degen_needs_enough_observations(tmp_path: Path) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.1, 0.2, 0.3, 0.4])
    args = ["degen", "--sample", sample, "--null", "normal:0:1", "--groups", "3", "--group-size", "2"]
    assert run_command(args) == EXIT_FAILURE


def test_degen_rejects_unknown_null(tmp_path: Path) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.1, 0.2])
    assert run_command(["degen", "--sample", sample, "--null", "cauchy:0:1"]) == EXIT_FAILURE


def test_rks_with_gamma(tmp_path: Path, vacuous_band: str, capsys: pytest.CaptureFixture[str]) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.1, 0.4])
    assert run_command(["rks", "--sample", sample, "--band", vacuous_band, "--gamma", "0.5"]) == 0
    assert _stdout_line(capsys) == ["0.0", "H0"]


def test_rcvm_vacuous_band(tmp_path: Path, vacuous_band: str, capsys: pytest.CaptureFixture[str]) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.5])
    fit = tmp_path / "fit.csv"
    assert run_command(["rcvm", "--sample", sample, "--band", vacuous_band, "--fit", str(fit)]) == 0
    assert float(_stdout_line(capsys)[0]) == pytest.approx(1.0 / 12.0)
    assert fit.read_text().splitlines() == ["knot,level", "0.5,0.5"]


def test_elrm_command(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.0, 1.0])
    args = ["elrm", "--sample", sample, "--lower", "0.7", "--upper", "0.7", "--threshold", "0.05"]
    assert run_command(args) == 0
    statistic, decision = _stdout_line(capsys)
    assert float(statistic) == pytest.approx(0.087177, abs=1e-6)
    assert decision == "H1"


def test_elrm_rejects_unknown_moment(tmp_path: Path) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.0, 1.0])
    args = ["elrm", "--sample", sample, "--lower", "0", "--upper", "1", "--moment", "kurtosis"]
    assert run_command(args) == EXIT_FAILURE


def test_normality_command(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [-1.0, 1.0])
    assert run_command(["normality", "--sample", sample]) == 0
    assert float(_stdout_line(capsys)[0]) == pytest.approx(0.341345, abs=1e-6)

    constant = _write_sample(tmp_path, "constant.txt", [2.0, 2.0, 2.0])
    assert run_command(["normality", "--sample", constant]) == EXIT_FAILURE


def test_classical_commands(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.3])
    assert run_command(["ks", "--sample", sample, "--null", "uniform:0:1", "--gamma", "0.5"]) == 0
    statistic, decision = _stdout_line(capsys)
    assert float(statistic) == pytest.approx(0.7)
    assert decision == "H1"

    centred = _write_sample(tmp_path, "centred.txt", [0.5])
    assert run_command(["cvm", "--sample", centred, "--null", "uniform:0:1"]) == 0
    assert float(_stdout_line(capsys)[0]) == pytest.approx(1.0 / 12.0)


def test_band_build_and_width(tmp_path: Path) -> None:
    record = _write_sample(tmp_path, "noise.txt", [0.0, 1.0, 2.0, 3.0])
    band = tmp_path / "out" / "band.csv"
    result = runner.invoke(app, ["band", "build", "--input", record, "--output", str(band), "--group-size", "2"])
    assert result.exit_code == 0
    assert band.read_text().splitlines()[0] == BAND_HEADER

    result = runner.invoke(app, ["band", "width", "--band", str(band)])
    assert result.exit_code == 0
    assert "knot,width" in result.stdout
    assert "1,1" in result.stdout.splitlines()

    width = tmp_path / "width.csv"
    result = runner.invoke(app, ["band", "width", "--band", str(band), "--output", str(width)])
    assert result.exit_code == 0
    assert width.read_text().splitlines()[0] == "knot,width"


def test_band_build_needs_two_groups(tmp_path: Path) -> None:
    record = _write_sample(tmp_path, "noise.txt", [0.0, 1.0, 2.0])
    args = ["band", "build", "--input", record, "--output", str(tmp_path / "band.csv"), "--group-size", "2"]
    assert run_command(args) == EXIT_FAILURE


def test_roc_outputs_are_reproducible(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    config = tmp_path / "experiment.cfg"
    config.write_text(ROC_CONFIG)

    outputs = []
    for threads in ("1", "3"):
        monkeypatch.setenv("BANDTEST_THREADS", threads)
        out = tmp_path / f"run_{threads}"
        assert run_command(["roc", "--config", str(config), "--output-dir", str(out)]) == 0
        outputs.append(((out / "roc.csv").read_bytes(), (out / "summary.csv").read_bytes()))

    assert outputs[0] == outputs[1]
    roc_lines = outputs[0][0].decode().splitlines()
    assert roc_lines[0] == "threshold,pf,pd"
    summary = outputs[0][1].decode().splitlines()
    assert summary[0] == "test,auc,flipped,seed"
    test, auc, flipped, seed = summary[1].split(",")
    assert (test, seed) == ("rks", "11")
    assert 0.5 <= float(auc) <= 1.0
    assert flipped in ("true", "false")


def test_roc_rejects_bad_config(tmp_path: Path) -> None:
    config = tmp_path / "experiment.cfg"
    config.write_text("trials=0\n")
    assert run_command(["roc", "--config", str(config), "--output-dir", str(tmp_path)]) == EXIT_FAILURE
    assert run_command(["roc", "--config", str(tmp_path / "absent.cfg")]) == EXIT_FAILURE


def test_normality_study_command(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("BANDTEST_THREADS", "2")
    args = ["normality-study", "--sizes", "10,20", "--replications", "25", "--output-dir", str(tmp_path)]
    assert run_command(args) == 0
    for size in (10, 20):
        lines = (tmp_path / f"normality_{size}.csv").read_text().splitlines()
        assert lines[0] == "stationary,nonstationary"
        assert len(lines) == 26
        stationary = [float(line.split(",")[0]) for line in lines[1:]]
        assert stationary == sorted(stationary)


@pytest.mark.parametrize("sizes", ["ten,20", "1"], ids=["not-an-int", "too-short"])
def test_normality_study_rejects_bad_sizes(tmp_path: Path, sizes: str) -> None:
    args = ["normality-study", "--sizes", sizes, "--replications", "5", "--output-dir", str(tmp_path)]
    assert run_command(args) == EXIT_FAILURE


@pytest.fixture
def restore_logger():
    yield
    configure_logger()


def test_log_level_option(tmp_path: Path, vacuous_band: str, restore_logger: None) -> None:
    sample = _write_sample(tmp_path, "sample.txt", [0.1, 0.4])
    assert run_command(["--log-level", "debug", "rks", "--sample", sample, "--band", vacuous_band]) == 0
    assert run_command(["--log-level", "chatty", "rks", "--sample", sample, "--band", vacuous_band]) == EXIT_FAILURE


def test_configure_logger_levels(monkeypatch: pytest.MonkeyPatch, restore_logger: None) -> None:
    monkeypatch.setenv("BANDTEST_LOG_LEVEL", "warning")
    assert configure_logger() == "WARNING"
    assert configure_logger("debug") == "DEBUG"
    with pytest.raises(ValueError):
        configure_logger("verbose")
