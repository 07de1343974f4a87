import subprocess
import sys

import pytest

from fdnoma import cli, driver


@pytest.fixture
def cfg_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# tiny sweep\nrbar_grid = 0, 1\nn_trials = 2\nschemes = FixedFD, HalfDuplex\n")
    return path


def test_rate_region_to_file(tmp_path, cfg_file):
    out = tmp_path / "rr.csv"
    assert cli.main(["rate-region", "--config", str(cfg_file), "--seed", "3", "--out", str(out)]) == 0
    rows = driver.read_csv(out)
    assert [r.scheme for r in rows] == ["FixedFD", "HalfDuplex"] * 2


def test_rate_region_to_stdout_matches_file(tmp_path, cfg_file, capsys):
    out = tmp_path / "rr.csv"
    cli.main(["rate-region", "--config", str(cfg_file), "--out", str(out)])
    capsys.readouterr()
    assert cli.main(["rate-region", "--config", str(cfg_file)]) == 0
    assert capsys.readouterr().out == out.read_text()


def test_trials_flag_overrides_config(tmp_path, cfg_file):
    out = tmp_path / "rr.csv"
    cli.main(["rate-region", "--config", str(cfg_file), "--trials", "1", "--out", str(out)])
    assert all(r.feasible_frac in (0.0, 1.0) for r in driver.read_csv(out))


def test_config_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("rbar_grid = 1, 0\n")
    assert cli.main(["rate-region", "--config", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err


def test_io_error_exit_code(tmp_path, cfg_file, capsys):
    assert cli.main(["rate-region", "--config", str(tmp_path / "absent.cfg")]) == 3
    out = tmp_path / "no" / "such" / "dir.csv"
    assert cli.main(["rate-region", "--config", str(cfg_file), "--out", str(out)]) == 3
    assert "dir.csv" in capsys.readouterr().err


def test_single(capsys):
    assert cli.main(["single", "--rbar", "1.0", "--trial", "2", "--seed", "8"]) == 0
    out = capsys.readouterr().out
    assert out == driver.run_single(driver.ExperimentConfig(seed=8), 2, 1.0)


def test_sdp_debug_round_trips(tmp_path):
    out = tmp_path / "sdr.txt"
    assert cli.main(["sdp-debug", "--rbar", "1.0", "--ps-fraction", "0.5", "--out", str(out)]) == 0
    text = out.read_text()
    from fdnoma import sdp
    prob = sdp.load_problem(text.split("\n", 1)[1].split("solution")[0])
    assert prob.n == 2 and len(prob.constraints) == 4
    assert "solution status=Optimal" in text


def test_oracle_check(capsys):
    assert cli.main(["oracle-check", "--trials", "1"]) == 0
    assert "sandwich PASS" in capsys.readouterr().out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "fdnoma", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("rate-region", "single", "oracle-check", "sdp-debug"):
        assert cmd in res.stdout
