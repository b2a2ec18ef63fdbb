import json
import subprocess
import sys

import pytest

from ridgeless import cli
from ridgeless.experiments import ResultTable


def test_mse_vs_norm_small_run(tmp_path, capsys):
    out = tmp_path / "new" / "dir"
    rc = cli.main(["mse-vs-norm", "--seed", "42", "--trials", "5", "--d", "80", "--n", "20", "--out", str(out)])
    assert rc == 0
    t = ResultTable.read_csv(out / "mse-vs-norm_42.csv")
    assert len(t.rows) == 6
    meta = json.loads((out / "mse-vs-norm_42.json").read_text())["metadata"]
    assert meta["config"]["trials"] == 5 and meta["config"]["seed"] == 42


def test_config_file_and_override_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("d = 60\nn = 10\ntrials = 2\nseed = 3\n")
    rc = cli.main(["mse-vs-norm", "--config", str(cfg), "--set", "trials=3", "--out", str(tmp_path), "--no-json"])
    assert rc == 0
    assert len((tmp_path / "mse-vs-norm_3.csv").read_text().splitlines()) == 7
    assert not (tmp_path / "mse-vs-norm_3.json").exists()


def test_effective_config_logged(tmp_path, caplog):
    with caplog.at_level("INFO", logger="ridgeless"):
        cli.main(["pinv-descent", "--n-sweep", "2,4", "--trials", "2", "--out", str(tmp_path)])
    assert "effective config" in caplog.text and '"n_sweep": [2, 4]' in caplog.text


def test_same_argv_same_output(tmp_path):
    argv = ["cond-descent", "--n-sweep", "3,6", "--trials", "2"]
    cli.main(argv + ["--out", str(tmp_path / "a")])
    cli.main(argv + ["--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "cond-descent_0.csv").read_bytes() == (tmp_path / "b" / "cond-descent_0.csv").read_bytes()


def test_stability_audit_writes_reports(tmp_path):
    assert cli.main(["stability-audit", "--trials", "2", "--out", str(tmp_path)]) == 0
    reports = json.loads((tmp_path / "stability-audit_0.reports.json").read_text())
    assert len(reports) == 2 and set(reports[0]["checks"]) >= {"almost_positivity", "lemma2"}


@pytest.mark.parametrize(
    "argv",
    [
        ["mse-vs-norm", "--bogus", "1"],
        ["not-a-command"],
        ["mse-vs-norm", "--set", "colour=blue"],
        ["mse-vs-norm", "--set", "novalue"],
        ["mse-vs-norm", "--sigma", "-1"],
        ["mse-vs-norm", "--config", "/nonexistent/file.cfg"],
    ],
)
def test_usage_errors_exit_1(argv, capsys):
    assert cli.main(argv) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_key_lists_valid_keys(capsys):
    cli.main(["mse-vs-norm", "--set", "colour=blue"])
    assert "valid keys: seed, d, n" in capsys.readouterr().err


def test_numerical_failure_exit_2(tmp_path, capsys):
    # one-dimensional data under a huge bandwidth: the RBF Gram is numerically singular
    rc = cli.main(["loo-bench", "--d", "1", "--sigma", "1000", "--n-sweep", "40", "--out", str(tmp_path)])
    assert rc == 2
    assert "numerical failure" in capsys.readouterr().err


def test_selftest_passes(capsys):
    assert cli.main(["selftest"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4 and all(l.startswith("PASS") for l in lines)


def test_selftest_failure_exit_3(monkeypatch):
    from ridgeless import selftest

    monkeypatch.setitem(selftest.CHECKS, "broken", lambda rng: (False, "forced"))
    assert cli.main(["selftest"]) == 3


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ridgeless", "selftest"], capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
