import numpy as np
import pytest

from distspec.cli import EXIT_REJECT, main
from distspec.dataio import write_dataset_csv
from distspec.model import DataSet


@pytest.fixture
def linear_file(tmp_path, rng):
    X = rng.standard_normal((80, 2))
    path = tmp_path / "lin.csv"
    write_dataset_csv(DataSet(X, X @ [1.0, -0.5] + 0.3 * rng.standard_normal(80), ("u", "v"), "y"), path)
    return path


@pytest.fixture
def curved_file(tmp_path, rng):
    X = rng.standard_normal((120, 2))
    path = tmp_path / "curved.csv"
    write_dataset_csv(DataSet(X, X.sum(axis=1) + 2 * np.cos(2 * X[:, 0]) + 0.3 * rng.standard_normal(120), ("u", "v"), "y"), path)
    return path


def test_test_command_fail_to_reject(linear_file, capsys):
    code = main(["test", "--data", str(linear_file), "--response", "y", "--boot", "99", "--seed", "3"])
    out = capsys.readouterr().out
    assert code == 0
    assert "n=80 p=2" in out and "p-value" in out


def test_test_command_reject(curved_file, capsys):
    code = main(["test", "--data", str(curved_file), "--response", "y", "--predictors", "u,v",
                 "--boot", "99", "--stat", "zheng", "--bw-const", "1.0"])
    assert code == EXIT_REJECT


def test_test_command_error(tmp_path, capsys):
    code = main(["test", "--data", str(tmp_path / "missing.csv"), "--response", "y"])
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_simulate_writes_csv(tmp_path, capsys):
    out = tmp_path / "power.csv"
    curves = tmp_path / "curves"
    code = main(["simulate", "--scenario", "1", "--p", "2", "--a", "0.0,0.5", "--n", "50",
                 "--reps", "5", "--boot", "19", "--stats", "tn,stute", "--workers", "2",
                 "--out", str(out), "--curves-dir", str(curves)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "scenario,p,a,n,stat,reps,rate,mc_stderr"
    assert len(lines) == 5
    assert len(list(curves.glob("*.csv"))) == 2


def test_simulate_unknown_statistic(capsys):
    assert main(["simulate", "--scenario", "1", "--stats", "energy", "--reps", "1"]) == 1


def test_validate_kernel(capsys):
    code = main(["validate-kernel", "--cases", "6", "--draws", "20000", "--seed", "1"])
    out = capsys.readouterr().out
    assert code == 0
    assert "of 6 cases beyond 4 standard errors" in out


def test_drift_oracle(capsys):
    assert main(["drift-oracle", "--scenario", "1", "--p", "2", "--a", "1", "--pairs", "20000"]) == 0
    assert capsys.readouterr().out.startswith("mu1 = ")


def test_autompg_command(tmp_path, capsys):
    g = np.random.default_rng(5)
    lines = []
    for k in range(60):
        cyl = int(g.choice([4, 6, 8]))
        hp = "?" if k == 7 else f"{g.uniform(50, 200):.1f}"
        lines.append(
            f"{g.uniform(10, 40):.1f} {cyl} {g.uniform(70, 400):.1f} {hp} {g.uniform(1600, 5000):.0f}. "
            f"{g.uniform(8, 25):.1f} {70 + k % 13} {1 + k % 3}\t\"car {k}\""
        )
    path = tmp_path / "auto-mpg.data"
    path.write_text("\n".join(lines) + "\n")
    assert main(["autompg", "--file", str(path), "--boot", "49"]) == 0
    out = capsys.readouterr().out
    assert "n=59 (dropped 1" in out and "p=8" in out and "p-value:" in out
