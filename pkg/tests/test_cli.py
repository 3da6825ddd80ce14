import subprocess
import sys

import pytest

from hkaclust.cli import EXIT_DATA, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, main, read_config
from hkaclust.harness import read_records


def test_run_writes_csv(tmp_path, capsys):
    out = tmp_path / "r.csv"
    code = main(["run", "--dataset", "artset2", "--algo", "hkak", "--replicates", "2",
                 "--maxiter", "5", "--cap", "105", "--out", str(out)])
    assert code == EXIT_OK
    recs = read_records(out)
    assert [r.seed for r in recs] == [0, 1]
    assert all(r.evals == 105 for r in recs)
    assert "| intra | mean |" in capsys.readouterr().out


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("# demo\ndataset = iris\nalgo = kmeans\nreplicates = 3\nseed = 4\nmaxiter = 50\n")
    out = tmp_path / "r.csv"
    assert main(["run", "--config", str(cfg), "--replicates", "2", "--out", str(out)]) == EXIT_OK
    assert [r.seed for r in read_records(out)] == [4, 5]


def test_read_config_errors(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert main(["run", "--config", str(cfg)]) == EXIT_USAGE
    cfg.write_text("n-xi = lots\n")
    assert main(["run", "--config", str(cfg)]) == EXIT_USAGE
    cfg.write_text("n-xi = 4\nheader = yes\n")
    assert read_config(cfg) == {"n_xi": 4, "header": True}


def test_usage_errors(capsys):
    assert main([]) == EXIT_USAGE
    assert main(["run", "--dataset", "iris", "--bogus"]) == EXIT_USAGE
    assert main(["run"]) == EXIT_USAGE
    assert main(["run", "--dataset", "iris", "--algo", "kmeans", "--alpha", "0.5"]) == EXIT_USAGE
    assert "usage error" in capsys.readouterr().err


def test_data_errors(tmp_path):
    assert main(["run", "--csv", str(tmp_path / "missing.csv"), "--k", "2"]) == EXIT_DATA
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3,x\n")
    assert main(["run", "--csv", str(bad), "--k", "2"]) == EXIT_DATA


def test_runtime_error_exit(tmp_path):
    p = tmp_path / "pts.csv"
    p.write_text("0,0\n1,1\n")
    # K larger than the number of points fails only once the data is loaded
    assert main(["run", "--csv", str(p), "--k", "5", "--algo", "kmeans"]) == EXIT_RUNTIME


def test_gen_and_compare(tmp_path, capsys):
    g = tmp_path / "a1.csv"
    assert main(["gen", "artset1", "--seed", "2", "--out", str(g)]) == EXIT_OK
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    base = ["run", "--csv", str(g), "--header", "--label-col", "label", "--replicates", "4"]
    assert main(base + ["--algo", "kmeans", "--out", str(a)]) == EXIT_OK
    assert main(base + ["--algo", "hka", "--maxiter", "3", "--out", str(b)]) == EXIT_OK
    capsys.readouterr()
    assert main(["compare", str(a), str(b), "--metric", "intra", "--tail", "less"]) == EXIT_OK
    p = float(capsys.readouterr().out)
    assert 0.0 <= p <= 1.0


def test_console_script_module():
    res = subprocess.run([sys.executable, "-m", "hkaclust.cli", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "run" in res.stdout


@pytest.mark.parametrize("fmt", ["markdown", "csv"])
def test_formats(tmp_path, fmt):
    out = tmp_path / "o"
    assert main(["run", "--dataset", "iris", "--algo", "kmeans", "--replicates", "2",
                 "--format", fmt, "--out", str(out)]) == EXIT_OK
    assert out.read_text()
