import csv
import json

import numpy as np
import pytest

from infusedlasso.cli import main


@pytest.fixture
def data_csv(tmp_path):
    rc = main(["--out-dir", str(tmp_path / "syn"), "synth", "--samples", "60",
               "--features", "12", "--classes", "2", "--informative", "0,3",
               "--seed", "2"])
    assert rc == 0
    return tmp_path / "syn" / "dataset.csv"


def _rows(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_synth_outputs(tmp_path):
    args = ["synth", "--samples", "60", "--features", "20", "--classes", "3",
            "--informative", "1,4,9", "--seed", "3"]
    assert main(["--out-dir", str(tmp_path / "a")] + args) == 0
    assert main(["--out-dir", str(tmp_path / "b")] + args) == 0
    rows = _rows(tmp_path / "a" / "dataset.csv")
    assert len(rows) == 61 and all(len(r) == 21 for r in rows)
    assert rows[0][-1] == "label"
    assert {r[-1] for r in rows[1:]} == {"1", "2", "3"}
    for name in ("dataset.csv", "truth.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    truth = json.loads((tmp_path / "a" / "truth.json").read_text())
    assert truth["informative"] == [1, 4, 9]


def test_select_writes_result(tmp_path, data_csv):
    out = tmp_path / "sel"
    assert main(["--out-dir", str(out), "select", str(data_csv), "--dump-graphs"]) == 0
    doc = json.loads((out / "result.json").read_text())
    assert sorted(doc["ranking"]) == list(range(12))
    assert doc["selected"] == doc["ranking"][:len(doc["selected"])]
    assert (out / "trace.csv").exists()
    assert (out / "graphs" / "feature0_kernel.csv").exists()
    assert (out / "graphs" / "target0_prob.csv").exists()


def test_select_is_byte_reproducible(tmp_path, data_csv):
    for name in ("a", "b"):
        assert main(["--out-dir", str(tmp_path / name), "select", str(data_csv)]) == 0
    for name in ("result.json", "trace.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_out_dir_from_environment(tmp_path, data_csv, monkeypatch):
    monkeypatch.setenv("INFUSEDLASSO_OUT_DIR", str(tmp_path / "env"))
    assert main(["dump-interaction", str(data_csv)]) == 0
    rows = _rows(tmp_path / "env" / "interaction.csv")
    assert rows[0] == [str(i) for i in range(12)]
    U = np.array(rows[1:], dtype=float)
    np.testing.assert_array_equal(U, U.T)


def test_missing_file_exit_1(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    assert main(["--out-dir", str(tmp_path), "select", str(missing)]) == 1
    assert str(missing) in capsys.readouterr().err


def test_bad_label_column_exit_1(tmp_path, data_csv):
    assert main(["--out-dir", str(tmp_path), "select", str(data_csv),
                 "--label-column", "klass"]) == 1


def test_indefinite_system_exit_2(tmp_path, data_csv, capsys):
    rc = main(["--out-dir", str(tmp_path), "select", str(data_csv), "--lambda3", "1e6"])
    assert rc == 2
    assert "lambda3" in capsys.readouterr().err


def test_eval_curve(tmp_path, data_csv):
    base = ["eval", str(data_csv), "--folds", "3", "--repeats", "2", "--seed", "5",
            "--k", "1,2,5"]
    assert main(["--out-dir", str(tmp_path / "a")] + base) == 0
    assert main(["--out-dir", str(tmp_path / "b")] + base) == 0
    rows = _rows(tmp_path / "a" / "curve.csv")
    assert rows[0] == ["k", "mean_acc", "std_acc"]
    assert [r[0] for r in rows[1:]] == ["1", "2", "5"]
    assert all(0.0 <= float(r[1]) <= 1.0 for r in rows[1:])
    assert (tmp_path / "a" / "curve.csv").read_bytes() == (tmp_path / "b" / "curve.csv").read_bytes()


def test_eval_too_many_folds_exit_1(tmp_path, data_csv):
    assert main(["--out-dir", str(tmp_path), "eval", str(data_csv), "--folds", "61",
                 "--repeats", "1", "--k", "1"]) == 1


def test_trace_converged(tmp_path, data_csv):
    assert main(["--out-dir", str(tmp_path), "trace", str(data_csv)]) == 0
    summary = json.loads((tmp_path / "trace_summary.json").read_text())
    rows = _rows(tmp_path / "trace.csv")
    assert rows[0] == ["iter", "objective", "residual_p", "residual_q"]
    assert len(rows) - 1 == summary["iterations"]
    assert summary["converged"] is True
    last = rows[-1]
    limit = summary["config"]["tol"] * max(1.0, summary["beta_norm"])
    assert max(float(last[2]), float(last[3])) <= limit


def test_trace_iteration_cap(tmp_path, data_csv):
    assert main(["--out-dir", str(tmp_path), "trace", str(data_csv), "--max-iter", "5"]) == 0
    summary = json.loads((tmp_path / "trace_summary.json").read_text())
    assert len(_rows(tmp_path / "trace.csv")) - 1 == 5
    assert summary["converged"] is False
    assert summary["iterations"] == 5


def test_threads_flag(tmp_path, data_csv):
    assert main(["--threads", "1", "--out-dir", str(tmp_path), "trace", str(data_csv)]) == 0


def test_solver_flags_reach_config(tmp_path, data_csv):
    assert main(["--out-dir", str(tmp_path), "select", str(data_csv), "--lambda1", "2.5",
                 "--mu1", "3", "--order", "u_diagonal", "--solve-method", "cg"]) == 0
    cfg = json.loads((tmp_path / "result.json").read_text())["config"]
    assert cfg["lambda1"] == 2.5 and cfg["mu1"] == 3.0
    assert cfg["order"] == "u_diagonal" and cfg["solve_method"] == "cg"
