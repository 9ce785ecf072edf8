import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from polyridge.cli import (
    DataError,
    dumps_document,
    main,
    model_from_document,
    read_dataset,
    read_table,
)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _cubic_ridge_csv(path, M=400, seed=0, m=10):
    rng = np.random.default_rng(seed)
    X = rng.uniform(-1, 1, size=(M, m))
    f = X[:, 0] ** 2 + (X.sum(axis=1) / 10.0) ** 3 + 1.0
    header = [f"x{j + 1}" for j in range(m)] + ["f"]
    _write_csv(path, header, np.column_stack([X, f]).tolist())
    return X, f


@pytest.fixture
def fitted_model(tmp_path):
    data = tmp_path / "train.csv"
    X, f = _cubic_ridge_csv(data, M=400, seed=1)
    model_path = tmp_path / "model.json"
    code = main([
        "fit", str(data), "--dim", "2", "--degree", "3", "--seed", "7",
        "--output", str(model_path),
    ])
    assert code == 0
    return data, model_path, X, f


def test_fit_reaches_zero_residual(tmp_path, capsys):
    data = tmp_path / "train.csv"
    _cubic_ridge_csv(data, M=1000, seed=2)
    model_path = tmp_path / "model.json"
    code = main([
        "fit", str(data), "--dim", "2", "--degree", "3", "--restarts", "2",
        "--seed", "7", "--output", str(model_path),
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "status:" in out
    doc = json.loads(model_path.read_text())
    header, table = read_table(str(data))
    f = table[:, header.index("f")]
    assert doc["metadata"]["residual_norm"] <= 1e-10 * np.linalg.norm(f)
    assert doc["schema_version"] == 1
    assert doc["m"] == 10 and doc["n"] == 2 and doc["p"] == 3


def test_fit_feasibility_error_exit_1(tmp_path, capsys):
    data = tmp_path / "train.csv"
    _cubic_ridge_csv(data, M=50, seed=3)
    code = main(["fit", str(data), "--dim", "2", "--degree", "1"])
    assert code == 1
    assert "n=1" in capsys.readouterr().err


def test_fit_rejects_dim_zero(tmp_path):
    data = tmp_path / "train.csv"
    _cubic_ridge_csv(data, M=50, seed=4)
    assert main(["fit", str(data), "--dim", "0", "--degree", "2"]) == 1


def test_fit_missing_target_exit_1(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    _write_csv(path, ["a", "b"], [[1.0, 2.0]])
    assert main(["fit", str(path), "--dim", "1", "--degree", "2"]) == 1
    assert "target" in capsys.readouterr().err


def test_fit_line_search_failure_exit_2(tmp_path):
    rng = np.random.default_rng(12)
    X = rng.uniform(-1, 1, size=(40, 3))
    f = rng.normal(size=40)
    path = tmp_path / "noise.csv"
    _write_csv(path, ["x1", "x2", "x3", "f"], np.column_stack([X, f]).tolist())
    code = main([
        "fit", str(path), "--dim", "1", "--degree", "2", "--seed", "0",
        "--max-backtracks", "1", "--beta", "0.999999",
        "--output", str(tmp_path / "m.json"),
    ])
    assert code == 2


def test_model_document_roundtrip_bytes(fitted_model):
    _, model_path, _, _ = fitted_model
    text = model_path.read_text()
    doc = json.loads(text)
    assert dumps_document(doc) == text
    model = model_from_document(doc)
    assert np.abs(model.U.T @ model.U - np.eye(model.n)).max() <= 1e-10


def test_fit_deterministic_given_seed(tmp_path):
    data = tmp_path / "train.csv"
    _cubic_ridge_csv(data, M=200, seed=5)
    out1, out2 = tmp_path / "m1.json", tmp_path / "m2.json"
    args = ["fit", str(data), "--dim", "2", "--degree", "3", "--seed", "9"]
    assert main(args + ["--output", str(out1)]) == 0
    assert main(args + ["--output", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_predict_training_set(fitted_model, tmp_path):
    data, model_path, X, f = fitted_model
    out = tmp_path / "pred.csv"
    assert main(["predict", str(model_path), str(data), "--output", str(out)]) == 0
    header, table = read_table(str(out))
    assert header[-1] == "g"
    g = table[:, -1]
    assert np.abs(g - f).max() <= 1e-8 * np.abs(f).max()


def test_predict_ridge_invariance(fitted_model, tmp_path):
    _, model_path, X, _ = fitted_model
    doc = json.loads(model_path.read_text())
    model = model_from_document(doc)
    rng = np.random.default_rng(6)
    pts = rng.uniform(-1, 1, size=(20, 10))
    w = rng.normal(size=10)
    w -= model.U @ (model.U.T @ w)  # orthogonal to the fitted subspace
    header = [f"x{j + 1}" for j in range(10)]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    _write_csv(a, header, pts.tolist())
    _write_csv(b, header, (pts + w).tolist())
    out_a, out_b = tmp_path / "ga.csv", tmp_path / "gb.csv"
    assert main(["predict", str(model_path), str(a), "--output", str(out_a)]) == 0
    assert main(["predict", str(model_path), str(b), "--output", str(out_b)]) == 0
    ga = read_table(str(out_a))[1][:, -1]
    gb = read_table(str(out_b))[1][:, -1]
    np.testing.assert_allclose(ga, gb, atol=1e-9)


def test_predict_empty_input(fitted_model, tmp_path):
    _, model_path, _, _ = fitted_model
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "out.csv"
    assert main(["predict", str(model_path), str(empty), "--output", str(out)]) == 0
    assert out.read_text() == ""


def test_predict_width_mismatch_exit_1(fitted_model, tmp_path, capsys):
    _, model_path, _, _ = fitted_model
    bad = tmp_path / "bad.csv"
    _write_csv(bad, ["a", "b", "c"], [[1.0, 2.0, 3.0]])
    assert main(["predict", str(model_path), str(bad)]) == 1
    assert "expects" in capsys.readouterr().err


def test_shadow_sorted_with_curve(tmp_path):
    data = tmp_path / "train.csv"
    rng = np.random.default_rng(7)
    X = rng.uniform(-1, 1, size=(200, 5))
    f = (X @ np.ones(5) / 5.0) ** 2 + 0.5
    _write_csv(data, [f"x{j}" for j in range(1, 6)] + ["f"], np.column_stack([X, f]).tolist())
    model_path = tmp_path / "model.json"
    assert main([
        "fit", str(data), "--dim", "1", "--degree", "2", "--seed", "3",
        "--output", str(model_path),
    ]) == 0
    out = tmp_path / "shadow.csv"
    curve = tmp_path / "curve.csv"
    assert main([
        "shadow", str(model_path), str(data), "--output", str(out), "--curve", str(curve),
    ]) == 0
    header, table = read_table(str(out))
    assert header == ["y1", "f", "g"]
    y = table[:, 0]
    assert np.all(np.diff(y) >= 0)  # sorted by projection
    np.testing.assert_allclose(table[:, 2], table[:, 1], atol=1e-6 * np.abs(f).max())
    cheader, ctable = read_table(str(curve))
    assert cheader == ["y1", "g"]
    assert ctable.shape[0] == 200
    assert ctable[0, 0] == pytest.approx(y.min())
    assert ctable[-1, 0] == pytest.approx(y.max())


def test_shadow_constant_model(tmp_path):
    data = tmp_path / "train.csv"
    rng = np.random.default_rng(8)
    X = rng.uniform(-1, 1, size=(30, 4))
    _write_csv(data, ["x1", "x2", "x3", "x4", "f"],
               np.column_stack([X, np.full(30, 2.5)]).tolist())
    model_path = tmp_path / "model.json"
    assert main(["fit", str(data), "--dim", "1", "--degree", "2", "--seed", "1",
                 "--output", str(model_path)]) == 0
    out = tmp_path / "shadow.csv"
    assert main(["shadow", str(model_path), str(data), "--output", str(out)]) == 0
    _, table = read_table(str(out))
    np.testing.assert_allclose(table[:, -1], 2.5, atol=1e-9)


def test_bench_convergence_csv(tmp_path):
    out = tmp_path / "bench.csv"
    code = main([
        "bench", "convergence", "--seed", "1", "--replicates", "2",
        "--option", "solvers=('gauss_newton',)", "--option", "samples=300",
        "--output", str(out),
    ])
    assert code == 0
    with open(out, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["solver", "replicate", "iter", "residual", "seed"]
    assert len(rows) > 1
    assert all(row[0] == "gauss_newton" for row in rows[1:])


def test_bench_conditioning_csv(tmp_path):
    out = tmp_path / "cond.csv"
    code = main([
        "bench", "conditioning", "--seed", "2",
        "--option", "samples=100", "--option", "dim=10", "--option", "max_degree=3",
        "--output", str(out),
    ])
    assert code == 0
    with open(out) as fh:
        header = fh.readline().strip().split(",")
    assert header == ["basis", "scaled", "degree", "cond", "seed"]


def test_bench_unknown_name_lists_experiments(tmp_path, capsys):
    assert main(["bench", "nonsense"]) == 1
    err = capsys.readouterr().err
    assert "conditioning" in err and "convergence" in err


def test_read_table_ragged_row(tmp_path):
    path = tmp_path / "ragged.csv"
    path.write_text("a,b\n1.0,2.0\n3.0\n")
    with pytest.raises(DataError, match="line 3"):
        read_table(str(path))


def test_read_table_non_numeric_cell(tmp_path):
    path = tmp_path / "text.csv"
    path.write_text("a,b\n1.0,oops\n")
    with pytest.raises(DataError, match="column 'b'"):
        read_table(str(path))


def test_read_table_non_finite_cell(tmp_path):
    path = tmp_path / "inf.csv"
    path.write_text("a,b\n1.0,inf\n")
    with pytest.raises(DataError, match="non-finite"):
        read_table(str(path))


def test_read_dataset_single_row_accepted(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("x1,f\n0.5,1.25\n")
    features, X, f = read_dataset(str(path), "f")
    assert features == ["x1"]
    assert X.shape == (1, 1)
    assert f[0] == 1.25


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "polyridge.cli", "--help"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert "fit" in proc.stdout and "bench" in proc.stdout
