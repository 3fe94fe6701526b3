import csv
import io
import math

import numpy as np
import pytest

from rffboot.cli.enums import DatasetKind
from rffboot.cli.module import (
    CSV_HEADER,
    ExperimentSpec,
    main,
    run_experiment,
)
from rffboot.exceptions import InvalidInput
from rffboot.kernels.enums import KernelFamily
from rffboot.kernels.module import Kernel
from rffboot.oracle.enums import ErrorTarget

SMALL = ["--n", "60", "--trials", "4", "--n-boot", "10"]


def read_rows(path):
    with open(path, newline="") as handle:
        return list(csv.DictReader(handle))


def parse_report(text):
    return dict(line.split(": ", 1) for line in text.strip().splitlines())


def test_smoke(tmp_path):
    out = tmp_path / "result.csv"
    argv = ["run", "--s-grid", "50", "--s0", "50", "--trials", "1", "--n-boot", "1"]
    assert main(argv + ["--n", "40", "--out", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 1
    assert tuple(rows[0]) == CSV_HEADER
    assert rows[0]["s"] == "50"
    assert all(math.isfinite(float(value)) for value in rows[0].values())


def test_extrapolated_column(tmp_path):
    out = tmp_path / "result.csv"
    argv = ["run", "--s-grid", "50,100,200,400", "--s0", "50", "--out", str(out)]
    assert main(argv + SMALL) == 0
    rows = read_rows(out)
    assert [int(row["s"]) for row in rows] == [50, 100, 200, 400]
    initial = float(rows[0]["mean_extrapolated_estimate"])
    assert rows[0]["mean_extrapolated_estimate"] == rows[0]["mean_bootstrap_estimate"]
    for row in rows:
        factor = math.sqrt(50 / int(row["s"]))
        value = float(row["mean_extrapolated_estimate"])
        assert value == pytest.approx(factor * initial, rel=1e-12)


def test_same_seed_same_bytes(tmp_path):
    outputs = []
    for workers in ("1", "3", "1"):
        out = tmp_path / f"result-{workers}-{len(outputs)}.csv"
        argv = ["run", "--s-grid", "20,40", "--s0", "10", "--seed", "5"]
        assert main(argv + SMALL + ["--workers", workers, "--out", str(out)]) == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]

    other = tmp_path / "other.csv"
    argv = ["run", "--s-grid", "20,40", "--s0", "10", "--seed", "6"]
    assert main(argv + SMALL + ["--out", str(other)]) == 0
    assert other.read_bytes() != outputs[0]


def test_writes_to_stdout(capsys):
    assert main(["run", "--s-grid", "30", "--s0", "30"] + SMALL) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 2


def test_initial_rescaling(tmp_path):
    out = tmp_path / "result.csv"
    argv = ["run", "--s-grid", "20,80", "--s0", "20", "--rescale", "initial"]
    assert main(argv + SMALL + ["--out", str(out)]) == 0
    rows = read_rows(out)
    assert float(rows[0]["oracle_quantile"]) == 1.0
    assert float(rows[1]["oracle_quantile"]) < 1.0


@pytest.mark.parametrize(
    "argv",
    [
        ["--task", "matrix-op", "--dataset", "lorenz", "--opnorm", "qr"],
        ["--task", "matrix-op", "--dataset", "lorenz", "--power-tol", "1e-6"],
        ["--task", "krr", "--dataset", "regression", "--noise", "0", "--sqrt-y"],
        ["--task", "krr", "--dataset", "regression", "--test-size", "12"],
        ["--task", "mmd", "--dataset", "gaussian-pair", "--rescale", "functional"],
        ["--kernel", "laplacian", "--scale", "10"],
        ["--kernel", "cauchy", "--scale", "10", "--minmax"],
    ],
)
def test_tasks(tmp_path, argv):
    out = tmp_path / "result.csv"
    base = ["run", "--s-grid", "20,40", "--s0", "20", "--out", str(out)]
    assert main(base + SMALL + argv) == 0
    rows = read_rows(out)
    assert len(rows) == 2
    assert all(math.isfinite(float(row["oracle_quantile"])) for row in rows)


def test_csv_datasets(tmp_path):
    rng = np.random.default_rng(0)
    first = tmp_path / "first.csv"
    second = tmp_path / "second.csv"
    np.savetxt(first, rng.normal(size=(50, 4)), delimiter=",", header="a,b,c,y")
    np.savetxt(second, rng.normal(1.0, size=(45, 5)), delimiter=",")
    out = tmp_path / "result.csv"
    base = ["run", "--s-grid", "10", "--s0", "10", "--dataset", "csv"]
    base += ["--trials", "3", "--n-boot", "5", "--out", str(out)]

    assert main(base + ["--csv", str(first), "--has-header", "--rows", "30"]) == 0
    argv = ["--task", "krr", "--csv", str(first), "--has-header", "--labels"]
    assert main(base + argv) == 0
    argv = ["--task", "mmd", "--csv", str(first), "--csv2", str(second)]
    assert main(base + argv + ["--has-header"]) == 0
    assert main(base + argv) == 1


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as info:
        main(["run", "--s-grid", "100,200", "--s0", "300"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["run", "--s-grid", "200,100"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["run", "--task", "matrix-linf", "--rescale", "functional"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["select", "--s0", "20"])
    assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_runtime_errors(tmp_path, capsys):
    missing = tmp_path / "missing" / "result.csv"
    argv = ["run", "--s-grid", "20", "--s0", "20", "--out", str(missing)]
    assert main(argv + SMALL) == 1
    assert str(missing) in capsys.readouterr().err

    argv = ["run", "--s-grid", "20", "--s0", "20", "--task", "krr"]
    assert main(argv + SMALL) == 1
    assert "labelled" in capsys.readouterr().err

    argv = ["run", "--s-grid", "20", "--s0", "20", "--dataset", "csv"]
    assert main(argv + SMALL) == 1
    assert main(argv + SMALL + ["--csv", str(tmp_path / "nope.csv")]) == 1


def test_select(capsys):
    argv = ["select", "--s0", "50", "--n-boot", "20", "--n", "60"]
    assert main(argv + ["--tol", "10"]) == 0
    report = parse_report(capsys.readouterr().out)
    assert report["s0"] == "50"
    assert report["recommended_s1"] == "50"
    assert float(report["predicted_error"]) == float(report["estimate"])

    assert main(argv + ["--tol", "0.1", "--verify", "--trials", "30"]) == 0
    report = parse_report(capsys.readouterr().out)
    s1 = int(report["recommended_s1"])
    estimate = float(report["estimate"])
    assert s1 == max(50, math.ceil(50 * (estimate / 0.1) ** 2 - 1e-9))
    assert float(report["predicted_error"]) <= 0.1 * (1 + 1e-12)
    assert math.isfinite(float(report["oracle_quantile"]))


def test_history(tmp_path, memory_db, capsys):
    out = tmp_path / "result.csv"
    argv = ["run", "--s-grid", "20,40", "--s0", "20", "--out", str(out)]
    assert main(argv + SMALL + ["--record", "--db", memory_db]) == 0

    assert main(["history", "--db", memory_db]) == 0
    listing = capsys.readouterr().out.splitlines()
    assert len(listing) == 1
    assert "matrix-linf swiss-roll gaussian(1)" in listing[0]
    idx = listing[0].split()[0]

    assert main(["history", "--db", memory_db, "--show", idx]) == 0
    assert capsys.readouterr().out == out.read_text()

    assert main(["history", "--db", memory_db, "--remove", idx]) == 0
    assert main(["history", "--db", memory_db]) == 0
    assert capsys.readouterr().out == ""
    assert main(["history", "--db", memory_db, "--show", idx]) == 1


def test_spec_validation():
    kernel = Kernel(KernelFamily.GAUSSIAN, 1.0)
    spec = ExperimentSpec(
        task="matrix-linf", dataset="swiss-roll", kernel=kernel, s_grid=[10], s0=10
    )
    assert spec.task == ErrorTarget.MATRIX_LINF
    assert spec.dataset == DatasetKind.SWISS_ROLL
    assert spec.s_grid == (10,)
    with pytest.raises(InvalidInput):
        ExperimentSpec(ErrorTarget.MMD, DatasetKind.CSV, kernel, (), 1)
    with pytest.raises(InvalidInput):
        ExperimentSpec(ErrorTarget.MMD, DatasetKind.CSV, kernel, (10,), 10, alpha=1.5)


def test_run_experiment_returns_rows():
    spec = ExperimentSpec(
        task=ErrorTarget.MMD,
        dataset=DatasetKind.GAUSSIAN_PAIR,
        kernel=Kernel(KernelFamily.GAUSSIAN, 1.0),
        s_grid=(10, 40),
        s0=10,
        n_boot=10,
        trials=5,
        n=40,
        dim=3,
    )
    stream = io.StringIO()
    rows = run_experiment(spec, stream)
    assert [row.s for row in rows] == [10, 40]
    assert all(0.0 <= row.coverage <= 1.0 for row in rows)
    assert stream.getvalue().startswith("s,oracle_quantile,")


def test_feature_counts_beyond_training_rows(tmp_path, capsys):
    out = tmp_path / "result.csv"
    argv = ["run", "--task", "krr", "--dataset", "regression", "--n", "60"]
    argv += ["--s-grid", "20,40,80", "--s0", "20", "--out", str(out)]
    with pytest.raises(SystemExit) as info:
        main(argv + ["--trials", "4", "--n-boot", "10"])
    assert info.value.code == 2
    assert "s=80" in capsys.readouterr().err
    assert not out.exists()

    argv = ["run", "--task", "matrix-op", "--opnorm", "qr", "--n", "30"]
    with pytest.raises(SystemExit) as info:
        main(argv + ["--s-grid", "40", "--s0", "40", "--trials", "4"])
    assert info.value.code == 2

    capsys.readouterr()
    argv = ["select", "--task", "krr", "--dataset", "regression", "--n", "40"]
    with pytest.raises(SystemExit) as info:
        main(argv + ["--s0", "50", "--tol", "0.1", "--n-boot", "10"])
    assert info.value.code == 2
    assert "s=50 exceeds the 36 rows" in capsys.readouterr().err


def test_run_experiment_checks_feature_counts_first():
    spec = ExperimentSpec(
        task=ErrorTarget.KRR,
        dataset=DatasetKind.REGRESSION,
        kernel=Kernel(KernelFamily.GAUSSIAN, 1.0),
        s_grid=(20, 80),
        s0=20,
        n_boot=10,
        trials=4,
        n=60,
    )
    stream = io.StringIO()
    with pytest.raises(InvalidInput):
        run_experiment(spec, stream)
    assert stream.getvalue() == ""


def test_undecodable_csv(tmp_path, capsys):
    path = tmp_path / "binary.csv"
    path.write_bytes(b"1,2,3\n\xff\xfe,5,6\n")
    argv = ["run", "--s-grid", "10", "--s0", "10", "--dataset", "csv"]
    assert main(argv + SMALL + ["--csv", str(path)]) == 1
    assert f"{path}:2:" in capsys.readouterr().err
