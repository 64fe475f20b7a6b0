import csv
import json
import os
from pathlib import Path

import numpy as np
import pytest

from qksvm.cli import main
from qksvm.kernels import KernelMatrix

GOLDEN = json.loads((Path(__file__).parent / "golden.json").read_text())["xor_seed42"]


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def four_points(tmp_path):
    path = tmp_path / "four.csv"
    path.write_text("f1,f2,label\n0.1,0.2,0\n0.9,0.4,0\n0.3,0.8,1\n0.7,0.6,1\n")
    return path


class TestGenData:
    def test_shape(self, tmp_path):
        out = tmp_path / "xor.csv"
        assert run("gen-data", "--kind", "xor", "--n", 100, "--seed", 7, "--out", out) == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["f1", "f2", "label"]
        assert len(rows) == 201
        prov = json.loads((tmp_path / "xor.csv.provenance.json").read_text())
        assert prov["seed"] == 7 and prov["kind"] == "xor"

    def test_deterministic(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        run("gen-data", "--kind", "rings", "--n", 20, "--seed", 3, "--out", a)
        run("gen-data", "--kind", "rings", "--n", 20, "--seed", 3, "--out", b)
        assert a.read_bytes() == b.read_bytes()

    def test_unknown_kind_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run("gen-data", "--kind", "spiral", "--out", tmp_path / "s.csv")
        assert exc.value.code == 2

    def test_invalid_parameter_is_runtime_error(self, tmp_path):
        assert run("gen-data", "--kind", "xor", "--n", 3, "--out", tmp_path / "s.csv") == 1

    @pytest.mark.skipif(os.geteuid() == 0, reason="root ignores file permissions")
    def test_unwritable_path(self, tmp_path):
        locked = tmp_path / "locked"
        locked.mkdir()
        locked.chmod(0o500)
        assert run("gen-data", "--kind", "xor", "--out", locked / "x.csv") == 1

    def test_path_under_a_file(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        assert run("gen-data", "--kind", "xor", "--out", blocker / "x.csv") == 1


class TestKernel:
    def test_quantum_four_points(self, four_points, tmp_path, capsys):
        out = tmp_path / "k.csv"
        assert run("kernel", "--data", four_points, "--kernel", "quantum", "--out", out) == 0
        K = KernelMatrix.load(out)
        assert K.values.shape == (4, 4)
        np.testing.assert_array_equal(np.diag(K.values), 1.0)
        summary = json.loads(capsys.readouterr().out)
        assert summary["size"] == 4 and summary["is_psd"]

    def test_entanglement_differs(self, four_points, tmp_path):
        a, b = tmp_path / "none.json", tmp_path / "lin.json"
        run("kernel", "--data", four_points, "--entanglement", "none", "--out", a)
        run("kernel", "--data", four_points, "--entanglement", "linear", "--out", b)
        diff = KernelMatrix.load(a).values - KernelMatrix.load(b).values
        assert np.max(np.abs(diff)) > 1e-3

    def test_linear_orthogonal(self, tmp_path):
        data = tmp_path / "orth.csv"
        rows = [",".join(map(str, row)) + f",{i // 2}" for i, row in enumerate(np.eye(4, dtype=int))]
        data.write_text("f1,f2,f3,f4,label\n" + "\n".join(rows) + "\n")
        out = tmp_path / "k.csv"
        assert run("kernel", "--data", data, "--scaler", "none", "--kernel", "linear", "--out", out) == 0
        np.testing.assert_array_equal(KernelMatrix.load(out).values, np.eye(4))

    def test_missing_data_file(self, tmp_path):
        assert run("kernel", "--data", tmp_path / "nope.csv", "--out", tmp_path / "k.csv") == 1


class TestTrainEval:
    def test_blobs_linear(self, tmp_path):
        out = tmp_path / "run"
        code = run("train-eval", "--generator", "blobs", "--n", 50, "--kernel", "linear", "--out", out)
        assert code == 0
        report = json.loads((out / "report.json").read_text())
        assert report["test"]["accuracy"] == 1.0
        model = json.loads((out / "model.json").read_text())
        assert model["config"]["kernel"]["kind"] == "linear"

    def test_xor_quantum_beats_linear(self, tmp_path):
        acc = {}
        for kernel in ("quantum", "linear"):
            out = tmp_path / kernel
            run("train-eval", "--generator", "xor", "--data-seed", 42, "--kernel", kernel, "--out", out)
            acc[kernel] = json.loads((out / "report.json").read_text())["test"]["accuracy"]
        assert acc == {"quantum": GOLDEN["quantum_test_acc"], "linear": GOLDEN["linear_test_acc"]}

    def test_replay_from_report(self, tmp_path):
        first, second = tmp_path / "one", tmp_path / "two"
        run("train-eval", "--generator", "rings", "--n", 20, "--kernel", "rbf", "--out", first)
        run("train-eval", "--config", first / "report.json", "--out", second)
        assert (first / "model.json").read_bytes() == (second / "model.json").read_bytes()

    def test_precomputed_gram(self, tmp_path):
        gram = tmp_path / "k.json"
        run("kernel", "--generator", "xor", "--n", 20, "--out", gram)
        a, b = tmp_path / "a", tmp_path / "b"
        run("train-eval", "--generator", "xor", "--n", 20, "--out", a)
        assert run("train-eval", "--generator", "xor", "--n", 20, "--gram", gram, "--out", b) == 0
        ra = json.loads((a / "report.json").read_text())
        rb = json.loads((b / "report.json").read_text())
        assert ra["test"]["accuracy"] == rb["test"]["accuracy"]


class TestSweeps:
    def test_depth(self, tmp_path):
        out = tmp_path / "depth.csv"
        code = run("sweep-depth", "--generator", "xor", "--n", 15, "--reps-list", "1,2,3", "--out", out, "--plot")
        assert code == 0
        rows = list(csv.DictReader(out.open()))
        assert [r["reps"] for r in rows] == ["1", "2", "3"]
        assert out.with_suffix(".svg").exists()
        timing = list(csv.DictReader((tmp_path / "depth.timing.csv").open()))
        assert all(float(r["seconds"]) > 0 for r in timing)

    def test_depth_duplicates_rejected(self, tmp_path):
        assert run("sweep-depth", "--reps-list", "1,2,2", "--out", tmp_path / "d.csv") == 1

    def test_kernel_grid(self, tmp_path):
        out = tmp_path / "k.csv"
        assert run("sweep-kernels", "--generator", "xor", "--n", 15, "--epochs", 5, "--out", out) == 0
        rows = list(csv.DictReader(out.open()))
        assert len(rows) == 12
        assert {r["kernel"] for r in rows} == {"linear", "poly", "rbf", "sigmoid"}


class TestPlot:
    def test_deterministic(self, tmp_path):
        csv_path = tmp_path / "d.csv"
        csv_path.write_text("reps,train_acc,test_acc\n" + "".join(f"{r},0.{r},0.{r}\n" for r in range(1, 6)))
        a, b = tmp_path / "a.svg", tmp_path / "b.svg"
        assert run("plot", csv_path, "--out", a) == 0
        run("plot", csv_path, "--out", b)
        assert a.read_bytes() == b.read_bytes()
        assert a.read_text().count('class="point"') == 10

    def test_empty_csv(self, tmp_path, capsys):
        csv_path = tmp_path / "e.csv"
        csv_path.write_text("")
        assert run("plot", csv_path, "--out", tmp_path / "e.svg") == 1
        assert "line 1" in capsys.readouterr().err


def test_no_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
