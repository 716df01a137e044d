import csv
import json
import subprocess
import sys

import pytest

from qkmeans.cli import BENCH_COLUMNS, main


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def easy(tmp_path):
    assert main(["gen", "--k", "4", "--per", "15", "--dim", "2", "--variance", "0.01",
                 "--min-sep", "2", "--box-hi", "5", "--seed", "7",
                 "--out-dir", str(tmp_path)]) == 0
    return tmp_path / "data.csv"


class TestCommands:
    def test_gen(self, easy):
        rows = read_csv(easy)
        assert len(rows) == 60
        assert list(rows[0]) == ["f0", "f1", "label"]
        assert (easy.parent / "gen.manifest.json").exists()

    def test_cluster(self, easy, tmp_path):
        assert main(["cluster", "--data", str(easy), "--k", "4", "--epsilon", "1",
                     "--shots", "2048", "--seed", "3", "--out-dir", str(tmp_path)]) == 0
        run = json.loads((tmp_path / "run.json").read_text())
        assert len(run["labels"]) == 60
        assert set(run["scores"]) >= {"balanced_accuracy", "raw_accuracy"}
        assert read_csv(tmp_path / "confusion.csv")[0]["true"] == "0"

    def test_cluster_subspace_angle(self, easy, tmp_path):
        assert main(["cluster", "--data", str(easy), "--k", "4", "--estimator", "subspace",
                     "--block", "2", "--embedding", "angle", "--shots", "12000",
                     "--max-iter", "5", "--profile", "seven-qubit", "--prefix", "sub_",
                     "--out-dir", str(tmp_path)]) == 0
        assert (tmp_path / "sub_labels.csv").exists()
        assert (tmp_path / "sub_cluster.manifest.json").exists()

    def test_classify(self, easy, tmp_path):
        assert main(["classify", "--train", str(easy), "--test", str(easy), "--k", "4",
                     "--reps", "2", "--shots", "1000", "--estimator", "subspace",
                     "--out-dir", str(tmp_path)]) == 0
        scores = json.loads((tmp_path / "scores.json").read_text())
        assert 0.0 <= scores["balanced_accuracy"] <= 1.0
        assert len(read_csv(tmp_path / "labels.csv")) == 60

    def test_report(self, tmp_path):
        (tmp_path / "t.csv").write_text("label\n0\n0\n1\n1\n")
        (tmp_path / "p.csv").write_text("label\n1\n1\n0\n0\n")
        assert main(["report", "--true", str(tmp_path / "t.csv"), "--pred",
                     str(tmp_path / "p.csv"), "--align", "--out-dir", str(tmp_path)]) == 0
        assert json.loads((tmp_path / "scores.json").read_text())["raw_accuracy"] == 1.0

    def test_bench_columns(self, tmp_path):
        assert main(["bench", "--kind", "distance", "--values", "1", "10", "--trials", "5",
                     "--out-dir", str(tmp_path), "--out", "b.csv"]) == 0
        rows = read_csv(tmp_path / "b.csv")
        assert list(rows[0]) == BENCH_COLUMNS
        assert float(rows[1]["analytic"]) == pytest.approx(162.0)

    def test_bench_dimension_analytic(self, tmp_path):
        assert main(["bench", "--kind", "dimension", "--values", "2", "4", "8",
                     "--trials", "3", "--out-dir", str(tmp_path), "--out", "d.csv"]) == 0
        assert [float(r["analytic"]) for r in read_csv(tmp_path / "d.csv")] == \
            pytest.approx([2, 4, 8])

    def test_resources(self, tmp_path):
        assert main(["resources", "--dims", "2", "26", "--embedding", "angle",
                     "--out-dir", str(tmp_path)]) == 0
        rows = read_csv(tmp_path / "resources.csv")
        assert [int(r["width"]) for r in rows] == [3, 27]

    def test_pca_and_elbow(self, easy, tmp_path):
        assert main(["pca", "--data", str(easy), "--dim", "1", "--out-dir", str(tmp_path)]) == 0
        assert "components" in json.loads((tmp_path / "pca.json").read_text())
        assert main(["elbow", "--data", str(easy), "--k-max", "6",
                     "--out-dir", str(tmp_path)]) == 0
        assert [int(r["k"]) for r in read_csv(tmp_path / "elbow.csv")] == list(range(1, 7))

    def test_env_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv("QKMEANS_OUTPUT_DIR", str(tmp_path / "env"))
        assert main(["resources", "--dims", "4"]) == 0
        assert (tmp_path / "env" / "resources.csv").exists()


class TestReproducibility:
    def test_rerun_byte_identical(self, easy, tmp_path):
        out = tmp_path / "run"
        argv = ["cluster", "--data", str(easy), "--k", "4", "--shots", "512",
                "--profile", "cap8192", "--seed", "5", "--out-dir", str(out)]
        assert main(argv) == 0
        first = {p.name: p.read_bytes() for p in out.glob("*.csv")}
        assert main(["rerun", str(out / "cluster.manifest.json")]) == 0
        second = {p.name: p.read_bytes() for p in out.glob("*.csv")}
        assert first == second and first


class TestErrors:
    def test_missing_file(self, tmp_path, capsys):
        assert main(["cluster", "--data", str(tmp_path / "none.csv"), "--k", "2",
                     "--out-dir", str(tmp_path)]) == 2
        assert "error" in capsys.readouterr().err

    def test_unknown_profile(self, easy, tmp_path):
        assert main(["cluster", "--data", str(easy), "--k", "2", "--profile", "nope",
                     "--out-dir", str(tmp_path)]) == 2

    def test_shot_limit(self, easy, tmp_path, capsys):
        assert main(["cluster", "--data", str(easy), "--k", "2", "--profile", "cap8192",
                     "--shots", "12000", "--out-dir", str(tmp_path)]) == 2
        assert "max_shots=8192" in capsys.readouterr().err

    def test_block_needs_subspace(self, easy, tmp_path):
        assert main(["cluster", "--data", str(easy), "--k", "2", "--block", "4",
                     "--out-dir", str(tmp_path)]) == 2

    def test_help_lists_columns(self):
        out = subprocess.run([sys.executable, "-m", "qkmeans.cli", "bench", "--help"],
                             capture_output=True, text=True, check=True).stdout
        assert "sweep_value" in out and "analytic" in out
