import json

import numpy as np
import pytest

from isumap.cli import main
from isumap.core_types import Embedding
from isumap.datasets import write_points_csv
from isumap.errors import ConfigError, DataError
from isumap.pipeline import (
    PipelineConfig,
    config_from_mapping,
    parse_config_file,
    run_pipeline,
    write_embedding_csv,
)
from isumap.plotting import emit_scatter_svg

SMALL = {"dataset": "swiss_roll", "n": 200, "k": 8, "workers": 1}


class TestConfig:
    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config key"):
            config_from_mapping({"bogus": "1"})

    def test_k_zero_rejected_before_compute(self):
        with pytest.raises(ConfigError):
            config_from_mapping({**SMALL, "k": "0"})

    def test_bad_value_type(self):
        with pytest.raises(ConfigError, match="cannot parse"):
            config_from_mapping({"n": "many"})

    def test_file_plus_overrides(self, tmp_path):
        cfg_file = tmp_path / "run.cfg"
        cfg_file.write_text("# comment\ndataset=torus\nn=50\neval.kmeans_k=3\n")
        mapping = parse_config_file(cfg_file)
        mapping["n"] = "75"
        cfg = config_from_mapping(mapping)
        assert cfg.dataset == "torus" and cfg.n == 75 and cfg.eval_kmeans_k == 3

    def test_echo_materializes_defaults(self):
        echo = config_from_mapping({}).echo()
        assert echo["tconorm"] == "canonical"
        assert echo["eval.kmeans_k"] == 0
        assert echo["on_disconnect"] == "error"

    def test_csv_requires_input(self):
        with pytest.raises(ConfigError):
            config_from_mapping({"dataset": "csv"})


class TestRunPipeline:
    def test_artifacts_written(self, tmp_path):
        cfg = config_from_mapping({**SMALL, "emit_svg": "true", "eval_kmeans_k": 0})
        report = run_pipeline(cfg, output_dir=tmp_path)
        assert (tmp_path / "embedding.csv").exists()
        assert (tmp_path / "report.json").exists()
        assert (tmp_path / "plot.svg").exists()
        emb = report["_embedding"]
        lines = (tmp_path / "embedding.csv").read_text().splitlines()
        assert lines[0] == "x1,x2,label"
        assert len(lines) == emb.n_points + 1
        on_disk = json.loads((tmp_path / "report.json").read_text())
        assert on_disk["config"]["k"] == 8
        assert set(on_disk["stage_seconds"]) == {
            "generate", "local_metric", "merge", "geodesics", "embed", "evaluate",
        }

    def test_byte_identical_reruns(self, tmp_path):
        cfg = config_from_mapping({**SMALL, "seed": 3})
        run_pipeline(cfg, output_dir=tmp_path / "a")
        run_pipeline(cfg, output_dir=tmp_path / "b")
        assert (tmp_path / "a/embedding.csv").read_bytes() == (tmp_path / "b/embedding.csv").read_bytes()

    def test_disconnected_error_mode(self, tmp_path):
        # two far blobs with small k disconnect the graph
        rng = np.random.default_rng(0)
        pts = np.concatenate([rng.normal(0, 1, (40, 3)), rng.normal(100, 1, (40, 3))])
        path = tmp_path / "blobs.csv"
        np.savetxt(path, pts, delimiter=",")
        cfg = config_from_mapping({"dataset": "csv", "input": str(path), "k": 5, "workers": 1})
        with pytest.raises(DataError):
            run_pipeline(cfg)

    def test_disconnected_largest_component(self, tmp_path):
        rng = np.random.default_rng(1)
        pts = np.concatenate([rng.normal(0, 1, (50, 3)), rng.normal(100, 1, (30, 3))])
        path = tmp_path / "blobs.csv"
        np.savetxt(path, pts, delimiter=",")
        cfg = config_from_mapping(
            {"dataset": "csv", "input": str(path), "k": 5, "workers": 1,
             "on_disconnect": "largest_component"}
        )
        report = run_pipeline(cfg)
        assert report["n_points"] == 50
        assert len(report["kept_indices"]) == 50
        assert report["_embedding"].n_points == 50

    def test_disconnected_cap(self, tmp_path):
        rng = np.random.default_rng(2)
        pts = np.concatenate([rng.normal(0, 1, (40, 3)), rng.normal(100, 1, (40, 3))])
        path = tmp_path / "blobs.csv"
        np.savetxt(path, pts, delimiter=",")
        cfg = config_from_mapping(
            {"dataset": "csv", "input": str(path), "k": 5, "workers": 1, "on_disconnect": "cap"}
        )
        report = run_pipeline(cfg)
        assert report["disconnection"]["capped_pairs"] == 40 * 40
        assert np.isfinite(report["_embedding"].coords).all()

    def test_report_includes_evaluation_scores(self):
        cfg = config_from_mapping({**SMALL, "eval.kmeans_k": "4"})
        report = run_pipeline(cfg)
        assert "psi_vs_labels" in report["evaluation"]
        assert "geodesic_correlation" in report["evaluation"]


class TestSvg:
    def test_square_has_four_circles(self, tmp_path):
        emb = Embedding(
            coords=[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            m=2, stress=0.0, method="classical_mds",
        )
        path = tmp_path / "plot.svg"
        emit_scatter_svg(emb, None, path)
        text = path.read_text()
        assert text.count("<circle") == 4
        assert text.startswith("<svg")

    def test_no_labels_single_color(self, tmp_path):
        emb = Embedding(coords=[[0.0, 0.0], [1.0, 1.0]], m=2, stress=0.0, method="classical_mds")
        path = tmp_path / "plot.svg"
        emit_scatter_svg(emb, None, path)
        colors = {line.split('fill="')[1].split('"')[0]
                  for line in path.read_text().splitlines() if "<circle" in line}
        assert len(colors) == 1

    def test_3d_renders_two_projections(self, tmp_path):
        rng = np.random.default_rng(0)
        emb = Embedding(coords=rng.normal(size=(5, 3)), m=3, stress=0.0, method="classical_mds")
        path = tmp_path / "plot.svg"
        emit_scatter_svg(emb, np.arange(5), path)
        text = path.read_text()
        assert 'id="proj-xy"' in text and 'id="proj-xz"' in text
        assert text.count("<circle") == 10

    def test_high_dimension_rejected(self, tmp_path):
        emb = Embedding(coords=np.zeros((3, 4)), m=4, stress=0.0, method="classical_mds")
        with pytest.raises(ConfigError):
            emit_scatter_svg(emb, None, tmp_path / "plot.svg")


class TestCli:
    def test_generate_reduce_evaluate_plot(self, tmp_path, capsys):
        data = tmp_path / "data.csv"
        code = main(["generate", "--dataset", "torus", "--n", "80", "--seed", "1", "--out", str(data)])
        assert code == 0
        out_dir = tmp_path / "run"
        code = main([
            "reduce", "--input", str(data), "--has-labels", "--k", "6", "--dim", "2",
            "--output-dir", str(out_dir), "--workers", "1", "--set", "eval.kmeans_k=3",
        ])
        assert code == 0
        report = json.loads((out_dir / "report.json").read_text())
        assert report["config"]["dataset"] == "csv"
        assert report["config"]["k"] == 6
        capsys.readouterr()
        code = main(["evaluate", "--input", str(out_dir / "embedding.csv"), "--kmeans-k", "3"])
        assert code == 0
        scores = json.loads(capsys.readouterr().out)
        assert "nn_distance_cv" in scores and "psi_vs_labels" in scores
        svg = tmp_path / "plot.svg"
        assert main(["plot", "--input", str(out_dir / "embedding.csv"), "--out", str(svg)]) == 0
        assert svg.exists()

    def test_config_error_exit_code(self, tmp_path, capsys):
        code = main(["reduce", "--k", "0", "--output-dir", str(tmp_path / "x")])
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_data_error_exit_code(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("0,1,2,3\n1,0,1.5,2\n2,1.501,0,1\n3,2,1,0\n")
        code = main([
            "reduce", "--input", str(bad), "--precomputed", "--k", "2",
            "--output-dir", str(tmp_path / "y"), "--workers", "1",
        ])
        assert code == 3

    def test_bench_subcommand(self, capsys):
        # toy sizes: the scaling bound is timer noise there, so disable it
        code = main([
            "bench", "--sizes", "64,128", "--k", "5", "--workers", "1",
            "--dataset", "swiss_roll", "--ratio-bound", "0",
        ])
        assert code == 0
        table = json.loads(capsys.readouterr().out)
        assert [row["n"] for row in table["rows"]] == [64, 128]
        assert len(table["dijkstra_doubling_ratios"]) == 1


def test_write_embedding_csv_without_labels(tmp_path):
    emb = Embedding(coords=[[0.5, 1.5]], m=2, stress=0.0, method="classical_mds")
    path = tmp_path / "emb.csv"
    write_embedding_csv(emb, None, path)
    assert path.read_text() == "x1,x2\n0.5,1.5\n"
