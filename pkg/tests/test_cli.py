import csv

import pytest

from app.cli import SAMPLE_COLUMNS, build_parser, main, resolve_config
from app.services.assignment.core import CostMatrix
from app.services.assignment.io import write_cost_matrix

TINY_CONFIG = """\
trials = 1
variants = ["TGS+"]

[scenario]
duration = 5
expected_trajectories = 2.0
seed = 11

[scenario.region]
x_max = 1000.0
y_max = 1000.0

[scenario.sensor]
clutter_rate = 2.0

[scenario.birth]
nx = 2
ny = 1

[truncation]
max_hypotheses = 10

[truncation.sampler]
iterations = 30
"""


def read_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.reader(fh))


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "tiny.toml"
    path.write_text(TINY_CONFIG, encoding="utf-8")
    return path


@pytest.fixture
def matrix_file(tmp_path):
    return write_cost_matrix(CostMatrix.from_rows([[1.0, 1.0, 2.0], [1.0, 1.0, 3.0]]), tmp_path / "eta.txt")


class TestParsing:
    def test_print_defaults(self, capsys):
        assert main(["--print-defaults"]) == 0
        out = capsys.readouterr().out
        assert "trials = 100\n" in out
        assert "scenario.sensor.clutter_rate = 90.0\n" in out

    def test_missing_command(self, capsys):
        assert main([]) == 2
        assert "usage" in capsys.readouterr().err

    def test_seed_overrides_every_seed(self, config_file, tmp_path):
        args = build_parser().parse_args(["--config", str(config_file), "--seed", "77", "--out", str(tmp_path), "simulate"])
        cfg = resolve_config(args)
        assert cfg.seed == 77
        assert cfg.scenario.seed == 77
        assert cfg.truncation.sampler.seed == 77
        assert cfg.output_dir == tmp_path
        assert cfg.scenario.duration == 5


class TestCommands:
    def test_simulate_then_filter(self, config_file, tmp_path, capsys):
        out = tmp_path / "out"
        assert main(["--config", str(config_file), "--out", str(out), "simulate"]) == 0
        truth = read_csv(out / "truth.csv")
        assert truth[0] == ["scan", "label_birth", "label_index", "x", "y", "vx", "vy"]
        assert read_csv(out / "measurements.csv")[0] == ["scan", "zx", "zy"]

        filtered = tmp_path / "filtered"
        code = main([
            "--config", str(config_file), "--out", str(filtered), "filter",
            "--measurements", str(out / "measurements.csv"),
            "--truth", str(out / "truth.csv"),
            "--variant", "SGS+", "--iterations", "10",
        ])
        assert code == 0
        assert "mean OSPA" in capsys.readouterr().out
        diagnostics = read_csv(filtered / "diagnostics.csv")
        assert len(diagnostics) == 6
        assert (filtered / "estimates.csv").exists()

    def test_filter_simulates_without_input(self, config_file, tmp_path, capsys):
        assert main(["--config", str(config_file), "--out", str(tmp_path), "filter"]) == 0
        assert "5 scans" in capsys.readouterr().out

    def test_sample_writes_every_iterate(self, matrix_file, tmp_path):
        code = main(["--out", str(tmp_path), "--seed", "3", "sample", "--cost-matrix", str(matrix_file), "--iterations", "50"])
        assert code == 0
        rows = read_csv(tmp_path / "samples.csv")
        assert rows[0] == SAMPLE_COLUMNS
        assert len(rows) == 51
        assert [r[0] for r in rows[1:4]] == ["1", "2", "3"]
        assert all(len(r[1].split(";")) == 2 for r in rows[1:])
        assert all(r[3] != "" for r in rows[1:])

    def test_unweighted_sampler_leaves_weight_column_empty(self, matrix_file, tmp_path):
        code = main([
            "--out", str(tmp_path), "sample", "--cost-matrix", str(matrix_file),
            "--variant", "RGS+", "--iterations", "10", "--initial", "0,1",
        ])
        assert code == 0
        rows = read_csv(tmp_path / "samples.csv")
        assert all(r[3] == "" for r in rows[1:])

    def test_oracle_check_passes_and_fails(self, matrix_file, tmp_path, capsys):
        base = ["--out", str(tmp_path), "oracle-check", "--cost-matrix", str(matrix_file)]
        assert main(base + ["--iterations", "50000", "--tolerance", "0.05"]) == 0
        assert "total variation" in capsys.readouterr().out
        assert main(base + ["--iterations", "20", "--tolerance", "0.0"]) == 1

    def test_oracle_check_on_random_instance(self, tmp_path):
        code = main([
            "--out", str(tmp_path), "oracle-check", "--P", "2", "--M", "2",
            "--variant", "SGS+", "--iterations", "20000", "--tolerance", "0.05",
        ])
        assert code == 0

    def test_bench(self, tmp_path):
        code = main([
            "--out", str(tmp_path), "bench", "--P", "3", "--M", "2",
            "--iterations", "5", "--variants", "TGS+", "DGS+bwd",
        ])
        assert code == 0
        assert len(read_csv(tmp_path / "kernels.csv")) == 3

    def test_experiment(self, config_file, tmp_path, capsys):
        out = tmp_path / "exp"
        assert main(["--config", str(config_file), "--out", str(out), "experiment"]) == 0
        assert (out / "aggregate.csv").exists()
        assert (out / "raw" / "grid0_trial0.csv").exists()
        assert "TGS+" in capsys.readouterr().out


class TestErrors:
    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["--config", str(tmp_path / "nope.toml"), "simulate"]) == 2
        assert "<file>" in capsys.readouterr().err

    def test_invalid_config_value(self, tmp_path, capsys):
        path = tmp_path / "bad.toml"
        path.write_text("[scenario.sensor]\npd = 1.5\n", encoding="utf-8")
        assert main(["--config", str(path), "simulate"]) == 2
        assert "scenario.sensor.pd" in capsys.readouterr().err

    def test_seed_out_of_range(self, tmp_path):
        assert main(["--seed", "-1", "--out", str(tmp_path), "simulate"]) == 2

    def test_unreadable_cost_matrix(self, tmp_path):
        assert main(["--out", str(tmp_path), "sample", "--cost-matrix", str(tmp_path / "none.txt")]) == 2

    def test_missing_measurements_file(self, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "filter", "--measurements", str(tmp_path / "absent.csv")])
        assert code == 2
        assert "absent.csv" in capsys.readouterr().err

    def test_invalid_sampler_option(self, matrix_file, tmp_path, capsys):
        code = main(["--out", str(tmp_path), "sample", "--cost-matrix", str(matrix_file), "--alpha", "0"])
        assert code == 2
        assert "alpha" in capsys.readouterr().err
