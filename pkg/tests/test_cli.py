"""End-to-end CLI behavior: file IO, artifacts, exit codes."""

import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest

from meplot.cli import CliError, main, read_values

SMALL_CONFIG = """
model = "pareto:alpha=3"
target = "slope_frechet"
regime = "frechet"
n_grid = [500, 2000]
replicates = 10
seed = 3
"""


class TestReadValues:
    def test_plain_column(self, tmp_path):
        p = tmp_path / "v.csv"
        p.write_text("1.5\n2.5\n3.5\n")
        np.testing.assert_array_equal(read_values(p), [1.5, 2.5, 3.5])

    def test_comments_header_and_extra_columns(self, tmp_path):
        p = tmp_path / "v.csv"
        p.write_text("# generated\nvalue,weight\n1.0,9\n2.0,9\n\n3.0 # trailing\n")
        np.testing.assert_array_equal(read_values(p), [1.0, 2.0, 3.0])

    def test_bad_rows_reported_with_line_numbers(self, tmp_path):
        p = tmp_path / "v.csv"
        p.write_text("1.0\n2.0\noops\n4.0\nnope\n")
        with pytest.raises(CliError) as exc:
            read_values(p)
        assert "3" in str(exc.value) and "5" in str(exc.value)

    def test_too_few_values(self, tmp_path):
        p = tmp_path / "v.csv"
        p.write_text("1.0\n")
        with pytest.raises(CliError):
            read_values(p)


class TestGenerate:
    def test_writes_values(self, tmp_path):
        out = tmp_path / "s.csv"
        rc = main(["generate", "pareto:alpha=3", "-n", "100", "--seed", "1",
                   "-o", str(out)])
        assert rc == 0
        vals = read_values(out)
        assert vals.size == 100 and vals.min() >= 1.0

    def test_require_mean_blocks_heavy_tails(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        rc = main(["generate", "pareto:alpha=1", "-n", "10", "-o", str(out),
                   "--require-mean"])
        assert rc == 1
        assert "mean" in capsys.readouterr().err

    def test_round_trips_through_read_values(self, tmp_path):
        out = tmp_path / "s.csv"
        main(["generate", "gpd:xi=-0.5,beta=1", "-n", "64", "-o", str(out)])
        from meplot import SortedSample, gpd_model, sample

        expect = sample(gpd_model(-0.5, 1.0), 64, seed=0).values
        got = SortedSample(read_values(out)).values
        np.testing.assert_array_equal(got, expect)


class TestMeplotCommand:
    def make_data(self, tmp_path, spec="pareto:alpha=3", n=500):
        path = tmp_path / "data.csv"
        main(["generate", spec, "-n", str(n), "-o", str(path)])
        return path

    def test_plain_meplot_csv(self, tmp_path):
        data = self.make_data(tmp_path)
        assert main(["meplot", str(data)]) == 0
        out = tmp_path / "data.meplot.csv"
        assert out.exists()
        lines = out.read_text().splitlines()
        assert lines[0] == "# regime=none"

    def test_scaled_set_and_svg(self, tmp_path):
        data = self.make_data(tmp_path)
        rc = main([
            "meplot", str(data), "--regime", "frechet", "--k", "40",
            "--overlay-xi", "0.3333333333333333", "--svg",
        ])
        assert rc == 0
        assert (tmp_path / "data.scaledset.csv").exists()
        svg = (tmp_path / "data.meplot.svg").read_text()
        assert svg.lstrip().startswith("<?xml")
        assert "hausdorff=" in svg  # reproducibility comment embeds the distance

    def test_error_paths_exit_one(self, tmp_path, capsys):
        missing = tmp_path / "nope.csv"
        assert main(["meplot", str(missing)]) == 1
        assert "error:" in capsys.readouterr().err


class TestClassifyCommand:
    def test_conclusive_exit_zero(self, tmp_path, capsys):
        data = tmp_path / "u.csv"
        main(["generate", "uniform", "-n", "20000", "-o", str(data)])
        rc = main(["classify", str(data)])
        out = capsys.readouterr().out
        assert rc == 0
        assert '"regime": "weibull"' in out

    def test_inconclusive_exit_two(self, tmp_path):
        data = tmp_path / "flat.csv"
        data.write_text("".join("5.0\n" for _ in range(100)))
        assert main(["classify", str(data)]) == 2

    def test_exponent_override(self, tmp_path):
        data = tmp_path / "p.csv"
        main(["generate", "pareto:alpha=3", "-n", "20000", "-o", str(data)])
        assert main(["classify", str(data), "--exponents", "0.4,0.5,0.6"]) == 0


class TestExperimentCommand:
    def write_config(self, tmp_path):
        cfg = tmp_path / "exp.toml"
        cfg.write_text(textwrap.dedent(SMALL_CONFIG))
        return cfg

    def test_writes_report_files(self, tmp_path):
        cfg = self.write_config(tmp_path)
        rc = main(["experiment", str(cfg), "--out-dir", str(tmp_path)])
        assert rc == 0
        for ext in ("csv", "json", "svg"):
            assert (tmp_path / f"exp.report.{ext}").exists()

    def test_no_figure_flag(self, tmp_path):
        cfg = self.write_config(tmp_path)
        rc = main(["experiment", str(cfg), "--out-dir", str(tmp_path), "--no-figure"])
        assert rc == 0
        assert not (tmp_path / "exp.report.svg").exists()

    def test_byte_identical_across_thread_counts(self, tmp_path):
        cfg = self.write_config(tmp_path)
        outputs = {}
        for threads in ("1", "4"):
            out_dir = tmp_path / f"t{threads}"
            env = dict(os.environ, MEPLOT_THREADS=threads)
            proc = subprocess.run(
                [sys.executable, "-m", "meplot.cli", "experiment", str(cfg),
                 "--out-dir", str(out_dir), "--no-figure"],
                env=env, capture_output=True, text=True,
            )
            assert proc.returncode == 0, proc.stderr
            outputs[threads] = (
                (out_dir / "exp.report.csv").read_bytes(),
                (out_dir / "exp.report.json").read_bytes(),
            )
        assert outputs["1"] == outputs["4"]

    def test_invalid_config_exit_one(self, tmp_path, capsys):
        cfg = tmp_path / "bad.toml"
        cfg.write_text('model = "pareto:alpha=3"\n')
        assert main(["experiment", str(cfg)]) == 1
        assert "error:" in capsys.readouterr().err


class TestSelftest:
    def test_selftest_passes(self, capsys):
        assert main(["selftest"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out and "PASS" in out
