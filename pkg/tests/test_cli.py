"""Command-line interface: subcommands, config precedence, reproducibility."""

import pytest

from cusense.cli import main


def read(path):
    return path.read_text()


class TestSimulate:
    def test_writes_samples_and_manifest(self, tmp_path, capsys):
        rc = main(["simulate", "--seed", "7", "--window", "50", "--tau", "25",
                   "--out", str(tmp_path)])
        assert rc == 0
        samples = read(tmp_path / "samples.csv").splitlines()
        assert samples[0] == "index,sample"
        assert len(samples) == 51
        manifest = read(tmp_path / "manifest.txt")
        assert "seed = 7" in manifest
        assert "command = simulate" in manifest

    def test_deterministic_given_seed(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            main(["simulate", "--seed", "3", "--out", str(out)])
        assert read(a / "samples.csv") == read(b / "samples.csv")
        assert read(a / "manifest.txt") == read(b / "manifest.txt")

    def test_no_change_window_variance(self, tmp_path):
        main(["simulate", "--seed", "11", "--window", "100000", "--tau", "none",
              "--out", str(tmp_path)])
        rows = read(tmp_path / "samples.csv").splitlines()[1:]
        values = [float(r.split(",")[1]) for r in rows]
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        assert abs(var - 1.0) < 0.02

    def test_generated_seed_is_printed(self, tmp_path, capsys):
        main(["simulate", "--out", str(tmp_path), "--window", "10"])
        assert "seed = " in capsys.readouterr().out


class TestDetect:
    def _simulated(self, tmp_path, seed="7"):
        src = tmp_path / "sim"
        main(["simulate", "--seed", seed, "--out", str(src)])
        return src / "samples.csv"

    def test_trace_and_outcome(self, tmp_path, capsys):
        sample_file = self._simulated(tmp_path)
        out = tmp_path / "det"
        rc = main(["detect", "--input", str(sample_file), "--lambda", "8",
                   "--tau", "100", "--out", str(out)])
        assert rc == 0
        printed = capsys.readouterr().out
        assert "outcome:" in printed and "stop_index:" in printed
        trace = read(out / "trace.csv").splitlines()
        assert trace[0] == "index,sample,increment,z,g,crossed"
        assert len(trace) == 201

    def test_same_file_twice_byte_identical(self, tmp_path):
        sample_file = self._simulated(tmp_path)
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            main(["detect", "--input", str(sample_file), "--lambda", "8",
                  "--tau", "100", "--out", str(out)])
        assert read(a / "trace.csv") == read(b / "trace.csv")
        assert read(a / "manifest.txt") == read(b / "manifest.txt")

    def test_requires_lambda(self, tmp_path, capsys):
        sample_file = self._simulated(tmp_path)
        rc = main(["detect", "--input", str(sample_file), "--out",
                   str(tmp_path / "x")])
        assert rc == 2
        assert "lambda" in capsys.readouterr().err

    def test_empty_input_rejected(self, tmp_path):
        empty = tmp_path / "empty.csv"
        empty.write_text("")
        with pytest.raises(SystemExit):
            main(["detect", "--input", str(empty), "--lambda", "2",
                  "--out", str(tmp_path / "x")])
        assert not (tmp_path / "x" / "trace.csv").exists()

    def test_malformed_line_reports_line_number(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("0.1\n0.2\nnot-a-number\n")
        with pytest.raises(SystemExit) as info:
            main(["detect", "--input", str(bad), "--lambda", "2",
                  "--out", str(tmp_path / "x")])
        assert ":3:" in str(info.value)

    def test_plain_one_per_line_input(self, tmp_path, capsys):
        plain = tmp_path / "plain.txt"
        plain.write_text("\n".join(str(0.1 * i) for i in range(20)) + "\n")
        rc = main(["detect", "--input", str(plain), "--lambda", "2",
                   "--tau", "5", "--out", str(tmp_path / "x")])
        assert rc == 0


class TestRoc:
    def test_single_threshold_single_row(self, tmp_path):
        rc = main(["roc", "--lambda", "8", "--trials", "200", "--seed", "5",
                   "--window", "120", "--tau", "60", "--horizon", "100",
                   "--out", str(tmp_path)])
        assert rc == 0
        for name in ("analytic.csv", "empirical.csv", "comparison.csv"):
            lines = read(tmp_path / name).splitlines()
            assert len(lines) == 2, name
        assert "thresholds = 8.0" in read(tmp_path / "manifest.txt")

    def test_byte_identical_across_runs_and_workers(self, tmp_path, capsys):
        a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
        common = ["roc", "--trials", "400", "--seed", "99",
                  "--lambda-range", "0.5:20:6", "--window", "120",
                  "--tau", "60", "--horizon", "100"]
        main(common + ["--workers", "1", "--out", str(a)])
        main(common + ["--workers", "3", "--out", str(b)])
        main(common + ["--workers", "1", "--out", str(c)])
        for name in ("analytic.csv", "empirical.csv", "comparison.csv"):
            assert read(a / name) == read(b / name), name
        # identical configuration reruns reproduce everything, manifest included
        for name in ("analytic.csv", "empirical.csv", "comparison.csv",
                     "manifest.txt"):
            assert read(a / name) == read(c / name), name

    def test_prints_max_gap_line(self, tmp_path, capsys):
        main(["roc", "--lambda", "6", "--trials", "100", "--seed", "1",
              "--window", "60", "--tau", "30", "--horizon", "50",
              "--out", str(tmp_path)])
        out = capsys.readouterr().out
        assert "max |dPf|" in out

    def test_rejects_zero_trials(self, tmp_path):
        with pytest.raises(SystemExit) as info:
            main(["roc", "--trials", "0", "--out", str(tmp_path)])
        assert info.value.code == 2

    def test_paper_figures_grid(self, tmp_path):
        rc = main(["roc", "--paper-figures", "--trials", "60", "--seed", "2",
                   "--lambda-range", "1:20:4", "--out", str(tmp_path)])
        assert rc == 0
        summary = read(tmp_path / "summary.csv").splitlines()
        assert summary[0] == "scenario,max_pf_gap,max_pd_gap,passed"
        assert len(summary) == 10
        assert (tmp_path / "snr+0dB_L140" / "analytic.csv").exists()
        assert (tmp_path / "snr-3dB_L120" / "empirical.csv").exists()
        assert (tmp_path / "snr+3dB_L160" / "comparison.csv").exists()


class TestThreshold:
    def test_round_trip_output(self, tmp_path, capsys):
        rc = main(["threshold", "--target", "0.1", "--metric", "false-alarm",
                   "--seed", "4", "--out", str(tmp_path)])
        assert rc == 0
        out = capsys.readouterr().out
        lam = float(out.split("lambda = ")[1].splitlines()[0])
        achieved = float(out.split("analytic_false_alarm = ")[1].splitlines()[0])
        assert lam > 0
        assert abs(achieved - 0.1) <= 1e-3

    def test_validate_prints_empirical(self, tmp_path, capsys):
        rc = main(["threshold", "--target", "0.05", "--trials", "500",
                   "--seed", "4", "--validate", "--out", str(tmp_path)])
        assert rc == 0
        assert "empirical_false_alarm = " in capsys.readouterr().out

    def test_rejects_closed_interval_targets(self, tmp_path, capsys):
        rc = main(["threshold", "--target", "1.0", "--out", str(tmp_path)])
        assert rc == 2
        assert "(0, 1)" in capsys.readouterr().err

    def test_no_bracket_reports_achievable_range(self, tmp_path, capsys):
        rc = main(["threshold", "--target", "0.99", "--tau", "2",
                   "--window", "200", "--horizon", "42", "--out", str(tmp_path)])
        assert rc == 1
        assert "achievable" in capsys.readouterr().err


class TestConfigFile:
    def test_config_supplies_defaults_and_flags_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text(
            "# experiment defaults\n"
            "seed = 123\n"
            "window = 80\n"
            "tau = 40\n"
            "horizon = 60\n"
            "trials = 120\n"
            "lambda = 6.0\n"
        )
        out = tmp_path / "o1"
        main(["roc", "--config", str(cfg), "--out", str(out)])
        manifest = read(out / "manifest.txt")
        assert "seed = 123" in manifest
        assert "window = 80" in manifest
        # explicit flag wins over the config value
        out2 = tmp_path / "o2"
        main(["roc", "--config", str(cfg), "--seed", "9", "--out", str(out2)])
        assert "seed = 9" in read(out2 / "manifest.txt")

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("bogus = 1\n")
        with pytest.raises(SystemExit) as info:
            main(["roc", "--config", str(cfg), "--out", str(tmp_path / "x")])
        assert "unknown config key" in str(info.value)
