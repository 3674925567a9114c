"""Command-line behaviour: exit codes, CSV contracts, config files."""

import pytest

from acp.cli import main, write_csv


def _run(*argv) -> int:
    return main(list(argv))


def _read(path) -> bytes:
    with open(path, "rb") as fh:
        return fh.read()


class TestExitCodes:
    def test_unknown_subcommand(self, capsys):
        assert _run("frobnicate") == 2

    def test_unknown_flag(self, capsys):
        assert _run("bounds", "--no-such-flag", "1") == 2

    def test_bad_family_value(self, capsys):
        assert _run("bounds", "--family", "cauchy") == 2

    def test_unwritable_output(self, tmp_path, capsys):
        missing_dir = tmp_path / "does" / "not" / "exist" / "x.csv"
        code = _run("bounds", "--trials", "100", "--out", str(missing_dir))
        assert code == 1

    def test_invalid_domain_value_is_config_error(self, tmp_path, capsys):
        out = tmp_path / "b.csv"
        assert _run("bounds", "--i-total", "-5", "--out", str(out)) == 2

    def test_success(self, tmp_path, capsys):
        out = tmp_path / "b.csv"
        assert _run("bounds", "--trials", "200", "--out", str(out)) == 0
        assert out.exists()


class TestBoundsOutput:
    def test_report_row_matches_theory(self, tmp_path, capsys):
        out = tmp_path / "b.csv"
        assert _run("bounds", "--family", "exponential", "--i-total", "10",
                    "--trials", "2000", "--seed", "7", "--out", str(out)) == 0
        header, row = out.read_text().strip().split("\n")
        assert header == "lower,upper,empirical_mean_cost,n_trials,standard_error,within_bounds"
        cells = row.split(",")
        assert float(cells[0]) == pytest.approx(10.0)
        assert float(cells[1]) == pytest.approx(12.0)
        assert float(cells[2]) == pytest.approx(11.0, abs=3 * float(cells[4]))
        assert cells[5] == "true"

    def test_trial_dump(self, tmp_path, capsys):
        out, dump = tmp_path / "b.csv", tmp_path / "trials.csv"
        assert _run("bounds", "--trials", "150", "--out", str(out),
                    "--dump-trials", str(dump)) == 0
        lines = dump.read_text().strip().split("\n")
        assert lines[0] == "trial_id,n_steps,s_n,overshoot"
        assert len(lines) == 151


class TestDeterminism:
    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert _run("slope", "--noise", "0.1,1.0", "--trials", "20",
                        "--seed", "5", "--out", str(out)) == 0
        assert _read(a) == _read(b)
        assert _read(tmp_path / "a_summary.csv") == _read(tmp_path / "b_summary.csv")

    def test_workers_do_not_change_output(self, tmp_path, capsys):
        a, b = tmp_path / "w1.csv", tmp_path / "w2.csv"
        assert _run("bounds", "--trials", "300", "--seed", "3", "--out", str(a),
                    "--workers", "1") == 0
        assert _run("bounds", "--trials", "300", "--seed", "3", "--out", str(b),
                    "--workers", "4") == 0
        assert _read(a) == _read(b)


class TestConfigFile:
    def test_config_supplies_values(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("trials = 150\nseed = 9\n# comment\ni-total = 5\n")
        out = tmp_path / "o.csv"
        assert _run("bounds", "--config", str(cfg), "--out", str(out)) == 0
        row = out.read_text().strip().split("\n")[1].split(",")
        assert row[3] == "150"
        assert float(row[0]) == pytest.approx(5.0)

    def test_flag_wins_over_config(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("trials=150\n")
        out = tmp_path / "o.csv"
        assert _run("bounds", "--config", str(cfg), "--trials", "220", "--out", str(out)) == 0
        assert out.read_text().strip().split("\n")[1].split(",")[3] == "220"

    def test_unknown_key_is_config_error(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("bogus=1\n")
        assert _run("bounds", "--config", str(cfg)) == 2

    def test_missing_config_file(self, tmp_path, capsys):
        assert _run("bounds", "--config", str(tmp_path / "nope.cfg")) == 2


class TestCsvWriter:
    def test_empty_results_write_header_only(self, tmp_path):
        path = tmp_path / "empty.csv"
        write_csv(str(path), ["a", "b"], [])
        assert path.read_bytes() == b"a,b\n"

    def test_formats(self, tmp_path):
        path = tmp_path / "fmt.csv"
        write_csv(str(path), ["x"], [[1.5], [2], [True], ["txt"]])
        assert path.read_bytes() == b"x\n1.500000\n2\ntrue\ntxt\n"

    def test_lf_newlines_only(self, tmp_path):
        path = tmp_path / "nl.csv"
        write_csv(str(path), ["x"], [[1]])
        assert b"\r" not in path.read_bytes()


class TestHelp:
    @pytest.mark.parametrize("sub", ["bounds", "slope", "coloring", "estimate", "approx"])
    def test_help_lists_defaults(self, sub, capsys):
        assert _run(sub, "--help") == 0
        text = capsys.readouterr().out
        assert "default:" in text
        assert "--seed" in text
