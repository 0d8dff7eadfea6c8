import json

import pytest

from chiral_blocks.cli import run


def run_cli(capsys, *args):
    code = run(list(args))
    out = capsys.readouterr().out
    return code, out


class TestSpectrumCommand:
    def test_k0_levels(self, capsys):
        code, out = run_cli(capsys, "spectrum", "--k", "0", "--max-level", "4")
        assert code == 0
        report = json.loads(out)
        assert [r["lambda"] for r in report["rows"]] == [1, 4, 9, 16]
        assert [r["dim"] for r in report["rows"]] == [2, 2, 2, 2]
        assert report["all_pass"]

    def test_zero_levels_usage_error(self, capsys):
        code, _ = run_cli(capsys, "spectrum", "--k", "0", "--max-level", "0")
        assert code == 1

    def test_float_crosscheck_column(self, capsys):
        code, out = run_cli(capsys, "spectrum", "--k", "0", "--max-level", "2",
                            "--arithmetic", "exact-with-float-crosscheck")
        assert code == 0
        report = json.loads(out)
        assert all(r["gram_min_eig_float"] > 0 for r in report["rows"])

    def test_k1_levels(self, capsys):
        code, out = run_cli(capsys, "spectrum", "--k", "1", "--max-level", "3")
        assert code == 0
        report = json.loads(out)
        assert [r["dim"] for r in report["rows"]] == [20, 90, 252]
        assert [r["lambda"] for r in report["rows"]] == [9, 16, 25]

    def test_default_max_level_depends_on_k(self, capsys):
        code, out = run_cli(capsys, "spectrum", "--k", "0")
        assert code == 0
        assert json.loads(out)["max_level"] == 8


class TestSplitCommand:
    def test_k0(self, capsys):
        code, out = run_cli(capsys, "split", "--k", "0", "--max-level", "3")
        assert code == 0
        report = json.loads(out)
        assert all(r["dim_chiral"] == r["dim_antichiral"] == 1
                   for r in report["rows"])


class TestBlocksCommand:
    def test_k1_theorem(self, capsys):
        code, out = run_cli(capsys, "blocks", "--k", "1", "--lambda", "0",
                            "--max-level", "1", "--trunc", "3")
        assert code == 0
        report = json.loads(out)
        assert report["dim"] == 1 and report["dim_matches"]

    def test_k0_lambda1(self, capsys):
        code, out = run_cli(capsys, "blocks", "--k", "0", "--lambda", "1")
        assert code == 0
        assert json.loads(out)["dim"] == 0

    def test_k1_lambda1_precondition(self, capsys):
        code, _ = run_cli(capsys, "blocks", "--k", "1", "--lambda", "1")
        assert code == 1


class TestVerifyCommand:
    def test_stokes_small(self, capsys):
        code, out = run_cli(capsys, "verify", "--suite", "stokes", "--k", "0",
                            "--trials", "10", "--seed", "42")
        assert code == 0
        report = json.loads(out)
        assert report["rows"][0]["trials"] == 10
        assert report["failures"] == 0

    def test_unknown_suite(self, capsys):
        code, _ = run_cli(capsys, "verify", "--suite", "bogus")
        assert code == 1


class TestConfigAndOutputs:
    def test_config_file_with_flag_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nk = 0\nmax_level = 2\nseed = 7\n")
        code, out = run_cli(capsys, "spectrum", "--config", str(cfg),
                            "--max-level", "3")
        assert code == 0
        report = json.loads(out)
        assert report["max_level"] == 3       # flag overrides config
        assert len(report["rows"]) == 3

    def test_bad_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("nope = 1\n")
        code, _ = run_cli(capsys, "spectrum", "--config", str(cfg))
        assert code == 1

    def test_json_out_deterministic(self, tmp_path, capsys):
        out1 = tmp_path / "a.json"
        out2 = tmp_path / "b.json"
        assert run(["blocks", "--k", "0", "--lambda", "0", "--max-level", "2",
                    "--trunc", "3", "--out", str(out1)]) == 0
        assert run(["blocks", "--k", "0", "--lambda", "0", "--max-level", "2",
                    "--trunc", "3", "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_threads_do_not_change_bytes(self, tmp_path, capsys):
        out1 = tmp_path / "t1.json"
        out4 = tmp_path / "t4.json"
        base = ["verify", "--suite", "stokes", "--k", "0", "--trials", "12",
                "--seed", "5"]
        assert run(base + ["--threads", "1", "--out", str(out1)]) == 0
        assert run(base + ["--threads", "4", "--out", str(out4)]) == 0
        assert out1.read_bytes() == out4.read_bytes()

    def test_csv_export(self, tmp_path, capsys):
        out = tmp_path / "rows.csv"
        assert run(["spectrum", "--k", "0", "--max-level", "2",
                    "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "i,lambda,dim,dim_formula_ok,jtilde_square_ok"
        assert lines[1] == "1,1,2,true,true"
        assert len(lines) == 3

    def test_env_threads_default(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("CHIRAL_BLOCKS_THREADS", "3")
        code, out = run_cli(capsys, "verify", "--suite", "stokes", "--k", "0",
                            "--trials", "6")
        assert code == 0
