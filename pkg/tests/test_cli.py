import subprocess
import sys

import numpy as np
import pytest

from mimo_pilot.cli import SEED_ENV, emit_csv, main

TABLE_GOLDEN = """\
user,rho_pilot,group,objective
0,4016.372736729784,free,0.5099304325743789
1,1666.6666666666667,min,
2,4316.960596603551,free,
"""


class TestEmitCsv:
    def test_stdout_formatting(self, capsys):
        emit_csv(("a", "b", "c"), [(1, 0.5, None), (2, 1.0 / 3.0, "x")])
        out = capsys.readouterr().out
        assert out == "a,b,c\n1,0.5,\n2,0.3333333333333333,x\n"

    def test_file_output_lf_only(self, tmp_path):
        path = tmp_path / "out.csv"
        emit_csv(("a",), [(np.float64(0.1),), (np.int64(3),)], str(path))
        raw = path.read_bytes()
        assert raw == b"a\n0.1\n3\n"


class TestUsageErrors:
    def test_no_subcommand(self):
        with pytest.raises(SystemExit) as err:
            main([])
        assert err.value.code == 2

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit) as err:
            main(["explode"])
        assert err.value.code == 2

    def test_bad_gamma_list(self):
        with pytest.raises(SystemExit) as err:
            main(["figure", "fig3", "--gamma", "1,x"])
        assert err.value.code == 2

    def test_gamma_outside_reuse_set(self, capsys):
        assert main(["figure", "fig4a", "--gamma", "2"]) == 1
        assert "error:" in capsys.readouterr().err


class TestFixtureCheck:
    def test_ok_line(self, table_fixture_path, capsys):
        assert main(["fixture-check", str(table_fixture_path)]) == 0
        assert capsys.readouterr().out == "ok: cells=7 users=3\n"

    def test_corrupt_fixture(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("user_1,user_2\n0.5,oops\n")
        assert main(["fixture-check", str(bad)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, capsys):
        assert main(["fixture-check", str(tmp_path / "nope.csv")]) == 1
        assert "error:" in capsys.readouterr().err


class TestAllocate:
    def test_golden_table_output(self, table_fixture_path, capsys):
        assert main(["allocate", "--beta", str(table_fixture_path)]) == 0
        assert capsys.readouterr().out == TABLE_GOLDEN

    def test_check_passes_for_allocator(self, table_fixture_path, capsys):
        assert main(["allocate", "--beta", str(table_fixture_path),
                     "--check"]) == 0
        assert "PASS" in capsys.readouterr().err

    def test_check_flags_flat_split_as_suboptimal(self, table_fixture_path,
                                                  capsys):
        assert main(["allocate", "--beta", str(table_fixture_path),
                     "--scheme", "eppa", "--check"]) == 1
        assert "FAIL" in capsys.readouterr().err

    def test_reference_scheme_matches_itself(self, table_fixture_path, capsys):
        assert main(["allocate", "--beta", str(table_fixture_path),
                     "--scheme", "ref", "--check", "--method", "mmse"]) == 0
        assert "PASS" in capsys.readouterr().err

    def test_symmetric_fixture_gets_flat_split(self, tmp_path, capsys):
        path = tmp_path / "flat.csv"
        path.write_text("user_1,user_2\n" + "0.1,0.1\n" * 3)
        assert main(["allocate", "--beta", str(path)]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[1].startswith("0,5000.0,free")
        assert lines[2].startswith("1,5000.0,free")

    def test_config_user_count_must_match_fixture(self, table_fixture_path,
                                                  tmp_path, capsys):
        cfg = tmp_path / "sim.cfg"
        cfg.write_text("K = 4\nM = 64\nP_total = 4e3\nmu = 1.5\n")
        assert main(["allocate", "--beta", str(table_fixture_path),
                     "--config", str(cfg)]) == 1
        assert "K=4" in capsys.readouterr().err

    def test_infeasible_power_bound_rejected(self, table_fixture_path,
                                             tmp_path, capsys):
        cfg = tmp_path / "sim.cfg"
        cfg.write_text("K = 3\nM = 64\nP_total = 3e3\nmu = 5.0\n")
        assert main(["allocate", "--beta", str(table_fixture_path),
                     "--config", str(cfg)]) == 1
        assert "error:" in capsys.readouterr().err

    def test_random_drop_is_seed_deterministic(self, capsys):
        assert main(["allocate", "--seed", "9"]) == 0
        first = capsys.readouterr().out
        assert main(["allocate", "--seed", "9"]) == 0
        assert capsys.readouterr().out == first
        assert main(["allocate", "--seed", "10"]) == 0
        assert capsys.readouterr().out != first


class TestSeedResolution:
    def test_environment_seed_matches_flag(self, capsys, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "9")
        assert main(["allocate"]) == 0
        via_env = capsys.readouterr().out
        monkeypatch.delenv(SEED_ENV)
        assert main(["allocate", "--seed", "9"]) == 0
        assert capsys.readouterr().out == via_env

    def test_flag_overrides_environment(self, capsys, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "1234")
        assert main(["allocate", "--seed", "9"]) == 0
        with_flag = capsys.readouterr().out
        monkeypatch.delenv(SEED_ENV)
        assert main(["allocate", "--seed", "9"]) == 0
        assert capsys.readouterr().out == with_flag

    def test_bad_environment_seed(self, capsys, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "not-a-number")
        assert main(["allocate"]) == 1
        assert SEED_ENV in capsys.readouterr().err


class TestValidate:
    def test_check_passes_at_moderate_depth(self, tmp_path, capsys):
        out = tmp_path / "v.csv"
        assert main(["validate", "--trials", "1500", "--seed", "0",
                     "--out", str(out), "--check"]) == 0
        err = capsys.readouterr().err
        assert "PASS" in err and "FAIL" not in err
        header = out.read_text().splitlines()[0]
        assert header == ("experiment,metric,gamma,method,scheme,x,"
                          "mc_mean,mc_stderr,closed_form,asymptote")

    def test_rejects_degenerate_trial_count(self, capsys):
        assert main(["validate", "--trials", "1"]) == 1
        assert "error:" in capsys.readouterr().err


class TestFigure:
    def test_byte_identical_reruns(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["figure", "fig5b", "--gamma", "1", "--drops", "4", "--seed", "2"]
        assert main(args + ["--out", str(first)]) == 0
        assert main(args + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_unwritable_output(self, capsys):
        assert main(["figure", "fig5b", "--gamma", "1", "--drops", "2",
                     "--out", "/nonexistent/dir/out.csv"]) == 1
        assert "error:" in capsys.readouterr().err

    def test_missing_config_file(self, capsys):
        assert main(["figure", "fig5b", "--config", "/nonexistent/sim.cfg"]) == 1
        assert "error:" in capsys.readouterr().err


def test_console_script_entry_point(table_fixture_path):
    result = subprocess.run(
        [sys.executable, "-m", "mimo_pilot.cli", "fixture-check",
         str(table_fixture_path)],
        capture_output=True, text=True)
    assert result.returncode == 0
    assert result.stdout == "ok: cells=7 users=3\n"
