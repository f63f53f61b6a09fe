import csv
import json
import os

import numpy as np
import pytest

import rkheat.cli as cli
from rkheat.errors import NumericallySingular

SOLVE_ARGS = ["solve", "--example", "1", "--nu", "1e-2", "--nx", "4", "--nt", "4",
              "--eval-grid", "21x21"]


def read_csv(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class TestSolveCommand:
    def test_smoke(self, tmp_path, capsys):
        rc = cli.main(SOLVE_ARGS + ["--out", str(tmp_path)])
        assert rc == 0
        for name in ("solution.csv", "slices.csv", "report.json"):
            assert (tmp_path / name).exists()
        report = json.loads(capsys.readouterr().out)
        assert set(report) >= {"config", "norms", "cond", "residuals",
                               "j_cost", "seconds"}
        for v in report["norms"].values():
            assert np.isfinite(v) and v >= 0
        assert set(report["cond"]) == {"pre", "post"}
        assert set(report["residuals"]) == {"forward_max", "adjoint_max"}

    def test_solution_header_and_order(self, tmp_path):
        cli.main(SOLVE_ARGS + ["--out", str(tmp_path)])
        with open(tmp_path / "solution.csv", newline="") as f:
            header = f.readline().strip()
        assert header == "x,t,y_exact,y_approx,p_exact,p_approx,u_exact,u_approx,err_y,err_p"
        rows = read_csv(tmp_path / "solution.csv")
        assert len(rows) == 21 * 21
        # t-major: t constant along each block of 21 consecutive rows
        ts = [float(r["t"]) for r in rows]
        assert ts[:21] == [0.0] * 21

    def test_initial_slice_rows_zero(self, tmp_path):
        cli.main(SOLVE_ARGS + ["--out", str(tmp_path)])
        rows = [r for r in read_csv(tmp_path / "slices.csv") if float(r["t"]) == 0.0]
        assert len(rows) == 21
        assert all(float(r["y_approx"]) == 0.0 for r in rows)

    def test_prose_and_caption_slice_times(self, tmp_path):
        cli.main(SOLVE_ARGS + ["--out", str(tmp_path / "prose")])
        times = sorted({float(r["t"])
                        for r in read_csv(tmp_path / "prose" / "slices.csv")})
        assert times == [0.0, 0.1, 0.3, 0.5, 0.7, 0.9, 1.0]
        cli.main(SOLVE_ARGS + ["--slice-times", "caption",
                               "--out", str(tmp_path / "caption")])
        times = sorted({float(r["t"])
                        for r in read_csv(tmp_path / "caption" / "slices.csv")})
        assert times == [0.0, 0.2, 0.5, 0.7, 0.9, 1.0]

    def test_rerun_byte_identical(self, tmp_path):
        cli.main(SOLVE_ARGS + ["--out", str(tmp_path)])
        first = (tmp_path / "solution.csv").read_bytes()
        slices_first = (tmp_path / "slices.csv").read_bytes()
        cli.main(SOLVE_ARGS + ["--out", str(tmp_path)])
        assert (tmp_path / "solution.csv").read_bytes() == first
        assert (tmp_path / "slices.csv").read_bytes() == slices_first

    def test_seed_env_var_is_inert(self, tmp_path, monkeypatch):
        cli.main(SOLVE_ARGS + ["--out", str(tmp_path / "a")])
        monkeypatch.setenv("RKHS_SEED", "12345")
        cli.main(SOLVE_ARGS + ["--out", str(tmp_path / "b")])
        assert ((tmp_path / "a" / "solution.csv").read_bytes()
                == (tmp_path / "b" / "solution.csv").read_bytes())

    def test_picard_mode_reported(self, tmp_path, capsys):
        rc = cli.main(["solve", "--example", "1", "--nu", "0.1", "--nx", "4",
                       "--nt", "4", "--eval-grid", "11x11", "--mode", "picard",
                       "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert report["picard"]["converged"] is True

    def test_config_file_with_overrides(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment line\nexample = 2\nnu = 0.05\nnx = 3\nnt = 3\n"
                       "eval_grid = 11x11\n")
        rc = cli.main(["solve", "--config", str(cfg), "--nu", "0.1",
                       "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert report["config"]["example_id"] == 2
        assert report["config"]["nu"] == 0.1          # flag wins over file
        assert report["config"]["n_x"] == 3


class TestFailureModes:
    def test_unknown_flag_usage_error(self, capsys):
        rc = cli.main(["solve", "--frobnicate"])
        assert rc == 2
        err = json.loads(capsys.readouterr().err.strip())
        assert err["error"] == "UsageError"

    def test_bad_example_value(self, capsys):
        rc = cli.main(["solve", "--example", "7"])
        assert rc == 2
        assert json.loads(capsys.readouterr().err.strip())["error"] == "UsageError"

    def test_bad_config_key(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("frobnicate = 1\n")
        rc = cli.main(["solve", "--config", str(cfg)])
        assert rc == 2
        assert "frobnicate" in json.loads(capsys.readouterr().err.strip())["reason"]

    def test_single_point_sweep_rejected(self, capsys):
        rc = cli.main(["convergence", "--sweep", "4x4"])
        assert rc == 2
        assert json.loads(capsys.readouterr().err.strip())["error"] == "UsageError"

    def test_numerical_failure_exit_code(self, tmp_path, capsys, monkeypatch):
        def boom(system, config):
            raise NumericallySingular("synthetic failure")
        monkeypatch.setattr(cli, "solve", boom)
        rc = cli.main(SOLVE_ARGS + ["--out", str(tmp_path)])
        assert rc == 3
        err = json.loads(capsys.readouterr().err.strip())
        assert err["error"] == "NumericallySingular"
        assert err["reason"] == "synthetic failure"


class TestConvergenceCommand:
    def test_two_point_sweep(self, tmp_path, capsys):
        rc = cli.main(["convergence", "--example", "1", "--nu", "1e-2",
                       "--sweep", "4x4,8x8", "--eval-grid", "21x21",
                       "--out", str(tmp_path)])
        assert rc == 0
        with open(tmp_path / "convergence.csv", newline="") as f:
            header = f.readline().strip()
        assert header == "n_total,linf_y,l2_y,linf_p,l2_p,cond_estimate,seconds"
        rows = read_csv(tmp_path / "convergence.csv")
        assert [int(r["n_total"]) for r in rows] == [16, 64]
        assert float(rows[1]["l2_y"]) <= 1.05 * float(rows[0]["l2_y"])
        summary = json.loads(capsys.readouterr().out)
        assert summary["violations"] == 0


class TestCrosscheckCommand:
    def test_report_contents(self, tmp_path, capsys):
        rc = cli.main(["crosscheck", "--example", "1", "--nu", "1e-2",
                       "--nx", "8", "--nt", "8", "--oracle-grid", "24x24",
                       "--eval-grid", "21x21", "--out", str(tmp_path)])
        assert rc == 0
        report = json.loads(capsys.readouterr().out)
        assert report["oracle_grid"] == [24, 24]
        assert set(report["discrepancy"]) == {"y", "p"}
        assert report["discrepancy"]["y"] < 5e-3
        assert set(report["cond"]) == {"pre", "post"}
        assert (tmp_path / "crosscheck.json").exists()
