import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from psiwave import bloch, cli
from psiwave.resonance import residual_F
from psiwave.wavefield import PrimaryWave


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestResonance:
    def test_minus_branch_through_anchor(self, capsys):
        code, out, _ = run(["resonance", "--k", "2", "2", "--branch", "minus",
                            "--y-range", "-6", "-2", "5"], capsys)
        assert code == 0
        r = {float(row["y"]): float(row["x"]) for row in rows(out)}
        assert abs(r[-4.0]) <= 1e-12
        assert all(float(row["residual"]) <= 1e-12 for row in rows(out))

    def test_kink_gap(self, capsys):
        code, out, err = run(["resonance", "--k", "1", "3", "--branch", "minus",
                              "--y", "-3.01", "-3", "-2.99"], capsys)
        assert code == 0
        pts = {float(row["y"]): float(row["x"]) for row in rows(out)}
        assert set(pts) == {-3.01, -2.99}
        assert "kink" in err
        for y, x in pts.items():
            assert (x + 1) / 0.01 == pytest.approx(np.sqrt(2 / 3), rel=0.05)

    def test_residuals_rechecked(self, capsys):
        code, out, _ = run(["resonance", "--k", "1", "1", "--branch", "plus", "--y", "0.5", "2"], capsys)
        pw = PrimaryWave(1, 1)
        for row in rows(out):
            assert abs(residual_F(pw, float(row["x"]), float(row["y"]))) <= 1e-12

    def test_empty_range(self, tmp_path, capsys):
        out = tmp_path / "r.csv"
        code, _, err = run(["resonance", "--k", "1", "1", "--branch", "plus",
                            "--y-range", "1", "1", "0", "--out", str(out)], capsys)
        assert code == 1 and not out.exists()

    def test_wrong_branch_is_usage_error(self, capsys):
        assert run(["resonance", "--branch", "plus", "--y", "-1"], capsys)[0] == 1

    def test_missing_branch(self, capsys):
        assert run(["resonance", "--y", "1"], capsys)[0] == 1

    def test_csv_format(self, capsys):
        _, out, _ = run(["resonance", "--branch", "plus", "--y", "1"], capsys)
        y, x, res = out.splitlines()[1].split(",")
        assert y == "1" and float(x) == pytest.approx(0.19721632351026583, abs=1e-12)
        assert len(x.lstrip("0.")) >= 16
        assert "\r" not in out


class TestGrowth:
    def test_zero_eps(self, capsys):
        code, out, _ = run(["growth", "--k", "1", "1", "--y", "1", "--eps", "0", "--M", "8"], capsys)
        d = json.loads(out)
        assert code == 0 and d["residual"] <= 1e-12 and d["max_re"] <= 1e-12

    def test_report_keys(self, capsys):
        code, out, _ = run(["growth", "--y", "1", "--eps", "0.01", "--M", "16"], capsys)
        d = json.loads(out)
        assert list(d)[:8] == ["pw", "mu", "M", "eps", "max_re", "pred_max_re", "residual", "conv_gap"]
        for key in ("e_mu", "lambda_plus_pred", "lambda_minus_pred", "unstable_pair", "gap"):
            assert key in d
        # remainder is higher order in eps: a small fraction of the prediction
        assert d["residual"] <= 1e-2 * d["pred_max_re"]
        assert code == 0

    def test_parallel_mu(self, capsys):
        code, out, _ = run(["growth", "--mu", "0.3", "0.3", "--eps", "0.02", "--M", "4"], capsys)
        d = json.loads(out)
        assert code == 0 and d["stable_flag"] is True and d["e_mu"] == 0.0
        assert d["max_re"] <= 1e-12

    def test_near_exceptional_exit(self, capsys):
        code, out, err = run(["growth", "--y", "1", "--M", "8", "--gap-threshold", "0.5"], capsys)
        assert code == 3 and json.loads(out)["gap"]["near_exceptional"] is True

    def test_non_resonant_mu(self, capsys):
        assert run(["growth", "--mu", "0.3", "1.0"], capsys)[0] == 2

    def test_csv_output(self, capsys):
        code, out, _ = run(["growth", "--y", "1", "--M", "8", "--format", "csv"], capsys)
        assert code == 0 and out.splitlines()[0].startswith("mu1,mu2,M,eps,max_re")


class TestScan:
    def test_dedup_and_limits(self, capsys):
        code, out, err = run(["scan", "--branch", "plus", "--M", "8", "--eps", "0.01",
                              "--y", "0.01", "1", "0.01", "1000", "--jobs", "3"], capsys)
        r = rows(out)
        assert code == 0 and [float(x["y"]) for x in r] == [0.01, 1.0, 1000.0]
        assert float(r[0]["e_mu"]) / 0.01 == pytest.approx(0.125, rel=0.02)
        assert float(r[-1]["e_mu"]) == pytest.approx(0.077312, rel=1e-3)
        assert "limit 0.125" in err

    def test_failed_row(self, capsys):
        code, out, _ = run(["scan", "--k", "1", "3", "--branch", "minus", "--M", "8",
                            "--y", "-1", "-3"], capsys)
        r = rows(out)
        assert code == 2 and r[1]["e_mu"] == "nan" and r[0]["e_mu"] != "nan"

    def test_parallel_matches_serial(self, capsys):
        argv = ["scan", "--branch", "plus", "--M", "6", "--y", "0.3", "1", "3", "9"]
        _, a, _ = run(argv, capsys)
        _, b, _ = run(argv + ["--jobs", "4"], capsys)
        assert a == b


class TestValidate:
    def test_default_passes(self, capsys):
        code, out, _ = run(["validate"], capsys)
        assert code == 0 and out.count("PASS") == 9 and "FAIL" not in out

    def test_zero_eps_fast_path(self, capsys):
        code, out, _ = run(["validate", "--eps", "0", "--k", "2", "2"], capsys)
        assert code == 0

    def test_mutation_is_caught(self, capsys, monkeypatch):
        real = bloch.l1_block

        def corrupted(pw, mu, q1, eps=None, **kw):
            B = real(pw, mu, q1, eps, **kw).copy()
            B[0, 1] = -B[0, 1]
            return B

        monkeypatch.setattr(bloch, "l1_block", corrupted)
        code, out, _ = run(["validate"], capsys)
        failed = {line.split()[1].rstrip(":") for line in out.splitlines() if line.startswith("FAIL")}
        assert {"closed_forms_vs_bruteforce", "triad_identity"} <= failed
        assert code == 3 + len(failed)


class TestConfig:
    def test_file_and_override(self, tmp_path, capsys):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("# comment\nk = 1 3\nN = 2.0  # inline\neps = 0.02\nM = 8\nformat = json\n")
        args = cli.make_parser().parse_args(["growth", "--config", str(cfg), "--y", "1", "--M", "4"])
        c = cli.build_config(args)
        assert (c.m_hat, c.n_hat, c.N, c.eps, c.M, c.output_format) == (1, 3, 2.0, 0.02, 4, "json")

    def test_bad_file(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("colour = red\n")
        assert run(["validate", "--config", str(cfg)], capsys)[0] == 1
        assert run(["validate", "--config", str(tmp_path / "missing.cfg")], capsys)[0] == 1

    def test_invalid_values(self, capsys):
        assert run(["validate", "--k", "0", "1"], capsys)[0] == 1
        assert run(["validate", "--tol", "-1"], capsys)[0] == 1
        assert run(["nonsense"], capsys)[0] == 1


class TestDeterminism:
    def test_byte_identical(self, tmp_path):
        outs = []
        for i in range(2):
            p = tmp_path / f"g{i}.json"
            assert cli.main(["growth", "--y", "2", "--M", "8", "--seed", "5", "--out", str(p)]) == 0
            outs.append(p.read_bytes())
        assert outs[0] == outs[1]

    def test_module_entry_point(self):
        r = subprocess.run([sys.executable, "-m", "psiwave", "resonance", "--branch", "plus", "--y", "1"],
                           capture_output=True, text=True)
        assert r.returncode == 0 and r.stdout.startswith("y,x,residual\n")
