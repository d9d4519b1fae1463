"""CLI integration tests: subcommands, formats, exit codes, determinism."""

import json
import subprocess
import sys

import pytest

from wignerlab import cli
from wignerlab import reports

W16_TRAJ = "5,2,7,9,7,1,2,7,9,7,2,7,2,1,7,2,5"


def run_cli(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def body_of(text):
    """Output lines minus the manifest header."""
    return "\n".join(l for l in text.splitlines()
                     if not l.startswith("# manifest:"))


class TestWalk:
    def test_from_trajectory(self, capsys):
        code, out, _ = run_cli(
            ["walk", "from-trajectory", W16_TRAJ, "--format", "json"],
            capsys)
        assert code == 0
        rec = json.loads(body_of(out))
        assert rec["walk"] == "1,2,3,4,3,5,2,3,4,3,2,3,2,5,3,2,1"
        assert rec["theta_star"] == 4
        assert rec["max_exit_degree"] == 5
        assert rec["max_exit_letter"] == 3
        assert rec["strong_reduced"] == rec["weak_reduced"]

    def test_enumerate(self, capsys):
        code, out, _ = run_cli(["walk", "enumerate", "--s", "3"], capsys)
        assert code == 0
        lines = body_of(out).strip().splitlines()
        assert len(lines) == 1 + 16  # header + walks

    def test_enumerate_guardrail(self, capsys):
        code, _, err = run_cli(["walk", "enumerate", "--s", "9"], capsys)
        assert code == 3
        assert "refused" in err

    def test_bad_trajectory(self, capsys):
        code, _, err = run_cli(["walk", "from-trajectory", "1,x,3"], capsys)
        assert code == 2
        assert "error" in err


class TestCount:
    def test_multi_edge_closed_form(self, capsys):
        code, out, _ = run_cli(
            ["count", "multi-edge", "--l", "2", "--s-max", "12",
             "--check-closed-form"], capsys)
        assert code == 0
        lines = body_of(out).strip().splitlines()
        assert lines[0] == "s,l,value,closed_form,match"
        assert all(line.endswith(",true") for line in lines[1:])

    def test_catalan_csv(self, capsys):
        code, out, _ = run_cli(["count", "catalan", "--s-max", "5"], capsys)
        assert code == 0
        assert "5,42,42,true" in body_of(out)

    def test_missing_action(self, capsys):
        code, _, err = run_cli(["count"], capsys)
        assert code == 2


class TestOracle:
    def test_json_payload(self, capsys):
        code, out, _ = run_cli(
            ["oracle", "--n", "4", "--rho", "2", "--s", "2"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload == {"value_num": "9", "value_den": "32",
                           "method_agreement": True}

    def test_rational_rho(self, capsys):
        code, out, _ = run_cli(
            ["oracle", "--n", "3", "--rho", "3/2", "--s", "1",
             "--method", "walk"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["value_num"] == "1" and payload["value_den"] == "2"
        assert payload["method_agreement"] is None

    def test_budget_guardrail(self, capsys):
        code, _, err = run_cli(
            ["oracle", "--n", "9", "--rho", "2", "--s", "6",
             "--method", "trajectory"], capsys)
        assert code == 3
        assert "estimated work" in err

    def test_bad_rho(self, capsys):
        code, _, err = run_cli(
            ["oracle", "--n", "4", "--rho", "x", "--s", "1"], capsys)
        assert code == 2


class TestSim:
    def test_moments_csv(self, capsys, tmp_path):
        out_file = tmp_path / "m.csv"
        code, _, _ = run_cli(
            ["sim", "moments", "--n", "16", "--rho", "4", "--s", "1",
             "--samples", "5", "--seed", "3", "--out", str(out_file)],
            capsys)
        assert code == 0
        text = out_file.read_text()
        assert text.startswith("# manifest:")
        assert "s,mean,stderr,n_samples,min,max" in text

    def test_deterministic_body(self, capsys, tmp_path):
        args = ["sim", "moments", "--n", "16", "--rho", "4", "--s", "2",
                "--samples", "6", "--seed", "9"]
        f1, f2 = tmp_path / "a.csv", tmp_path / "b.csv"
        assert cli.main(args + ["--out", str(f1)]) == 0
        assert cli.main(args + ["--out", str(f2)]) == 0
        assert body_of(f1.read_text()) == body_of(f2.read_text())

    def test_edge_needs_rho_or_eps(self, capsys):
        code, _, err = run_cli(
            ["sim", "edge", "--n", "30", "--samples", "4"], capsys)
        assert code == 2

    def test_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"v": 0.5, "truncate": False}))
        code, out, _ = run_cli(
            ["sim", "moments", "--n", "8", "--rho", "2", "--s", "1",
             "--samples", "4", "--config", str(cfg)], capsys)
        assert code == 0

    def test_io_error(self, capsys):
        code, _, err = run_cli(
            ["sim", "moments", "--n", "8", "--rho", "2", "--s", "1",
             "--samples", "4", "--out", "/nonexistent/x.csv"], capsys)
        assert code == 4


class TestVerify:
    def test_cli_suite(self, capsys):
        code, out, err = run_cli(["verify", "cli", "--fast"], capsys)
        assert code == 0
        assert "0 fail" in err

    def test_unknown_suite(self, capsys):
        code, _, _ = run_cli(["verify", "bogus"], capsys)
        assert code == 2


class TestUsage:
    def test_no_subcommand(self, capsys):
        assert cli.main([]) == 2

    def test_unknown_subcommand(self, capsys):
        assert cli.main(["frobnicate"]) == 2

    def test_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "wignerlab.cli", "count", "catalan",
             "--s-max", "3"], capture_output=True, text=True)
        assert proc.returncode == 0
        assert "3,5,5,true" in proc.stdout


class TestReports:
    def test_fraction_serialization(self):
        from fractions import Fraction
        body = reports.render_csv_body([{"v": Fraction(1, 4), "ok": True}])
        assert body == "v,ok\n1/4,true\n"

    def test_json_fraction(self, capsys):
        from fractions import Fraction
        manifest = reports.RunManifest("test", {}).start()
        reports.emit_report([{"v": Fraction(1, 4)}], "json", None, manifest)
        out = capsys.readouterr().out
        assert '{"v": {"den": "4", "num": "1"}}' in out

    def test_empty_csv(self, capsys):
        manifest = reports.RunManifest("test", {}).start()
        reports.emit_report([], "csv", None, manifest)
        out = capsys.readouterr().out.splitlines()
        assert len(out) == 1 and out[0].startswith("# manifest:")
