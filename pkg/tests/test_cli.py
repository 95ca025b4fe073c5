"""CLI: subcommands, exit codes, output formats, thin-client mode."""

import json
import os
import subprocess
import sys

from facons_kit.cli import main

DATA = os.path.join(os.path.dirname(__file__), "data")
MONOMIAL3 = os.path.join(DATA, "example_monomial3.map")
CUSP = os.path.join(DATA, "cusp.map")
TWO_PLANES = os.path.join(DATA, "two_planes.map")


def run_main(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


class TestExitCodes:
    def test_clean_analyze(self, capsys):
        code, out, err = run_main(["analyze", CUSP], capsys)
        assert code == 0
        body = json.loads(out)
        assert body["schema"] == "facons-kit/1"
        assert len(body["strata"]) == 2

    def test_malformed_file(self, tmp_path, capsys):
        bad = tmp_path / "bad.map"
        bad.write_text("vars: x\nmap:\n  y + ")
        code, out, err = run_main(["analyze", str(bad)], capsys)
        assert code == 2
        assert "error:" in err

    def test_missing_file(self, capsys):
        code, out, err = run_main(["analyze", "/nonexistent/nowhere.map"], capsys)
        assert code == 2

    def test_non_dominant(self, tmp_path, capsys):
        f = tmp_path / "flat.map"
        f.write_text("vars: x y\nmap:\n  x\n  x")
        code, out, err = run_main(["analyze", str(f)], capsys)
        assert code == 2
        assert "dominant" in err

    def test_resource_limit(self, capsys, monkeypatch):
        monkeypatch.setenv("FACONS_RESOURCE_BUDGET", "3")
        code, out, err = run_main(["analyze", MONOMIAL3], capsys)
        assert code == 3
        assert "budget" in err

    def test_bad_weight_box(self, capsys):
        code, out, err = run_main(["analyze", CUSP, "--weight-box", "0"], capsys)
        assert code == 2


class TestFormats:
    def test_dot_output(self, capsys):
        code, out, _ = run_main(["analyze", CUSP, "--format", "dot"], capsys)
        assert code == 0
        assert out.startswith("digraph stratification {")
        assert out.count("->") == 1
        assert out.count("[label=") == 2

    def test_dot_monomial_has_seven_nodes_nine_edges(self, capsys):
        code, out, _ = run_main(["analyze", MONOMIAL3, "--format", "dot"], capsys)
        assert code == 0
        assert out.count("[label=") == 7
        assert out.count("->") == 9

    def test_vacuous_tube_verify_on_proper_map(self, tmp_path, capsys):
        f = tmp_path / "identity.map"
        f.write_text("vars: x1 x2\nmap:\n  x1\n  x2\n")
        code, out, _ = run_main(["tube-verify", str(f)], capsys)
        assert code == 0
        body = json.loads(out)
        assert body["pairs"] == [] and body["violations"] == []

    def test_pair_without_template_is_skipped_with_warning(self, capsys, monkeypatch):
        # a pair the verifier cannot build templates for is skipped and
        # flagged; the run still exits 0
        import facons_kit.report as report_mod
        from facons_kit.tubes import PreconditionError

        def refuse(*args, **kwargs):
            raise PreconditionError("missing ray templates for the facon pair")

        monkeypatch.setattr(report_mod, "verify_thom_mather", refuse)
        code, out, err = run_main(["tube-verify", CUSP], capsys)
        assert code == 0
        body = json.loads(out)
        assert body["pairs"] == []
        assert body["skipped"] and "missing ray templates" in body["skipped"][0]["reason"]
        assert "warning: skipped" in err

    def test_text_output(self, capsys):
        code, out, _ = run_main(["analyze", CUSP, "--format", "text"], capsys)
        assert code == 0
        assert "asymptotic set components" in out

    def test_asymptotic_set_subcommand(self, capsys):
        code, out, _ = run_main(["asymptotic-set", CUSP], capsys)
        assert code == 0
        assert json.loads(out)["asymptotic_set"]["components"] == ["a1^3 - a2^2"]

    def test_facons_subcommand(self, capsys):
        code, out, _ = run_main(["facons", CUSP], capsys)
        assert code == 0
        assert json.loads(out)["partition"][0]["facons"] == ["(2)[1]"]

    def test_tube_verify_subcommand(self, capsys):
        code, out, _ = run_main(["tube-verify", CUSP, "--samples", "4"], capsys)
        assert code == 0
        body = json.loads(out)
        assert body["violations"] == []
        assert body["coverage"]["covered"] == 20


class TestDeterminism:
    def test_byte_identical_json_across_processes(self):
        # separate interpreters with different hash seeds
        outs = []
        for seed in ("11", "223"):
            env = dict(os.environ, PYTHONHASHSEED=seed)
            r = subprocess.run(
                [sys.executable, "-m", "facons_kit.cli", "analyze", CUSP],
                capture_output=True, env=env, cwd="/root/pkg",
            )
            assert r.returncode == 0, r.stderr.decode()
            outs.append(r.stdout)
        assert outs[0] == outs[1]


class TestThinClient:
    def test_server_mode_round_trip(self, capsys, monkeypatch):
        # route the CLI's HTTP call into the in-process service
        from fastapi.testclient import TestClient

        from facons_kit.service import app

        test_client = TestClient(app)

        def fake_post(url, json=None, timeout=None):
            path = url[url.index("/", len("http://")):]
            return test_client.post(path, json=json)

        import httpx
        monkeypatch.setattr(httpx, "post", fake_post)
        code, out, _ = run_main(
            ["analyze", CUSP, "--server", "http://svc.example"], capsys)
        assert code == 0
        body = json.loads(out)
        assert len(body["strata"]) == 2

    def test_server_mode_input_error(self, capsys, monkeypatch, tmp_path):
        from fastapi.testclient import TestClient

        from facons_kit.service import app

        test_client = TestClient(app)

        def fake_post(url, json=None, timeout=None):
            path = url[url.index("/", len("http://")):]
            return test_client.post(path, json=json)

        import httpx
        monkeypatch.setattr(httpx, "post", fake_post)
        bad = tmp_path / "bad.map"
        bad.write_text("vars: x\nmap:\n  q")
        code, out, err = run_main(
            ["analyze", str(bad), "--server", "http://svc.example"], capsys)
        assert code == 2
