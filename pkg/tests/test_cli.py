"""End-to-end tests of the command-line interface, run in process."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from icsphere import cli


def run(argv, capsys):
    code = cli.main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


class TestMoments:
    def test_two_assets(self, capsys):
        code, out, _ = run(
            ["moments", "--mu", "0.5,0", "--sigma", "1.0", "--rho", "0.0"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["n"] == 2
        assert payload["summary"]["mrl"] == pytest.approx(
            0.2763263901682369, abs=1e-12
        )
        assert payload["concentration"] == pytest.approx(
            0.25 * math.sqrt(2.0), rel=1e-12
        )

    def test_theta_fields(self, capsys):
        code, out, _ = run(
            ["moments", "--mu", "1,2,4", "--sigma", "0.5", "--rho", "0.1",
             "--theta", "1,0,0"],
            capsys,
        )
        assert code == 0
        payload = json.loads(out)
        assert set(payload) >= {"theta", "expectation", "variance", "summary"}
        assert payload["variance"] >= 0.0
        assert abs(payload["expectation"]) <= payload["summary"]["mrl"] + 1e-12

    def test_output_dir_writes_artifacts(self, tmp_path, capsys):
        out_dir = tmp_path / "mom"
        code, out, _ = run(
            ["moments", "--mu", "1,2,4", "--sigma", "1.0", "--rho", "0.0",
             "--output-dir", str(out_dir)],
            capsys,
        )
        assert code == 0
        stored = (out_dir / "moments.json").read_text()
        assert stored == out
        manifest = read_json(out_dir / "manifest.json")
        assert manifest["command"] == "moments"
        assert "moments.json" in manifest["artifacts"]

    def test_constant_mean_is_degenerate(self, capsys):
        code, _, err = run(
            ["moments", "--mu", "1,1,1", "--sigma", "1.0", "--rho", "0.0"],
            capsys,
        )
        assert code == 1
        assert "degenerate" in err.lower()

    def test_invalid_rho(self, capsys):
        code, _, _ = run(
            ["moments", "--mu", "1,2", "--sigma", "1.0", "--rho", "1.2"],
            capsys,
        )
        assert code == 2

    def test_malformed_mu(self, capsys):
        code, _, _ = run(
            ["moments", "--mu", "a,b", "--sigma", "1.0", "--rho", "0.0"],
            capsys,
        )
        assert code == 2

    def test_mu_needs_two_components(self, capsys):
        code, _, _ = run(
            ["moments", "--mu", "1", "--sigma", "1.0", "--rho", "0.0"],
            capsys,
        )
        assert code == 2

    def test_mu_from_file(self, tmp_path, capsys):
        vec = tmp_path / "mu.json"
        vec.write_text("[1.0, 2.0, 4.0]")
        code, out, _ = run(
            ["moments", "--mu", f"@{vec}", "--sigma", "1.0", "--rho", "0.0"],
            capsys,
        )
        assert code == 0
        assert json.loads(out)["n"] == 3


class TestArgumentHandling:
    def test_no_command(self, capsys):
        assert run([], capsys)[0] == 2

    def test_unknown_flag(self, capsys):
        assert run(["moments", "--what"], capsys)[0] == 2

    def test_version(self, capsys):
        code, out, _ = run(["--version"], capsys)
        assert code == 0
        assert out.strip() == cli.__version__


class TestSimulateMrlCheck:
    def test_closed_form_and_bracket(self, tmp_path, capsys):
        out_dir = tmp_path / "mrl"
        code, out, _ = run(
            ["simulate", "mrl-check", "--count", "30000",
             "--output-dir", str(out_dir)],
            capsys,
        )
        assert code == 0
        payload = read_json(out_dir / "mrl_check.json")
        assert payload["rounded"]["argument"] == pytest.approx(0.1288)
        assert payload["closed_form_mrl"] == pytest.approx(0.0417, abs=5e-5)
        assert payload["bracket"] == [0.039, 0.044]
        assert "closed-form 0.0417" in out

    def test_deterministic_artifacts(self, tmp_path, capsys):
        dirs = [tmp_path / "a", tmp_path / "b"]
        for d in dirs:
            code, _, _ = run(
                ["simulate", "mrl-check", "--count", "5000", "--seed", "7",
                 "--output-dir", str(d)],
                capsys,
            )
            assert code == 0
        for name in ("mrl_check.json", "manifest.json"):
            assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()

    def test_env_seed_used(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv(cli.SEED_ENV_VAR, "4242")
        out_dir = tmp_path / "env"
        code, _, _ = run(
            ["simulate", "mrl-check", "--count", "2000",
             "--output-dir", str(out_dir)],
            capsys,
        )
        assert code == 0
        assert read_json(out_dir / "manifest.json")["seed"] == 4242

    def test_env_seed_invalid(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv(cli.SEED_ENV_VAR, "not-a-seed")
        code, _, _ = run(
            ["simulate", "mrl-check", "--count", "2000",
             "--output-dir", str(tmp_path / "x")],
            capsys,
        )
        assert code == 2

    def test_explicit_seed_beats_env(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv(cli.SEED_ENV_VAR, "4242")
        out_dir = tmp_path / "flag"
        code, _, _ = run(
            ["simulate", "mrl-check", "--count", "2000", "--seed", "9",
             "--output-dir", str(out_dir)],
            capsys,
        )
        assert code == 0
        assert read_json(out_dir / "manifest.json")["seed"] == 9


class TestSimulateIcPdf:
    def test_chi_mu_artifacts(self, tmp_path, capsys):
        out_dir = tmp_path / "pdf"
        code, out, _ = run(
            ["simulate", "ic-pdf", "--mode", "chi_mu", "--count", "400",
             "--output-dir", str(out_dir)],
            capsys,
        )
        assert code == 0
        lines = (out_dir / "ic_pdf_density.csv").read_text().splitlines()
        assert lines[0] == "t,density"
        assert len(lines) == 513
        summary = read_json(out_dir / "ic_pdf_summary.json")
        assert summary["count"] == 400
        assert summary["bandwidth"] > 0.0
        assert -1.0 <= summary["min"] <= summary["max"] <= 1.0
        assert "ic-pdf: 400 projections" in out

    def test_sample_md_mode(self, tmp_path, capsys):
        code, _, _ = run(
            ["simulate", "ic-pdf", "--mode", "sample_md", "--count", "400",
             "--variant", "hetero", "--output-dir", str(tmp_path / "h")],
            capsys,
        )
        assert code == 0

    def test_rejects_bad_mode(self, capsys):
        assert run(
            ["simulate", "ic-pdf", "--mode", "nope", "--count", "10"],
            capsys,
        )[0] == 2


class TestSimulateMdPerturb:
    def test_csv_structure(self, tmp_path, capsys):
        out_dir = tmp_path / "md"
        code, _, _ = run(
            ["simulate", "md-perturb", "--axis", "mu1", "--factors", "1,2",
             "--count", "400", "--output-dir", str(out_dir)],
            capsys,
        )
        assert code == 0
        lines = (out_dir / "md_perturb.csv").read_text().splitlines()
        header = lines[0].split(",")
        assert header[:2] == ["factor", "mrl"]
        assert header[-1] == "angle_to_base_deg"
        assert len(lines) == 3
        first = lines[1].split(",")
        assert float(first[0]) == 1.0
        n = len(header) - 3
        md = np.array([float(v) for v in first[2:2 + n]])
        assert abs(np.linalg.norm(md) - 1.0) < 1e-9
        assert abs(md.sum()) < 1e-9

    def test_sigma_axis(self, tmp_path, capsys):
        code, _, _ = run(
            ["simulate", "md-perturb", "--axis", "sigma1", "--factors",
             "0.5,1", "--count", "400", "--output-dir", str(tmp_path / "s")],
            capsys,
        )
        assert code == 0


class TestEmpirical:
    def test_yearly_pipeline(self, five_year_panel_csv, tmp_path, capsys):
        out_dir = tmp_path / "emp"
        code, out, _ = run(
            ["empirical", "--input", five_year_panel_csv,
             "--windows", "yearly", "--rolling", "20",
             "--output-dir", str(out_dir)],
            capsys,
        )
        assert code == 0
        summary = read_json(out_dir / "empirical_summary.json")
        assert summary["windows"] == [
            "2014", "2015", "2016", "2017", "2018", "full"
        ]
        for label in summary["windows"]:
            assert (out_dir / f"window_{label}.json").exists()
            assert (out_dir / f"scatter_spectrum_{label}.csv").exists()
            assert (out_dir / f"projected_{label}.csv").exists()
        full = read_json(out_dir / "window_full.json")
        assert full["projected_stats"]["mean"] == pytest.approx(
            full["mrl"], abs=1e-12
        )
        assert sum(full["scatter_eigenvalues"]) == pytest.approx(1.0, abs=1e-9)
        rolling = (out_dir / "rolling.csv").read_text().splitlines()
        assert rolling[0] == "date,mrl,cssd"
        assert len(rolling) - 1 == summary["rows"] - 19
        corr = read_json(out_dir / "correlations.json")
        assert abs(corr["mean_corr_x"]) < abs(corr["mean_corr_z"]) / 5.0
        assert "6 windows" in out

    def test_range_window(self, five_year_panel_csv, tmp_path, capsys):
        out_dir = tmp_path / "rng"
        code, _, _ = run(
            ["empirical", "--input", five_year_panel_csv,
             "--windows", "2015-01-01:2015-06-30",
             "--output-dir", str(out_dir)],
            capsys,
        )
        assert code == 0
        label = "2015-01-01_2015-06-30"
        report = read_json(out_dir / f"window_{label}.json")
        assert report["start"] >= "2015-01-01"
        assert report["end"] <= "2015-06-30"

    def test_iota_projection(self, five_year_panel_csv, tmp_path, capsys):
        code, _, _ = run(
            ["empirical", "--input", five_year_panel_csv,
             "--iota", "1,-1,0,0,0,0,0,0,0,0",
             "--output-dir", str(tmp_path / "iota")],
            capsys,
        )
        assert code == 0

    def test_iota_dimension_mismatch(self, five_year_panel_csv, tmp_path, capsys):
        code, _, _ = run(
            ["empirical", "--input", five_year_panel_csv,
             "--iota", "1,-1", "--output-dir", str(tmp_path / "bad")],
            capsys,
        )
        assert code == 2

    def test_oversized_rolling_window(self, five_year_panel_csv, tmp_path, capsys):
        code, _, _ = run(
            ["empirical", "--input", five_year_panel_csv,
             "--rolling", "5000", "--output-dir", str(tmp_path / "r")],
            capsys,
        )
        assert code == 2

    def test_constant_panel_is_degenerate(self, tmp_path, capsys):
        path = tmp_path / "flat.csv"
        path.write_text(
            "date,A,B,C\n2020-01-02,0.01,0.01,0.01\n2020-01-03,0.02,0.02,0.02\n"
        )
        code, _, _ = run(
            ["empirical", "--input", str(path),
             "--output-dir", str(tmp_path / "out")],
            capsys,
        )
        assert code == 1

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run(
            ["empirical", "--input", str(tmp_path / "nope.csv"),
             "--output-dir", str(tmp_path / "o")],
            capsys,
        )
        assert code == 2
        assert "cannot read panel" in err


class TestOracle:
    def test_specfun_suite(self, capsys):
        code, out, _ = run(["oracle", "--suite", "specfun"], capsys)
        assert code == 0
        lines = [l for l in out.splitlines() if l]
        assert len(lines) == 4
        assert all(l.startswith("ok  ") for l in lines)

    def test_optimize_suite(self, capsys):
        code, out, _ = run(["oracle", "--suite", "optimize"], capsys)
        assert code == 0
        assert "optimize.homoscedastic_suite" in out

    def test_cov_suite_small_count(self, tmp_path, capsys):
        out_dir = tmp_path / "orc"
        code, out, _ = run(
            ["oracle", "--suite", "cov", "--count", "20000",
             "--output-dir", str(out_dir)],
            capsys,
        )
        assert code == 0
        report = read_json(out_dir / "oracle_report.json")
        assert all(c["ok"] for c in report["checks"])
        assert {c["name"] for c in report["checks"]} == {
            "cov.canonical_n3", "cov.canonical_n5", "cov.canonical_n9"
        }


class TestRerun:
    def test_bit_identical_reexecution(self, tmp_path, capsys):
        first = tmp_path / "first"
        code, _, _ = run(
            ["simulate", "mrl-check", "--count", "4000", "--seed", "11",
             "--output-dir", str(first)],
            capsys,
        )
        assert code == 0
        second = tmp_path / "second"
        code, _, _ = run(
            ["rerun", "--manifest", str(first / "manifest.json"),
             "--output-dir", str(second)],
            capsys,
        )
        assert code == 0
        for name in ("mrl_check.json", "manifest.json"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_rerun_empirical(self, five_year_panel_csv, tmp_path, capsys):
        first = tmp_path / "e1"
        code, _, _ = run(
            ["empirical", "--input", five_year_panel_csv,
             "--output-dir", str(first)],
            capsys,
        )
        assert code == 0
        second = tmp_path / "e2"
        code, _, _ = run(
            ["rerun", "--manifest", str(first / "manifest.json"),
             "--output-dir", str(second)],
            capsys,
        )
        assert code == 0
        manifest = read_json(first / "manifest.json")
        for name in manifest["artifacts"]:
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_unusable_manifest(self, tmp_path, capsys):
        bad = tmp_path / "m.json"
        bad.write_text("{}")
        assert run(["rerun", "--manifest", str(bad)], capsys)[0] == 2
        assert run(
            ["rerun", "--manifest", str(tmp_path / "missing.json")], capsys
        )[0] == 2


class TestModuleEntryPoint:
    def test_python_dash_m(self):
        proc = subprocess.run(
            [sys.executable, "-m", "icsphere", "--version"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert proc.stdout.strip() == cli.__version__
