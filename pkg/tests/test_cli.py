import json
import math
import xml.etree.ElementTree as ET

import pytest

from conecapture.cli import (EXIT_BAD_CONFIG, EXIT_OK, EXIT_SOLVER_FAILURE,
                             EXIT_VERIFY_FAILED, main)


def test_table_text_output(capsys):
    assert main(["table", "--max-n", "6", "--format", "text"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "2.25000000" in out
    assert "0.75000000" in out
    assert "13.62031915" in out


def test_table_json_round_trip(tmp_path):
    assert main(["table", "--max-n", "4", "--out", str(tmp_path)]) == EXIT_OK
    text = (tmp_path / "table.json").read_text()
    doc = json.loads(text)
    # canonical re-emission reproduces the file byte for byte
    again = json.dumps(doc, indent=2, sort_keys=True, default=str) + "\n"
    assert again == text
    assert doc["provenance"]["tool"] == "conecapture"
    assert len(doc["rows"]) == 3


def test_eigen_command(capsys):
    code = main(["eigen", "--n", "3", "--lam", "5.102", "--r0-delta", "3"])
    assert code == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["mu"] == pytest.approx(8.00087815, abs=1e-6)


def test_eigen_requires_exactly_one_radius(capsys):
    assert main(["eigen", "--n", "3", "--lam", "5.102"]) == EXIT_BAD_CONFIG
    code = main(["eigen", "--n", "3", "--lam", "5.102", "--r0", "2.0",
                 "--r0-delta", "3"])
    assert code == EXIT_BAD_CONFIG


def test_lambda_cr_command(capsys):
    assert main(["lambda-cr"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["lambda_critical"] == pytest.approx(5.101267527, abs=1e-6)
    assert abs(doc["defining_residual"]) <= 1e-8


def test_verify_g2_exit_codes(tmp_path):
    assert main(["verify-g2", "--out", str(tmp_path)]) == EXIT_OK
    doc = json.loads((tmp_path / "verify_g2.json").read_text())
    assert doc["passed"] is True
    assert main(["verify-g2", "--c", "0.1", "--out",
                 str(tmp_path)]) == EXIT_VERIFY_FAILED


def test_invalid_parameters_exit_code(capsys):
    # mu below the critical eigenvalue is an invalid configuration
    assert main(["verify-g2", "--mu", "4.0"]) == EXIT_BAD_CONFIG


def test_solver_failure_exit_code(tmp_path):
    # far too few paths for any usable tail window
    code = main(["mc", "--predators", "2", "--paths", "40", "--dt", "0.1",
                 "--t-max", "50", "--out", str(tmp_path), "--no-plot"])
    assert code == EXIT_SOLVER_FAILURE


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"max_n": 5, "bogus_key": 1}))
    code = main(["table", "--config", str(cfg)])
    assert code == EXIT_BAD_CONFIG
    assert "bogus_key" in capsys.readouterr().err


def test_config_file_supplies_defaults_and_flags_win(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"max_n": 3, "format": "text"}))
    assert main(["table", "--config", str(cfg)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.count("\n") == 4  # header x2 + rows n=2,3
    # explicit flag beats the file
    assert main(["table", "--config", str(cfg), "--max-n", "2",
                 "--format", "text"]) == EXIT_OK
    assert "n=3" not in capsys.readouterr().out


def test_env_var_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CONECAPTURE_OUT", str(tmp_path / "envout"))
    assert main(["table", "--max-n", "3"]) == EXIT_OK
    assert (tmp_path / "envout" / "table.json").exists()


def test_figures_are_valid_svg(tmp_path):
    assert main(["figures", "--out", str(tmp_path)]) == EXIT_OK
    for name in ("domains.svg", "overlay.svg", "sixth_triangle.svg"):
        path = tmp_path / name
        assert path.exists()
        root = ET.parse(path).getroot()
        assert root.tag.endswith("svg")
        assert len(list(root.iter())) > 10


def test_mc_writes_reports_and_figure(tmp_path):
    code = main(["mc", "--predators", "2", "--paths", "4000", "--dt", "0.1",
                 "--t-max", "200", "--seed", "3", "--out", str(tmp_path)])
    assert code == EXIT_OK
    assert (tmp_path / "mc_survival.csv").exists()
    assert (tmp_path / "mc_fit.json").exists()
    assert (tmp_path / "mc_survival.svg").exists()
    header = (tmp_path / "mc_survival.csv").read_text().splitlines()
    assert header[0].startswith("# tool: conecapture")
    doc = json.loads((tmp_path / "mc_fit.json").read_text())
    assert doc["predicted_exponent"] == pytest.approx(0.75, abs=1e-9)
    assert 0.4 <= doc["fit"]["a_hat"] <= 1.1


def test_sinc_csv_and_plot(tmp_path):
    code = main(["sinc", "--dims", "16", "--format", "csv", "--out",
                 str(tmp_path)])
    assert code == EXIT_OK
    lines = (tmp_path / "sinc.csv").read_text().splitlines()
    assert any(line.startswith("dim,") for line in lines)
    assert (tmp_path / "sinc_convergence.svg").exists()


def test_verdict_command(capsys):
    assert main(["verdict", "--n", "4"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["finite_expected_capture_time"] is True
    assert doc["chain"][-1]["value"] >= 1.00007318 - 1e-7
    assert main(["verdict", "--n", "3", "--format", "text"]) == EXIT_OK
    assert "INFINITE" in capsys.readouterr().out


def test_bad_usage_exits_two(capsys):
    assert main(["eigen"]) == 2  # missing required flags
    assert main(["nonsense"]) == 2
