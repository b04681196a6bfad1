import csv
import json

import pytest

from omitlab.cli import main


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def run(tmp_path, *args):
    out = tmp_path / "out"
    return main([*args, "--out", str(out)]), out


def test_steady(tmp_path, capsys):
    code, out = run(tmp_path, "steady", "--preset", "paper-double", "--kappa-ratio", "0.4")
    assert code == 0
    data = json.loads((out / "steady.json").read_text())
    assert data["params"]["topology"] == "double"
    assert data["steady_state"]["x_s"] == pytest.approx(1.4930526714355327743e-14, rel=1e-10)
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "steady" and manifest["seedless_deterministic"] is True


def test_spectrum_passive_eta_two_maxima(tmp_path):
    code, out = run(tmp_path, "spectrum", "--points", "201", "--svg")
    assert code == 0
    header, rows = read_csv(out / "spectrum.csv")
    assert header == ["swept", "t_p2", "eta", "arg_tp", "arg_A2", "stable"]
    eta = [float(r[2]) for r in rows]
    peaks = [i for i in range(1, len(eta) - 1) if eta[i - 1] < eta[i] > eta[i + 1]]
    assert len(peaks) == 2
    assert (out / "spectrum_eta.svg").read_text().startswith("<svg")


def test_rerun_is_byte_identical(tmp_path):
    code, out = run(tmp_path, "spectrum", "--points", "51", "--kappa-ratio", "1")
    first = (out / "spectrum.csv").read_bytes()
    manifest = json.loads((out / "manifest.json").read_text())
    assert main(manifest["argv"]) == code
    assert (out / "spectrum.csv").read_bytes() == first


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"topology": "double", "coupling_j": 6.43e6, "p_l": 5e-4}))
    code, out = run(tmp_path, "delay", "--config", str(cfg), "--p-l", "2e-4")
    assert code == 0
    data = json.loads((out / "delay.json").read_text())
    assert data["params"]["p_l"] == 2e-4 and data["params"]["topology"] == "double"
    assert data["converged"] is True


@pytest.mark.parametrize("args", [
    ["spectrum", "--probe-ratio", "0"],
    ["steady", "--config", "/nonexistent/cfg.json"],
    ["steady", "--p-l", "-1"],
    ["gain-sweep"],
    ["figure", "Fig9"],
])
def test_config_errors_exit_2(tmp_path, args):
    code, _ = run(tmp_path, *args)
    assert code == 2


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"kapa": 1.0}))
    assert run(tmp_path, "steady", "--config", str(cfg))[0] == 2


def test_figure_gain_sweep_singular_row(tmp_path):
    code, out = run(tmp_path, "figure", "Fig3b", "--points", "17")
    assert code == 3
    header, rows = read_csv(out / "Fig3b_gain_ratio.csv")
    assert header == ["swept", "t_p2", "eta", "stable"]
    assert rows[0][0] == "0" and rows[0][1] == "" and rows[0][2] == ""
    assert all(r[2] != "" for r in rows[1:])
    meta = json.loads((out / "Fig3b.meta.json").read_text())
    assert "gain_ratio" in meta


def test_figure_power_panel(tmp_path):
    code, out = run(tmp_path, "figure", "Fig4c", "--points", "20", "--svg")
    assert code == 0
    header, rows = read_csv(out / "Fig4c_kappa_ratio_1.csv")
    assert header == ["swept", "tau_g", "tau_g_prime", "stable", "converged"]
    assert len(rows) == 20
    assert (out / "Fig4c_tau_g.svg").exists()


def test_gain_sweep_command(tmp_path):
    code, out = run(tmp_path, "gain-sweep", "--preset", "paper-double",
                    "--ratio-min", "0.2", "--ratio-max", "1.2", "--points", "11")
    assert code == 0
    _, rows = read_csv(out / "gain_sweep.csv")
    assert len(rows) == 11


def test_power_sweep_command(tmp_path):
    code, out = run(tmp_path, "power-sweep", "--kappa-ratio", "1", "--points", "10")
    assert code == 0
    _, rows = read_csv(out / "power_sweep.csv")
    assert float(rows[0][0]) == pytest.approx(1e-6) and float(rows[-1][0]) == pytest.approx(2e-3)


def test_oracle_refuses_unstable(tmp_path):
    code, out = run(tmp_path, "oracle", "--kappa-ratio", "1")
    assert code == 5
    assert not (out / "oracle.json").exists()


def test_oracle_extrapolated_passes(tmp_path):
    code, out = run(tmp_path, "oracle", "--preset", "paper-double", "--extrapolate",
                    "--periods", "2000")
    assert code == 0
    data = json.loads((out / "oracle.json").read_text())
    assert data["report"]["passed"] is True


def test_oracle_direct_reports_breach(tmp_path):
    code, out = run(tmp_path, "oracle", "--periods", "2000")
    data = json.loads((out / "oracle.json").read_text())
    assert code == (0 if data["report"]["passed"] else 4)
