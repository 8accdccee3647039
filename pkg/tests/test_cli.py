import subprocess
import sys

import pytest

from cavitysim.cli import build_parser, main


def test_parser_requires_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])


def test_simulate_dirichlet(capsys):
    assert main(["simulate-dirichlet", "--L", "0.011", "--t-a", "1e-9", "--h", "1e-3"]) == 0
    out = capsys.readouterr().out
    assert "dtheta_D" in out and "2.6633763" in out


def test_simulate_robin(capsys):
    args = ["simulate-robin", "--L", "0.122", "--t-a", "1e-9", "--h", "1e-3", "--n-modes", "6", "--n-work", "12"]
    assert main(args) == 0
    assert "epsilon" in capsys.readouterr().out


def test_plan_from_acceleration(capsys):
    assert main(["simulate-dirichlet", "--L", "0.0238", "--t-a", "1e-10", "--a", "2e16", "--n-modes", "6"]) == 0
    assert "h = 0.0336" in capsys.readouterr().out


def test_fit_flux_writes_tables(tmp_path, capsys):
    args = ["fit-flux", "--L", "0.0238", "--t-a", "1e-10", "--h", "0.25", "--harmonics", "4", "--out", str(tmp_path)]
    assert main(args) == 0
    assert (tmp_path / "waveform_left_N4.txt").exists()
    assert (tmp_path / "waveform_right_N4.txt").exists()
    assert "10 GHz" in capsys.readouterr().out


def test_run_config(tmp_path, capsys):
    cfg = tmp_path / "sweep.ini"
    cfg.write_text("[scenario]\nkind = dirichlet-sweep\nt_a = 1e-9\nL = 0.011\nh_values = 1e-4, 1e-3\nn_modes = 6\n")
    assert main(["run", str(cfg), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "sweep.csv").exists()
    assert (tmp_path / "out" / "sweep.svg").exists()


def test_scan_resonance(tmp_path, capsys):
    args = ["scan-resonance", "--L-start", "0.0237", "--L-stop", "0.0239", "--trips", "20", "--n-modes", "6",
            "--out", str(tmp_path)]
    assert main(args) == 0
    assert "L_res = 2.3800 cm" in capsys.readouterr().out
    assert (tmp_path / "scan.csv").read_text().startswith("L_cm,h,")


def test_reproduce_fig1(tmp_path):
    assert main(["reproduce", "fig1", "--n-modes", "6", "--out", str(tmp_path)]) == 0
    for ext in ("csv", "json", "svg"):
        assert (tmp_path / f"fig1.{ext}").exists()


def test_errors_return_status_2(tmp_path, capsys):
    bad = tmp_path / "bad.ini"
    bad.write_text("[scenario]\nkind = robin-trip\nt_a = 1e-9\nmystery = 1\n")
    assert main(["run", str(bad)]) == 2
    assert "unknown key 'mystery'" in capsys.readouterr().err
    assert main(["simulate-dirichlet", "--L", "0.01", "--t-a", "1e-9", "--h", "2.5"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cavitysim", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "reproduce" in proc.stdout
