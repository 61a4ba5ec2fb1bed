import json
import math
import os
import subprocess
import sys

import pytest

import ic_rates.cli
from ic_rates import CSV_HEADER, NoThresholdError
from ic_rates.cli import cli_main

SWEEP_CONFIG = {
    "topology": "two_ic",
    "alphabet": "qam4",
    "power_db": [0.0, 5.0],
    "h_abs": [1.0, 1.5],
    "psi": [0.0],
    "rotation": "off",
    "estimator": {"method": "quad", "quadrature_order": 24},
    "seed": 42,
}


def run_cli(*args, env=None):
    return subprocess.run(
        [sys.executable, "-m", "ic_rates", *args],
        capture_output=True,
        text=True,
        env=env,
    )


def test_mi_cross_json():
    res = run_cli(
        "mi", "--term", "cross", "--alphabet", "qam4", "--power-db", "5",
        "--h-abs", "1.5", "--psi", "0", "--phi", "0.785398", "--method", "quad",
    )
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["term"] == "cross"
    assert payload["method"] == "quad"
    assert payload["bits"] == pytest.approx(1.4239363, abs=1e-4)
    assert payload["std_error"] == 0.0


def test_mi_monte_carlo_repeats_byte_identical():
    args = (
        "mi", "--term", "cond", "--alphabet", "qam4", "--power-db", "5",
        "--h-abs", "1", "--psi", "0", "--phi", "0",
        "--method", "mc", "--samples", "2000", "--seed", "9",
    )
    a = run_cli(*args)
    b = run_cli(*args)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout


def test_mi_out_file(tmp_path):
    out = tmp_path / "mi.json"
    res = run_cli(
        "mi", "--term", "cond", "--alphabet", "qam4", "--power-db", "0",
        "--h-abs", "1", "--psi", "0", "--phi", "0", "--out", str(out),
    )
    assert res.returncode == 0
    assert json.loads(out.read_text())["bits"] > 0


def test_region_finite_json():
    res = run_cli(
        "region", "--topology", "2ic", "--alphabet", "qam4", "--power-db", "5",
        "--h-abs", "1.5", "--method", "quad",
    )
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    for key in ("topology", "source", "r1_max", "r2_max", "sum_rx1", "sum_rx2", "max_sum_rate"):
        assert key in payload
    assert payload["source"] == "finite"
    assert payload["max_sum_rate"] <= payload["r1_max"] + payload["r2_max"] + 1e-12


def test_region_gaussian_anchor():
    res = run_cli("region", "--topology", "2ic", "--alphabet", "gaussian",
                  "--power-db", "5", "--h-abs", "1")
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["source"] == "gaussian"
    assert payload["r1_max"] == pytest.approx(math.log2(1 + 10 ** 0.5), abs=1e-9)
    assert payload["sum_rx1"] == pytest.approx(math.log2(1 + 2 * 10 ** 0.5), abs=1e-9)


def test_vsi_subcommand():
    res = run_cli("vsi", "--power-db", "5", "--alphabet", "qam4",
                  "--psi", "0.7853981633974483", "--rotation", "off")
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["h_vsi"] == pytest.approx(1.9295, abs=0.02)
    assert payload["gaussian_reference"] == pytest.approx(2.0401661, abs=1e-6)


def test_optimize_rotation_with_trace(tmp_path):
    trace = tmp_path / "trace.csv"
    res = run_cli(
        "optimize-rotation", "--topology", "z_ic", "--alphabet", "qam4",
        "--power-db", "5", "--h-abs", "1", "--psi", "0", "--method", "quad",
        "--out", str(trace),
    )
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["phi_star"] == pytest.approx(math.pi / 4, abs=1e-9)
    lines = trace.read_text().splitlines()
    assert lines[0] == "phi,i_cross_rx1,i_cross_rx2"
    assert len(lines) == 65


def test_sweep_end_to_end(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(SWEEP_CONFIG))
    out1 = tmp_path / "run1.csv"
    out2 = tmp_path / "run2.csv"
    env = {**os.environ, "IC_RATES_CACHE": str(tmp_path / "cache")}

    res = run_cli("sweep", "--config", str(cfg), "--out", str(out1), env=env)
    assert res.returncode == 0
    assert "wrote 4 records" in res.stdout
    lines = out1.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 5

    res = run_cli("sweep", "--config", str(cfg), "--out", str(out2), env=env)
    assert res.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()

    out3 = tmp_path / "run3.csv"
    res = run_cli("sweep", "--config", str(cfg), "--out", str(out3),
                  "--no-cache", "--workers", "2", env=env)
    assert res.returncode == 0
    assert out1.read_bytes() == out3.read_bytes()


def test_sweep_seed_override_changes_seed_column(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(SWEEP_CONFIG))
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    run_cli("sweep", "--config", str(cfg), "--out", str(out1), "--no-cache")
    run_cli("sweep", "--config", str(cfg), "--out", str(out2), "--no-cache", "--seed", "1")
    col = CSV_HEADER.split(",").index("seed")
    seeds1 = [line.split(",")[col] for line in out1.read_text().splitlines()[1:]]
    seeds2 = [line.split(",")[col] for line in out2.read_text().splitlines()[1:]]
    assert seeds1 != seeds2


def test_gnuplot_hint(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(SWEEP_CONFIG))
    out = tmp_path / "out.csv"
    res = run_cli("sweep", "--config", str(cfg), "--out", str(out),
                  "--no-cache", "--gnuplot-hint")
    assert res.returncode == 0
    assert "plot" in res.stdout
    assert str(out) in res.stdout


@pytest.mark.parametrize(
    "args",
    [
        ("frobnicate",),
        ("mi", "--term", "cross", "--alphabet", "qam8", "--power-db", "5",
         "--h-abs", "1", "--psi", "0", "--phi", "0"),
        ("mi", "--term", "cond", "--alphabet", "qam4", "--power-db", "5",
         "--h-abs", "0.5", "--psi", "0", "--phi", "0"),
        ("sweep", "--config", "/does/not/exist.json"),
        ("region", "--no-such-flag",),
    ],
)
def test_usage_errors_exit_one(args):
    assert run_cli(*args).returncode == 1


def test_numerical_failures_exit_two(monkeypatch):
    def boom(*args, **kwargs):
        raise NoThresholdError("nothing flips")

    monkeypatch.setattr(ic_rates.cli, "find_threshold", boom)
    code = cli_main(["vsi", "--power-db", "5", "--alphabet", "qam4"])
    assert code == 2

    def sanity(*args, **kwargs):
        raise ArithmeticError("estimate exceeded its ceiling")

    monkeypatch.setattr(ic_rates.cli, "mi_single", sanity)
    code = cli_main(["mi", "--term", "cond", "--alphabet", "qam4", "--power-db", "5",
                     "--h-abs", "1", "--psi", "0", "--phi", "0"])
    assert code == 2
