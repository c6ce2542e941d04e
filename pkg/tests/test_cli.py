"""Command-line interface: determinism, formats, overrides, exit codes."""

import json
import subprocess
import sys


def run_cli(*args, check=False):
    proc = subprocess.run([sys.executable, "-m", "recoilspec.cli", *args],
                         capture_output=True, text=True)
    if check:
        assert proc.returncode == 0, proc.stderr
    return proc


def test_coeffs_deterministic_bytes():
    a = run_cli("coeffs", "--set", "coeffs.points=5", check=True)
    b = run_cli("coeffs", "--set", "coeffs.points=5", check=True)
    assert a.stdout == b.stdout
    assert a.stdout.startswith("#")


def test_csv_header_and_shape():
    proc = run_cli("coeffs", "--set", "coeffs.points=3", check=True)
    lines = proc.stdout.strip().splitlines()
    header = [ln for ln in lines if ln.startswith("#")]
    assert len(header) == 2
    assert "coeffs" in header[0]
    # resolved config is embedded as sorted JSON in the second header line
    doc = json.loads(header[1].lstrip("# "))
    assert doc["config"]["coeffs"]["points"] == 3
    body = [ln for ln in lines if not ln.startswith("#")]
    assert body[0].split(",")[0] == "detuning_hz"
    assert len(body) == 4


def test_json_format():
    proc = run_cli("budget", "--format", "json", check=True)
    doc = json.loads(proc.stdout)
    assert doc["command"] == "budget"
    assert len(doc["rows"]) == 1
    row = dict(zip(doc["columns"], doc["rows"][0]))
    assert float(row["tstar"]) > 0.0


def test_set_override_changes_output():
    base = run_cli("coeffs", check=True)
    off = run_cli("coeffs", "--set", "pulse.rabi_hz=0.0", check=True)
    assert base.stdout != off.stdout
    row = off.stdout.strip().splitlines()[-1].split(",")
    cols = [ln for ln in off.stdout.splitlines() if not ln.startswith("#")][0]
    idx = cols.split(",").index("alpha_p")
    assert float(row[idx]) == 0.0


def test_bad_config_exits_2(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"pulse": {"linewidth_hz": -1.0}}))
    proc = run_cli("coeffs", "--config", str(cfg))
    assert proc.returncode == 2
    assert proc.stderr != ""


def test_unknown_override_exits_2():
    proc = run_cli("coeffs", "--set", "pulse.no_such_key=1.0")
    assert proc.returncode == 2


def test_oracle_check_failure_exits_3():
    proc = run_cli("oracle-check",
                   "--set", "oracle_check.alpha_points=2",
                   "--set", "oracle_check.d_points=1",
                   "--set", "oracle_check.tolerance=1e-12")
    assert proc.returncode == 3


def test_resonance_has_central_dip():
    proc = run_cli("resonance", "--set", "resonance.points=9",
                   "--set", "resonance.tbar=5.0", check=True)
    rows = [ln.split(",") for ln in proc.stdout.strip().splitlines()
            if not ln.startswith("#")]
    cols, data = rows[0], rows[1:]
    p = [float(r[cols.index("p_sym")]) for r in data]
    # the recoil drift, and hence the survival dip, peaks at line center
    assert min(p) == p[len(p) // 2]
    assert all(0.0 <= v <= 1.0 for v in p)


def test_threads_do_not_change_output():
    a = run_cli("coeffs", "--set", "coeffs.points=5", "--threads", "1",
                check=True)
    b = run_cli("coeffs", "--set", "coeffs.points=5", "--threads", "4",
                check=True)
    assert a.stdout == b.stdout
