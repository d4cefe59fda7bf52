import csv
import io
import json
import os
import subprocess

import pytest

EXE = os.environ.get("CMCSPEC_CLI", "cmcspec")
DATA = os.environ.get("CMCSPEC_DATA", os.path.join(os.path.dirname(__file__), "..", "data"))


def run(*args):
    p = subprocess.run([EXE, *args], capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def data(name):
    return os.path.join(DATA, name)


def test_classify_genus0():
    rc, out, _ = run("classify", "--spec", data("genus0.json"))
    assert rc == 0
    rep = json.loads(out)
    assert rep["schema_version"] == 1
    assert rep["deg_f"] == 1 and rep["winding"] == 1
    assert [c for pair in rep["b1"] for c in pair] == pytest.approx([1, 0, 1, 0], abs=1e-9)


def test_classify_genus1_is_v0():
    rc, out, _ = run("classify", "--spec", data("genus1.json"))
    assert rc == 0 and json.loads(out)["stratum"] == "V_0"


def test_spec_overrides_accepted():
    rc, out, _ = run("classify", "--spec", data("genus2_overrides.json"))
    assert rc == 0 and json.loads(out)["genus"] == 2


def test_root_on_circle_exits_2():
    rc, _, err = run("classify", "--spec", data("on_circle.json"))
    assert rc == 2 and "unit circle" in err


def test_malformed_names_field():
    rc, _, err = run("classify", "--spec", data("malformed.json"))
    assert rc == 2 and "eta[0]" in err


def test_missing_file_exits_2():
    assert run("classify", "--spec", data("does_not_exist.json"))[0] == 2


def test_scan_csv_layout_and_summary():
    rc, out, _ = run("scan", "--genus", "1", "--samples", "40", "--seed", "7", "--workers", "3")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0].startswith("# cmcspec scan csv v1")
    rows = list(csv.DictReader(io.StringIO("\n".join(l for l in lines if not l.startswith("#")))))
    assert len(rows) == 40
    assert [int(r["index"]) for r in rows] == list(range(40))
    assert all(r["stratum"] == "V_0" for r in rows)
    assert lines[-1] == "# summary V_0=40"


def test_scan_deterministic_across_workers(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("scan", "--genus", "2", "--samples", "30", "--seed", "11", "--workers", "1", "--out", str(a))[0] == 0
    assert run("scan", "--genus", "2", "--samples", "30", "--seed", "11", "--workers", "4", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()


def test_scan_json():
    rc, out, _ = run("scan", "--genus", "2", "--samples", "10", "--seed", "1", "--format", "json")
    rep = json.loads(out)
    assert rc == 0 and rep["schema_version"] == 1 and len(rep["rows"]) == 10
    assert set(rep["summary"]) <= {"V_-1", "V_1", "flagged"}


def test_deform_raises_degree():
    rc, out, _ = run("deform", "--spec", data("genus1.json"), "--alpha-angle", "0.7", "--t", "0.01")
    rep = json.loads(out)
    assert rc == 0 and rep["deg_f_before"] == 2 and rep["deg_f_after"] == 3
    assert len(rep["new_s1_critical_points"]) == 2


def test_deform_t_zero_is_nodal():
    rc, _, err = run("deform", "--spec", data("genus1.json"), "--alpha-angle", "0.7", "--t", "0")
    assert rc == 2 and "nodal" in err


def test_flow_zero_q_rotates():
    rc, out, _ = run("flow", "--spec", data("genus2.json"), "--q", "0,0,0", "--dt", "0.01", "--steps", "10")
    assert rc == 0
    lines = out.splitlines()
    assert lines[0].startswith("# cmcspec flow csv v1")
    last = list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))[-1]
    eta = complex(float(last["eta1_re"]), float(last["eta1_im"]))
    t = float(last["t"])
    expected = 0.4 * complex(__import__("cmath").exp(-1j * t))
    assert abs(eta - expected) < 1e-9
    assert float(last["drift"]) < 1e-8


def test_flow_rejects_non_real_q():
    assert run("flow", "--spec", data("genus2.json"), "--q", "1,0,2", "--steps", "1")[0] == 2


def test_gr_plane_probe():
    rc, out, _ = run("gr", "--spec", data("plane_s1.json"))
    rep = json.loads(out)
    assert rc == 0 and rep["in_S"] and rep["probe"]["dimension"] == 1


def test_gr_curve_immersion_rank():
    rc, out, _ = run("gr", "--spec", data("genus1.json"))
    rep = json.loads(out)
    assert rc == 0 and rep["immersion_rank"] == 2 and rep["gcd_degree"] == rep["classify_gcd_degree"]


def test_periods_report():
    rc, out, _ = run("periods", "--spec", data("genus2.json"), "--maxden", "6")
    rep = json.loads(out)
    assert rc == 0
    assert all(abs(r["value_re"]) < 1e-7 for r in rep["b1"]["B"])
    assert 0.0 <= rep["rational_plane_distance"] <= 1.6


def test_bad_format_flag():
    assert run("scan", "--format", "xml")[0] == 2
