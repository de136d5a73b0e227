import csv
import io
import json
import math
import subprocess
import sys

import pytest

from nhqfi import cli


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("text,value", [
    ("pi", math.pi), ("pi/2", math.pi / 2), ("2pi/3", 2 * math.pi / 3), ("-pi/4", -math.pi / 4),
    ("3*pi/2", 1.5 * math.pi), ("0", 0.0), ("1.25", 1.25), ("0.5pi", 0.5 * math.pi),
])
def test_parse_angle(text, value):
    assert cli.parse_angle(text) == pytest.approx(value)


def test_parse_angle_rejects_garbage():
    import argparse
    with pytest.raises(argparse.ArgumentTypeError):
        cli.parse_angle("pie")


def test_pseudo_sweep_csv(capsys):
    code, out, _ = run(["pseudo-sweep", "--epsilon", "1.0", "--omega", "1.0", "--points", "5"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert tuple(rows[0].keys()) == cli.COLUMNS
    assert len(rows) == 25
    first = next(r for r in rows if r["n_label"] == "dilated" and float(r["x_or_theta"]) == 0)
    assert float(first["F_closed_form"]) == pytest.approx(1 / 36, rel=1e-11)
    assert all(float(r["residual"]) < 1e-6 for r in rows)


def test_pt_sweep_phi_list(capsys):
    code, out, _ = run(["pt-sweep", "--s", "1", "--r", "0.4", "--omega", "1.5707963", "--m", "1",
                        "--phi-list", "pi,2pi/3,pi/3,0", "--points", "11"], capsys)
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 44
    assert {r["regime"] for r in rows} == {"unbroken"}
    assert all(r["F_projected"] for r in rows)


def test_json_mirrors_rows(capsys):
    code, out, _ = run(["pt-sweep", "--points", "3", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["metadata"]["command"] == "pt-sweep"
    assert len(doc["rows"]) == 3
    assert "residual_max" in doc["metadata"]


def test_check_exit_zero(capsys):
    code, out, err = run(["check", "--suite", "printed"], capsys)
    assert code == 0
    assert "printed-unbroken" in err


def test_precondition_exit_one(capsys):
    code, _, err = run(["pt-sweep", "--r", "-1"], capsys)
    assert code == 1 and "r must be nonnegative" in err
    code, _, _ = run(["pt-sweep", "--omega", "banana"], capsys)
    assert code == 1


def test_numeric_failure_exit_two(capsys):
    code, _, err = run(["pt-sweep", "--r", "1", "--s", "0.1", "--theta-max", "1000", "--points", "11"], capsys)
    assert code == 2
    assert "theta=" in err


def test_ep_parameters_rejected_for_sweep(capsys):
    code, _, _ = run(["pt-sweep", "--r", "0.5", "--s", "0.5"], capsys)
    assert code == 1


def test_thread_count_does_not_change_bytes(capsys, monkeypatch, tmp_path):
    args = ["pt-sweep", "--phi-list", "pi,0,1", "--points", "21"]
    monkeypatch.setenv("NHQFI_THREADS", "1")
    _, one, _ = run(args, capsys)
    monkeypatch.setenv("NHQFI_THREADS", "3")
    _, three, _ = run(args, capsys)
    assert one == three


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, out, _ = run(["ep-probe", "--points", "3", "-o", str(path)], capsys)
    assert code == 0 and out == ""
    assert path.read_text().startswith("model,")


def test_console_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "nhqfi.cli", "ep-probe", "--points", "2"],
                         capture_output=True, text=True, check=True)
    assert out.stdout.splitlines()[0].startswith("model,regime")
