import json
import subprocess
import sys

import pytest

from capcyl import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_index_text(capsys):
    code, out, _ = run(capsys, "index", "--scenario", "dirichlet", "--r", "1", "--T", "7")
    assert code == 0
    assert "counted_index=2" in out
    assert "paper_index=2" in out


def test_index_slab_strongly_stable(capsys):
    code, out, _ = run(capsys, "index", "--scenario", "slab-horosphere", "--tau", "1", "--T", "1")
    assert code == 0
    assert "counted_index=0" in out
    assert "strongly stable" in out


def test_index_json_key_order(capsys):
    code, out, _ = run(capsys, "index", "--scenario", "half-plane", "--r", "1", "--T", "5", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert list(doc)[:6] == ["scenario", "R", "r", "T", "counted_index", "nullity"]
    assert doc["counted_index"] == 2 and doc["paper_index"] == 1 and doc["agrees"] is False


def test_strict_flags_disagreement(capsys):
    code, _, _ = run(capsys, "index", "--scenario", "half-plane", "--r", "1", "--T", "5", "--strict")
    assert code == 2
    code, _, _ = run(capsys, "index", "--scenario", "dirichlet", "--r", "1", "--T", "7", "--strict")
    assert code == 0


def test_ball_index_with_oracle(capsys):
    code, out, _ = run(capsys, "index", "--scenario", "ball", "--H0", "2", "--rho", "2", "--r", "0.5", "--oracle")
    assert code == 0
    assert "counted_index=6" in out
    assert "oracle_index=6" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["index", "--scenario", "dirichlet", "--T", "7"],
        ["index", "--scenario", "dirichlet", "--r", "1"],
        ["index", "--scenario", "dirichlet", "--r", "1", "--R", "1", "--T", "7"],
        ["index", "--scenario", "dirichlet", "--r", "-1", "--T", "7"],
        ["index", "--scenario", "ball", "--H0", "2", "--rho", "2", "--r", "0.6"],
        ["index", "--scenario", "ball", "--H0", "0.5", "--rho", "2", "--r", "0.3"],
        ["index", "--scenario", "equidistant", "--r", "1", "--T", "2", "--H0", "1.5"],
        ["index", "--scenario", "slab-horosphere", "--tau", "1", "--T", "1", "--r", "1"],
        ["index", "--scenario", "nonsense", "--r", "1", "--T", "1"],
        ["spectrum", "--scenario", "dirichlet", "--r", "1", "--T", "7", "--m-max", "-1"],
        ["bifurcation", "--r", "1", "--T0", "5"],
        ["sweep", "--scenario", "dirichlet", "--r", "1", "--sweep-param", "T", "--start", "1", "--stop", "2"],
    ],
)
def test_usage_errors_exit_one(capsys, argv):
    with pytest.raises(SystemExit) as info:
        sys.exit(cli.main(argv))
    assert info.value.code == 1
    out, err = capsys.readouterr()
    assert out == ""
    assert "error" in err


def test_spectrum_csv(capsys):
    code, out, _ = run(capsys, "spectrum", "--scenario", "dirichlet", "--r", "1", "--T", "7")
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == "branch,m,n,delta,lambda"
    assert lines[1] == "trig,1,0,0.448799,-0.39929"
    assert "\r" not in out


def test_spectrum_first_rows(capsys):
    _, out, _ = run(capsys, "spectrum", "--scenario", "horospheres", "--r", "1", "--T", "2")
    assert out.splitlines()[1] == "hyperbolic,0,0,1,-1"
    _, out, _ = run(capsys, "spectrum", "--scenario", "half-horosphere", "--r", "1", "--T", "2")
    assert out.splitlines()[1] == "hyperbolic,0,0,0.957504,-0.958407"


def test_spectrum_json(capsys):
    _, out, _ = run(capsys, "spectrum", "--scenario", "slab-horosphere", "--tau", "2", "--T", "4", "--format", "json")
    doc = json.loads(out)
    assert doc["entries"][0]["lambda"] == pytest.approx(2.4674011002723395, rel=1e-15)


def test_sweep_dirichlet_steps(capsys):
    code, out, _ = run(
        capsys, "sweep", "--scenario", "dirichlet", "--r", "1", "--sweep-param", "T",
        "--start", "1", "--stop", "10", "--step", "0.5",
    )
    lines = out.splitlines()
    assert code == 0
    assert lines[0] == ",".join(cli.SWEEP_COLUMNS)
    rows = [line.split(",") for line in lines[1:]]
    assert len(rows) == 19
    index = {float(row[3]): int(row[5]) for row in rows}
    assert index[3.0] == 0 and index[3.5] == 1
    assert index[6.0] == 1 and index[6.5] == 2
    assert rows[0][8] == "3.14159" and rows[0][9] == "6.28319"


def test_sweep_empty_range(capsys):
    code, out, _ = run(
        capsys, "sweep", "--scenario", "dirichlet", "--r", "1", "--sweep-param", "T",
        "--start", "5", "--stop", "1", "--step", "0.5",
    )
    assert code == 0
    assert out == ",".join(cli.SWEEP_COLUMNS) + "\n"


def test_sweep_ball_radius(capsys):
    code, out, _ = run(
        capsys, "sweep", "--scenario", "ball", "--H0", "2", "--rho", "2", "--sweep-param", "r",
        "--start", "0.05", "--stop", "0.55", "--num", "6",
    )
    rows = [line.split(",") for line in out.splitlines()[1:]]
    assert code == 0
    assert len(rows) == 6
    assert all(row[8] == "" and row[9] == "" for row in rows)


def test_sweep_rejects_any_bad_point_before_output(capsys):
    code, out, err = run(
        capsys, "sweep", "--scenario", "ball", "--H0", "2", "--rho", "2", "--sweep-param", "r",
        "--start", "0.3", "--stop", "0.7", "--num", "5",
    )
    assert code == 1
    assert out == ""


def test_sweep_parallel_matches_serial(capsys):
    argv = ["sweep", "--scenario", "horospheres", "--r", "0.5", "--sweep-param", "T", "--start", "0.5", "--stop", "6", "--num", "12"]
    _, serial, _ = run(capsys, *argv)
    _, parallel, _ = run(capsys, *argv, "--jobs", "3")
    assert serial == parallel


def test_sweep_log_spacing():
    values = cli.sweep_values(0.1, 10.0, num=3, spacing="log")
    assert values == pytest.approx([0.1, 1.0, 10.0])
    assert cli.sweep_values(1.0, 8.0, step=2.0, spacing="log") == pytest.approx([1.0, 2.0, 4.0, 8.0])


def test_oracle_check(capsys):
    code, out, _ = run(capsys, "oracle-check", "--scenario", "horospheres", "--r", "1", "--T", "7", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["passed"] is True
    assert doc["max_deviation"] < 1e-3
    assert doc["order"] == pytest.approx(2.0, abs=0.3)


def test_bifurcation_report(capsys):
    code, out, _ = run(capsys, "bifurcation", "--r", "1", "--m-max", "2", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert [p["T0"] for p in doc["points"]] == pytest.approx([6.283185307179586, 12.566370614359172])
    assert doc["points"][0]["kernel_dim_even"] == 1


def test_output_file(tmp_path, capsys):
    target = tmp_path / "table.csv"
    code, out, _ = run(capsys, "spectrum", "--scenario", "dirichlet", "--r", "1", "--T", "7", "--output", str(target))
    assert code == 0 and out == ""
    assert target.read_bytes().startswith(b"branch,m,n,delta,lambda\n")


def test_format_helpers():
    assert cli.fmt6(-0.0) == "0"
    assert cli.fmt6(None) == ""
    assert cli.fmt6(float("nan")) == ""
    assert cli.fmt6(3) == "3"
    assert cli.fmt6(1234567.0) == "1.23457e+06"
    assert cli._json_number(-0.0) == 0.0
    assert cli._json_number(float("inf")) is None


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "capcyl", "index", "--scenario", "dirichlet", "--r", "1", "--T", "7", "--format", "json"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["counted_index"] == 2
