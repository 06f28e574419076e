import json
import subprocess
import sys
import xml.etree.ElementTree as ET
from fractions import Fraction

import pytest

from coamoeba.cli import main, parse_angle, parse_offsets


@pytest.fixture
def files(tmp_path):
    square = tmp_path / "square.txt"
    square.write_text("0 0 1\n1 0 1\n0 1 1\n1 1 0 1\n")
    harnack = tmp_path / "harnack.txt"
    harnack.write_text("0 0 1\n1 0 2\n2 0 1\n0 1 -1\n1 1 1\n")
    polygon = tmp_path / "square.json"
    polygon.write_text("[[0, 0], [1, 0], [1, 1], [0, 1]]")
    return {"square": str(square), "harnack": str(harnack), "polygon": str(polygon), "dir": tmp_path}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out) if out.strip() else None


def test_parse_angle():
    assert parse_angle("pi/2") == Fraction(1, 2)
    assert parse_angle("3pi/4") == Fraction(3, 4)
    assert parse_angle("-pi") == Fraction(-1)
    assert parse_angle("0.25") == 0.25
    assert parse_offsets("pi;pi/2,1.5") == [[Fraction(1)], [Fraction(1, 2), 1.5]]


def test_shell_exit_codes(capsys, files):
    code, out = run(capsys, "shell", "--poly", files["square"])
    assert code == 0 and out["simple"]
    assert run(capsys, "shell", "--poly", files["harnack"])[0] == 3
    code, out = run(capsys, "shell", "--poly", files["harnack"], "--allow-degenerate")
    assert code == 3 and not out["simple"]


def test_dimerize_and_charpoly(capsys, files):
    dimer = files["dir"] / "dimer.json"
    assert main(["dimerize", "--poly", files["square"], "--json", str(dimer)]) == 0
    assert json.loads(dimer.read_text())["counts"] == {"V": 2, "E": 4, "F": 2}
    code, out = run(capsys, "charpoly", "--dimer", str(dimer))
    assert code == 0 and len(out["terms"]) == 4
    code, out = run(capsys, "charpoly", "--poly", files["square"])
    assert code == 0 and out["matches_input"]


def test_graph_from_offsets(capsys, files):
    code, out = run(capsys, "graph", "--polygon", files["polygon"], "--offsets", "pi;pi/2;pi/2;pi",
                    "--parity", "even")
    assert code == 0
    assert sum(e["type"] == "directed" for e in out["edges"]) == 4


def test_verify_and_obstruction(capsys, files):
    code, out = run(capsys, "verify-thm1", "--polygon", files["polygon"], "--random-offsets", "5")
    assert code == 0 and out["discrepancies"] == []
    code, out = run(capsys, "obstruction", "--k", "5")
    assert code == 0 and out == {"k": 5, "m": 4, "obstructed": True}
    code, out = run(capsys, "search-admissible", "--k", "1", "--budget", "1000")
    assert code == 0 and out["status"] == "found"


def test_circuit_check(capsys, files):
    code, out = run(capsys, "circuit-check", "--poly", files["square"], "--centre")
    assert code == 0 and out["bijection"]["bijective"]
    code, out = run(capsys, "circuit-check", "--poly", files["square"], "--translate", "1,1")
    assert len(out["critical_points"]) == 2


def test_svg_outputs_parse(files):
    for cmd in (["index", "--poly", files["square"]],
                ["graph", "--poly", files["square"]],
                ["coamoeba-render", "--poly", files["square"], "--resolution", "64"]):
        svg = files["dir"] / f"{cmd[0]}.svg"
        assert main(cmd + ["--svg", str(svg), "--json", str(files["dir"] / "x.json")]) == 0
        assert ET.parse(svg).getroot().tag.endswith("svg")


def test_usage_errors(capsys, files):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 1
    assert main(["index"]) == 1
    assert main(["obstruction", "--k", "1"]) == 1
    assert main(["shell", "--poly", str(files["dir"] / "missing.txt")]) == 1


def test_console_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "coamoeba.cli", "obstruction", "--k", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["obstructed"] is False
