import csv
import io
import json
import subprocess
import sys
import xml.etree.ElementTree as ET

import pytest

from selfaffine.cli import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, CliConfig, UsageError, run
from selfaffine.dissection import Dissection, verify
from selfaffine.families import table1_solutions


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_member_on_curve_c():
    code, out, _ = call("member", "--x", "0.5", "--y", "0.75")
    assert code == EXIT_OK
    assert json.loads(out) == {"families": ["C"]}


def test_normalize_example():
    code, out, _ = call("normalize", "--x", "1.5", "--y", "0.75")
    got = json.loads(out)
    assert code == EXIT_OK and got["region"] == "Pbar3prime"
    assert round(got["x"], 6) == 0.666667 and round(got["y"], 6) == 0.833333


def test_normalize_all():
    _, out, _ = call("normalize", "--x", "0.6", "--y", "0.8", "--all")
    rows = json.loads(out)["parametrizations"]
    assert len(rows) == 8 and sum(r["region"] == "P" for r in rows) == 1


def test_table1_csv_matches_printed():
    code, out, _ = call("table1", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == EXIT_OK and len(rows) == 13
    for row, sol in zip(rows, table1_solutions()):
        assert abs(float(row["x"]) - sol.printed[0]) < 1e-5
        assert abs(float(row["y"]) - sol.printed[1]) < 1e-5


def test_table1_json():
    _, out, _ = call("table1", "--format", "json")
    assert len(json.loads(out)["solutions"]) == 13


def test_classify():
    _, out, _ = call("classify", "--x", "0.75", "--y", "1.5")
    got = json.loads(out)
    assert got["label"] == "P3prime" and got["shape"] == "generic"


def test_sample_csv():
    code, out, _ = call("sample", "--curve", "C", "--n", "10", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert code == EXIT_OK and rows[0] == ["x", "y"] and len(rows) == 11


@pytest.mark.parametrize("argv", [
    ["construct", "trapezoid-a", "--z", "0.5", "--weights", "0.2,0.3,0.5"],
    ["construct", "trapezoid-b", "--z", "0.5"],
    ["construct", "trapezoid-c", "--z", "0.5"],
    ["construct", "nonconvex", "--n", "4"],
    ["construct", "chain", "--x", "0.3", "--y", "0.2", "--k", "3"],
])
def test_construct_round_trip(argv, tmp_path):
    path = tmp_path / "d.json"
    code, _, _ = call(*argv, "--out", str(path))
    assert code == EXIT_OK
    d = Dissection.from_json(path.read_text())
    assert verify(d, 1e-9).passed
    code, out, _ = call("verify", "--in", str(path))
    assert code == EXIT_OK and json.loads(out)["passed"] is True
    # re-emitting the parsed dissection reproduces the file
    assert d.to_json() == path.read_text()


def test_verify_failure_exit(tmp_path):
    path = tmp_path / "d.json"
    call("construct", "trapezoid-c", "--z", "0.5", "--out", str(path))
    doc = json.loads(path.read_text())
    doc["pieces"][0]["vertices"][2][0] += 0.05
    path.write_text(json.dumps(doc))
    code, out, _ = call("verify", "--in", str(path))
    assert code == EXIT_VERIFY and json.loads(out)["passed"] is False


def test_render_svg(tmp_path):
    d = tmp_path / "d.json"
    call("construct", "nonconvex", "--n", "3", "--out", str(d))
    code, out, _ = call("render", "--in", str(d), "--labels")
    assert code == EXIT_OK
    assert ET.fromstring(out.encode()).tag.endswith("svg")
    code, out, _ = call("render", "--chart")
    assert code == EXIT_OK and out.count('class="singular"') == 13


def test_sweep_subset_and_report(tmp_path):
    cat = tmp_path / "cat.json"
    code, _, _ = call("sweep", "--template", "c", "--starts", "100", "--triples", "0,362",
                      "--jobs", "1", "--out", str(cat))
    assert code == EXIT_OK
    doc = json.loads(cat.read_text())
    assert doc["census"] == [{"triple": ["2143", "2143", "3412"], "kind": "isolated"}]
    # a partial sweep cannot pass the census
    code, out, _ = call("report", "--catalogue", str(cat))
    assert code == EXIT_VERIFY
    crit = {c["name"]: c for c in json.loads(out)["criteria"]}
    assert not crit["census"]["passed"] and crit["table1"]["passed"]


@pytest.mark.parametrize("argv, expected", [
    (["member", "--x", "0.5", "--y", "0.75"], EXIT_OK),
    (["classify", "--x", "0.3", "--y", "0.2"], EXIT_DOMAIN),
    (["classify", "--x", "-1", "--y", "2"], EXIT_DOMAIN),
    (["construct", "trapezoid-c", "--z", "1"], EXIT_DOMAIN),
    (["construct", "trapezoid-a", "--z", "0.5", "--weights", "0.5,0.5,0"], EXIT_DOMAIN),
    (["construct", "nonconvex", "--n", "2"], EXIT_DOMAIN),
    (["verify", "--in", "/nonexistent/file.json"], EXIT_DOMAIN),
    (["report"], EXIT_DOMAIN),
    (["bogus"], EXIT_USAGE),
    ([], EXIT_USAGE),
    (["member", "--x", "abc", "--y", "1"], EXIT_USAGE),
    (["member", "--x", "0.5"], EXIT_USAGE),
    (["construct", "trapezoid-c"], EXIT_USAGE),
    (["construct", "trapezoid-a", "--z", "0.5", "--weights", "a,b"], EXIT_USAGE),
    (["table1", "--tol", "0.1"], EXIT_USAGE),
    (["table1", "--format", "xml"], EXIT_USAGE),
    (["sweep", "--starts", "0"], EXIT_USAGE),
    (["sweep", "--triples", "600"], EXIT_USAGE),
    (["render"], EXIT_USAGE),
    (["realizations"], EXIT_USAGE),
])
def test_exit_code_matrix(argv, expected):
    code, _, err = call(*argv)
    assert code == expected
    if expected != EXIT_OK:
        assert err


def test_config_invariants():
    with pytest.raises(UsageError):
        CliConfig(tolerance=0.0)
    with pytest.raises(UsageError):
        CliConfig(starts=0)
    assert CliConfig().tolerance == 1e-9


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "selfaffine.cli", "member", "--x", "0.5",
                           "--y", "0.75"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout) == {"families": ["C"]}
