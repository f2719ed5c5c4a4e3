import json
import shutil
import subprocess
from pathlib import Path

import jsonschema
import pytest

from valdef.cli import main

SCHEMA = Path(__file__).resolve().parents[1] / "schema"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def verdict(out):
    word, _, rest = out.strip().splitlines()[-1].partition(" ")
    return word, json.loads(rest)


def validate(path, name):
    jsonschema.validate(json.loads(Path(path).read_text()),
                        json.loads((SCHEMA / f"{name}.schema.json").read_text()))


def test_emit_explicit(capsys):
    code, out, _ = run(capsys, "emit", "--field", "2^1", "--style", "explicit-fp")
    assert code == 0
    assert out.startswith("∃a b x1 x2 x3 x4 y1 y2 y3 y4 ((x - a + b)^2 + x - a + b ≐ 0")


def test_emit_field_spellings_agree(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(capsys, "emit", "--field", "9", "--out", str(a))[0] == 0
    assert run(capsys, "emit", "--field", "3^2", "--out", str(b))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    validate(a, "formula")


def test_emit_bad_field(capsys):
    code, out, err = run(capsys, "emit", "--field", "6^1")
    assert code == 2 and "6 is not prime" in err and out == ""


def test_decide_chi_and_verify(capsys, tmp_path):
    cert = tmp_path / "c.json"
    code, out, _ = run(capsys, "decide", "chi", "--field", "4", "--in", "g + t", "--cert", str(cert))
    assert code == 0 and verdict(out) == ("Accept", {"field": "2^2", "predicate": "chi", "x": "g + t", "y": "g"})
    validate(cert, "chi-certificate")
    assert json.loads(cert.read_text())["config"]["field"] == "2^2"
    assert run(capsys, "verify", "--cert", str(cert), "--in", "g + t")[0] == 0
    assert run(capsys, "verify", "--cert", str(cert), "--in", "g + t + t^50")[0] == 1
    doc = json.loads(cert.read_text())
    doc["y_witness"]["plus"]["x_witness"]["plus"]["hensel"]["approx_root"] += " + t"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert run(capsys, "verify", "--cert", str(bad), "--in", "g + t")[0] == 1


def test_decide_reject_writes_refutation(capsys, tmp_path):
    cert = tmp_path / "r.json"
    code, out, _ = run(capsys, "decide", "chi", "--in", "t^-2 + 1", "--cert", str(cert))
    assert code == 1 and verdict(out)[0] == "Reject"
    validate(cert, "chi-refutation")
    assert run(capsys, "verify", "--cert", str(cert), "--in", "t^-2 + 1")[0] == 0
    assert run(capsys, "verify", "--cert", str(cert), "--in", "t^-3 + 1")[0] == 1


def test_decide_folkloric(capsys, tmp_path):
    code, out, _ = run(capsys, "decide", "folkloric", "--l", "2", "--field", "3^1", "--in", "t^-1")
    assert code == 1 and verdict(out)[0] == "Reject"
    cert = tmp_path / "f.json"
    assert run(capsys, "decide", "folkloric", "--field", "3", "--in", "1 + t", "--cert", str(cert))[0] == 0
    validate(cert, "hensel-certificate")
    assert run(capsys, "verify", "--cert", str(cert), "--in", "1 + t")[0] == 0
    assert run(capsys, "verify", "--cert", str(cert), "--in", "1 + 2*t")[0] == 1


def test_decide_stages(capsys):
    code, out, _ = run(capsys, "decide", "stage:Y", "--in", "1")
    assert code == 3 and verdict(out)[0] == "Unknown"
    assert run(capsys, "decide", "stage:Y", "--in", "t")[0] == 0
    assert run(capsys, "decide", "stage:X", "--in", "t^-3")[0] == 1
    assert run(capsys, "decide", "stage:Q", "--in", "t")[0] == 2


def test_decide_region(capsys):
    assert run(capsys, "decide", "region", "--region", "Bbar:1:1", "--in", "1+t")[0] == 0
    assert run(capsys, "decide", "region", "--region", "B:1/2", "--ram", "2", "--in", "t^(1/2)")[0] == 1
    assert run(capsys, "decide", "region", "--in", "t")[0] == 2


@pytest.mark.parametrize("argv", [
    ("decide", "chi", "--in", "t +"),
    ("decide", "chi", "--in", "t^(1/2)"),
    ("decide", "chi"),
    ("verify", "--in", "t"),
    ("decide", "chi", "--in", "t", "--ram", "0"),
])
def test_bad_inputs_exit_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_verify_schema_violation(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"schema": "valdef.chi-certificate/1", "field": "2"}')
    assert run(capsys, "verify", "--cert", str(bad), "--in", "t")[0] == 2
    bad.write_text("not json")
    assert run(capsys, "verify", "--cert", str(bad), "--in", "t")[0] == 2
    bad.write_text('{"schema": "something/else", "field": "2"}')
    assert run(capsys, "verify", "--cert", str(bad), "--in", "t")[0] == 2


def test_suite_reports_are_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        code, out, err = run(capsys, "suite", "chi", "--field", "8", "--samples", "60", "--seed", "7",
                             "--out", str(path))
        assert code == 0 and verdict(out)[1]["failed"] == 0
        assert "wall time" in err
    assert a.read_bytes() == b.read_bytes()
    validate(a, "suite-report")
    report = json.loads(a.read_text())
    assert report["config"]["seed"] == 7 and report["command"] == "suite chi"


def test_suite_spheres(capsys, tmp_path):
    out = tmp_path / "s.json"
    assert run(capsys, "suite", "spheres", "--samples", "200", "--out", str(out))[0] == 0


def test_reduce(capsys, tmp_path):
    code, out, _ = run(capsys, "reduce", "h10", "--in", "x*y - 1")
    assert code == 0 and verdict(out)[1]["disjuncts"] == 4
    f = tmp_path / "f.txt"
    f.write_text("+".join(f"x{i}" for i in range(13)))
    assert run(capsys, "reduce", "h10", "--in-file", str(f))[0] == 2
    dest = tmp_path / "o.json"
    code, out, _ = run(capsys, "reduce", "val2ring", "--in", "O(x)", "--out", str(dest))
    assert code == 0 and verdict(out)[1] == {"atoms": 16, "free": ["x"], "kind": "val2ring", "quantified": 19}
    validate(dest, "formula")


@pytest.mark.skipif(shutil.which("valdef") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["valdef", "decide", "chi", "--field", "4", "--in", "g + t"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("Accept ")
