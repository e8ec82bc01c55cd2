import json
import os
import subprocess
import sys

import pytest

from conftest import CORPUS
from flatkit.cli import main


def run(*args, env=None):
    proc = subprocess.run([sys.executable, "-m", "flatkit", *args], capture_output=True,
                          text=True, env={**os.environ, **(env or {})})
    return proc.returncode, proc.stdout, proc.stderr


def prob(name):
    return str(CORPUS / f"{name}.prob")


def test_flatcheck_blowup_certificate():
    code, out, _ = run("flatcheck", prob("blowup"), "--certificate")
    assert code == 1
    assert "certificate: m = [x1 - x2], r = y1" in out


def test_flatcheck_free():
    assert run("flatcheck", prob("freepoly"))[0] == 0


def test_power_one_inconclusive():
    code, out, _ = run("flatcheck", prob("blowup"), "--power", "1")
    assert code == 0 and "inconclusive: power 1 < base dimension 2" in out


def test_json_is_deterministic():
    a = run("flatcheck", prob("blowup"), "--certificate", "--format", "json")
    b = run("flatcheck", prob("blowup"), "--certificate", "--format", "json")
    assert a == b
    data = json.loads(a[1])
    assert data["status"] == "notflat"
    assert data["certificate"]["element"] == ["x1 - x2"]
    assert data["certificate"]["annihilator"] == "y1"
    assert "bases" in data["statistics"]


def test_other_commands(capsys):
    assert main(["torsion", prob("maxideal2"), "--power", "1"]) == 0
    assert main(["torsion", prob("maxideal2"), "--power", "2"]) == 1
    assert main(["first-torsion-power", prob("torsion_y1")]) == 1
    assert main(["first-torsion-power", prob("doublecover")]) == 0
    capsys.readouterr()
    assert main(["fibredim", prob("blowup"), "--point", "origin", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)["fibre_dimension"] == 1
    assert main(["fibredim", prob("blowup"), "--point", "1,0"]) == 0
    assert "fibre dimension over 1,0: 0" in capsys.readouterr().out
    assert main(["image", prob("blowup")]) == 0
    assert main(["gb", prob("blowup"), "--order", "block"]) == 0
    assert main(["oracle", prob("blowup"), "--degree", "1"]) == 1
    assert main(["oracle", prob("freepoly"), "--degree", "2"]) == 0
    assert "no witness" in capsys.readouterr().out
    assert main(["flatcheck", prob("blowup"), "--at-origin"]) == 1


def test_input_errors(tmp_path, capsys):
    bad = tmp_path / "bad.prob"
    bad.write_text("base y1;\nideal: 2 y1;")
    assert main(["flatcheck", str(bad)]) == 2
    assert "bad.prob:2:" in capsys.readouterr().err
    assert main(["flatcheck", str(tmp_path / "missing.prob")]) == 2
    assert main(["fibredim", prob("blowup"), "--point", "nowhere"]) == 2
    off = tmp_path / "off.prob"
    off.write_text("base y1; fiber x; ideal: x - 1;")
    assert main(["flatcheck", str(off), "--at-origin"]) == 2


def test_resource_exit_code():
    assert main(["flatcheck", prob("maxideal3"), "--max-basis", "3"]) == 3
    assert main(["first-torsion-power", prob("maxideal3"), "--max-basis", "3"]) == 3


def test_env_timeout(monkeypatch):
    monkeypatch.setenv("FLATKIT_TIMEOUT", "0.000001")
    assert main(["flatcheck", prob("maxideal3")]) == 3


def test_corpus_command(tmp_path):
    assert main(["corpus", str(CORPUS), "--jobs", "2"]) == 0
    wrong = tmp_path / "wrong.prob"
    wrong.write_text((CORPUS / "blowup.prob").read_text().replace("expect: notflat", "expect: flat"))
    assert main(["corpus", str(tmp_path)]) == 4


def test_bad_power_rejected():
    with pytest.raises(SystemExit) as err:
        main(["flatcheck", prob("blowup"), "--power", "0"])
    assert err.value.code == 2
