import json
import shutil
import subprocess
import sys
from pathlib import Path

import pytest

from divpower.cli import main

GALLERY = Path(__file__).resolve().parent.parent / "gallery"


def test_run_gallery_file(capsys):
    assert main(["run", str(GALLERY / "heisenberg_f2.json"), "--no-timings"]) == 0
    assert ": pass" in capsys.readouterr().out


def test_run_failing_job(tmp_path):
    doc = {"field": {"p": 2}, "objects": [{"name": "H", "kind": "rlie", "preset": "heisenberg"}],
           "tasks": [{"op": "envelope", "target": "H", "ring": "u", "expect_dim": 7}]}
    path = tmp_path / "job.json"
    path.write_text(json.dumps(doc))
    assert main(["run", str(path)]) == 1


def test_run_parse_error_and_missing_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"field": {"p": 2},\n "objects": [,]}')
    assert main(["run", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["run", str(tmp_path / "missing.json")]) == 2


@pytest.mark.parametrize("argv,code", [
    (["check", "sl2", "-p", "3"], 0),
    (["derive", "heisenberg"], 0),
    (["derive", "gamma3", "--pi", "identity"], 0),
    (["envelope", "heisenberg"], 0),
    (["omega", "heisenberg"], 0),
    (["compare", "square_zero"], 0),
    (["compare", "square_zero", "-p", "3"], 1),
    (["compare", "omega", "heisenberg"], 0),
    (["compare", "naturality", "gamma3"], 0),
    (["compare", "splitting", "heisenberg"], 0),
    (["compare", "theta", "gamma3"], 0),
    (["relations", "--operad", "lie", "--degree", "3", "--dim-v", "2", "--trials", "20"], 0),
    (["check", "nosuch"], 2),
    (["relations", "--degree", "3", "--trials", "20", "--strict-degree"], 2),
])
def test_subcommand_exit_codes(argv, code, capsys):
    assert main(argv + ["--no-timings"]) == code


def test_square_zero_witness(capsys):
    main(["compare", "square_zero", "--no-timings"])
    assert "x^(3)" in capsys.readouterr().out


def test_output_file_and_structured_format(tmp_path):
    out = tmp_path / "report.json"
    assert main(["envelope", "heisenberg", "--format", "structured", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["status"] == "pass"
    assert doc["tasks"][0]["dimensions"]["ring"] == 8


@pytest.mark.skipif(shutil.which("divpower") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["divpower", "check", "heisenberg", "--trials", "10"], capture_output=True, text=True)
    assert proc.returncode == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "divpower", "check", "nosuch"], capture_output=True, text=True)
    assert proc.returncode == 2 and "unknown example" in proc.stderr
