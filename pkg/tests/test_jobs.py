import json
import time
from pathlib import Path

import pytest

from divpower.errors import ParseError, ValidationError
from divpower.jobs import RunOptions, load_json, parse, run, run_text

GALLERY = Path(__file__).resolve().parent.parent / "gallery"


def job(objects=(), tasks=(), **extra) -> str:
    doc = {"field": {"p": 2}, "objects": list(objects), "tasks": list(tasks), **extra}
    return json.dumps(doc, indent=1)


def test_malformed_json_reports_position():
    text = '{"field": {"p": 2},\n "objects": [,],\n "tasks": []}'
    with pytest.raises(ParseError) as exc:
        load_json(text)
    assert exc.value.line == 2


def test_duplicate_keys_are_rejected():
    text = '{"field": {"p": 2, "p": 3}, "objects": [], "tasks": []}'
    with pytest.raises(ParseError, match="duplicate key 'p'") as exc:
        parse(text)
    assert (exc.value.line, exc.value.column) == (1, 11)


def test_unknown_task_key_points_at_the_task():
    text = ('{"field": {"p": 2},\n'
            ' "objects": [{"name": "H", "kind": "rlie", "preset": "heisenberg"}],\n'
            ' "tasks": [\n'
            '   {"op": "check", "target": "H", "trails": 5}]}')
    with pytest.raises(ParseError, match="trails") as exc:
        parse(text)
    assert (exc.value.line, exc.value.column) == (4, 4)


def test_unknown_top_level_key():
    with pytest.raises(ParseError, match="unknown keys"):
        parse(job(extra_key=1))


@pytest.mark.parametrize("p", [1, 4, 9])
def test_non_prime_characteristic(p):
    with pytest.raises(ValidationError, match="not prime"):
        parse(json.dumps({"field": {"p": p}, "objects": [], "tasks": []}))


def test_duplicate_names_and_unknown_references():
    obj = {"name": "H", "kind": "rlie", "preset": "heisenberg"}
    with pytest.raises(ValidationError, match="duplicate object name"):
        parse(job([obj, obj]))
    with pytest.raises(ValidationError, match="unknown object"):
        parse(job([obj], [{"op": "check", "target": "G"}]))


def test_module_errors_surface_as_validation_errors():
    # sl2 needs an odd characteristic
    with pytest.raises(ValidationError, match="sl2"):
        parse(job([{"name": "S", "kind": "rlie", "preset": "sl2"}]))


def test_explicit_structure_constants():
    text = job([{"name": "H", "kind": "rlie", "dim": 3, "bracket": [[0, 1, [0, 0, 1]]], "pmap": "zero"}],
               [{"op": "envelope", "target": "H", "ring": "u", "expect_dim": 8}])
    rep = run_text(text)
    assert rep.status == "pass"


def test_empty_task_list_passes():
    rep = run_text(job())
    assert rep.status == "pass" and rep.tasks == []


def test_randomized_tasks_need_a_seed():
    text = job([{"name": "H", "kind": "rlie", "preset": "heisenberg"}], [{"op": "check", "target": "H"}])
    assert run_text(text).status == "error"
    assert run_text(text, RunOptions(seed=3)).status == "pass"
    assert run(parse(job([{"name": "H", "kind": "rlie", "preset": "heisenberg"}],
                         [{"op": "check", "target": "H"}], seed=5))).seed == 5


def test_expected_dimension_mismatch_fails():
    text = job([{"name": "H", "kind": "rlie", "preset": "heisenberg"}],
               [{"op": "envelope", "target": "H", "ring": "u", "expect_dim": 9}])
    rep = run_text(text)
    assert rep.status == "fail"
    assert "expected dimension 9, got 8" in rep.tasks[0].witnesses[0]


def test_truncation_precedence():
    objs = [{"name": "H", "kind": "rlie", "preset": "heisenberg"}]
    plain = job(objs, [{"op": "omega", "target": "H"}])
    pinned = job(objs, [{"op": "omega", "target": "H", "truncation_f": 2}])
    assert "omega(N=1)" in run_text(plain).tasks[0].dimensions
    assert "omega(N=3)" in run_text(plain, RunOptions(truncation_f=3)).tasks[0].dimensions
    assert "omega(N=2)" in run_text(pinned, RunOptions(truncation_f=3)).tasks[0].dimensions


def test_degree_overflow_fails_or_errors():
    text = job(tasks=[{"op": "relations", "operad": "com", "degree": 3, "trials": 20, "seed": 0}])
    assert run_text(text).status == "pass"
    strict = run_text(text, RunOptions(strict_degree=True))
    assert strict.status == "error"
    assert "degree overflow" in strict.tasks[0].witnesses[0]


def test_structured_report_is_deterministic():
    text = (GALLERY / "heisenberg_f2.json").read_text()
    a = run_text(text).structured()
    b = run_text(text).structured()
    assert a == b
    assert "seconds" not in a


def test_gallery_passes_quickly():
    start = time.perf_counter()
    for path in sorted(GALLERY.glob("*.json")):
        rep = run_text(path.read_text())
        assert rep.status == "pass", (path.name, rep.text(timings=False))
    assert time.perf_counter() - start < 60
