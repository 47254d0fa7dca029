"""Command-line front end.

Each subcommand builds a one-task job from the named catalog examples and runs
it through the same machinery as ``run <file>``.  Exit codes: 0 when every task
passes, 1 when any task fails, 2 on parse, validation or task errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import DivPowerError, ParseError, ValidationError
from .jobs import Report, RunOptions, parse, run

LIE_PRESETS = {
    "abelian1-zero": {"preset": "abelian", "dim": 1, "pmap": "zero"},
    "abelian1-id": {"preset": "abelian", "dim": 1, "pmap": "identity"},
    "abelian2-zero": {"preset": "abelian", "dim": 2, "pmap": "zero"},
    "heisenberg": {"preset": "heisenberg"},
    "sl2": {"preset": "sl2"},
}


def _com_preset(name: str) -> dict | None:
    if name == "zero":
        return {"preset": "zero"}
    if name.startswith("gamma") and name[5:].isdigit():
        return {"preset": "free", "gens": 1, "degree": int(name[5:])}
    if name == "square-zero":
        return {"preset": "envelope", "gens": 1, "relations": [[2]], "degree": 1}
    return None


def _object(name: str) -> dict:
    if name in LIE_PRESETS:
        return {"name": name, "kind": "rlie", **LIE_PRESETS[name]}
    com = _com_preset(name)
    if com is not None:
        return {"name": name, "kind": "pdcom", **com}
    choices = sorted(LIE_PRESETS) + ["zero", "square-zero", "gammaD"]
    raise ValidationError(f"unknown example {name!r}; choose from {', '.join(choices)}")


def _job(args, objects: list[dict], task: dict) -> str:
    # one-off subcommands default to seed 0 so the report still names its seed
    seed = args.seed if args.seed is not None else 0
    doc = {"field": {"p": args.p, "k": args.k}, "objects": objects, "tasks": [task], "seed": seed}
    return json.dumps(doc)


def _build(args) -> str:
    cmd = args.command
    if cmd == "check":
        return _job(args, [_object(args.example)], {"op": "check", "target": args.example,
                                                    "trials": args.trials})
    if cmd == "derive":
        obj = _object(args.example)
        if obj["kind"] == "rlie":
            return _job(args, [obj], {"op": "derive", "target": args.example, "bimodule": args.bimodule})
        module = {"name": "M", "kind": "beck", "over": args.example, "preset": "trivial", "pi": args.pi}
        return _job(args, [obj, module], {"op": "derive", "target": args.example, "module": "M"})
    if cmd == "envelope":
        obj = _object(args.example)
        ring = args.ring or ("u" if obj["kind"] == "rlie" else "V")
        return _job(args, [obj], {"op": "envelope", "target": args.example, "ring": ring,
                                  "table": args.table})
    if cmd == "omega":
        return _job(args, [_object(args.example)], {"op": "omega", "target": args.example})
    if cmd == "compare":
        if args.kind == "square_zero":
            return _job(args, [], {"op": "compare", "kind": "square_zero", "degree": args.degree})
        if args.example is None:
            raise ValidationError(f"compare {args.kind} needs an example name")
        obj = _object(args.example)
        if args.kind == "naturality":
            n = _example_dim(args, obj)
            ident = [[int(i == j) for j in range(n)] for i in range(n)]
            mp = {"name": "id", "kind": "map", "source": args.example, "target": args.example, "matrix": ident}
            return _job(args, [obj, mp], {"op": "compare", "kind": "naturality", "map": "id"})
        if args.kind == "splitting":
            module = {"name": "M", "kind": "module", "over": args.example, "preset": "adjoint"}
            return _job(args, [obj, module], {"op": "compare", "kind": "splitting", "target": args.example,
                                              "module": "M"})
        return _job(args, [obj], {"op": "compare", "kind": args.kind, "target": args.example})
    if cmd == "relations":
        return _job(args, [], {"op": "relations", "operad": args.operad, "degree": args.degree,
                               "dim_v": args.dim_v, "trials": args.trials})
    raise ValidationError(f"unknown command {cmd!r}")


def _example_dim(args, obj: dict) -> int:
    text = json.dumps({"field": {"p": args.p, "k": args.k}, "objects": [obj], "tasks": []})
    return parse(text).objects[obj["name"]].dim


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="seed for randomized checks")
    common.add_argument("--truncation-f", type=int, default=None, metavar="N",
                        help="f-power truncation for w(L), V(A) and envelopes")
    common.add_argument("--truncation-deg", type=int, default=None, metavar="D",
                        help="degree truncation for U(L)")
    common.add_argument("--format", choices=("text", "structured"), default="text")
    common.add_argument("--strict-degree", action="store_true",
                        help="treat degree overflow in truncated free algebras as an error")
    common.add_argument("--no-timings", action="store_true", help="omit wall-clock times from text output")
    common.add_argument("-o", "--output", type=Path, default=None, help="write the report to a file")

    example = argparse.ArgumentParser(add_help=False)
    example.add_argument("-p", type=int, default=2, help="characteristic")
    example.add_argument("-k", type=int, default=1, help="degree of the field extension")

    ap = argparse.ArgumentParser(prog="divpower", description="Exact checks for divided power algebras.")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("run", parents=[common], help="run a JSON job file")
    s.add_argument("file", type=Path)

    s = sub.add_parser("check", parents=[common, example], help="axiom suite for an example")
    s.add_argument("example")
    s.add_argument("--trials", type=int, default=100)

    s = sub.add_parser("derive", parents=[common, example], help="derivation spaces")
    s.add_argument("example")
    s.add_argument("--bimodule", choices=("trivial", "regular"), default="regular")
    s.add_argument("--pi", choices=("zero", "identity"), default="zero", help="π on the trivial Com module")

    s = sub.add_parser("envelope", parents=[common, example], help="enveloping ring tables")
    s.add_argument("example")
    s.add_argument("--ring", choices=("u", "U", "w", "V", "augmented", "p_envelope"))
    s.add_argument("--table", action="store_true", help="include left multiplication matrices")

    s = sub.add_parser("omega", parents=[common, example], help="Kähler module presentation")
    s.add_argument("example")

    s = sub.add_parser("compare", parents=[common, example], help="comparison maps and counterexamples")
    s.add_argument("kind", choices=("omega", "naturality", "theta", "square_zero", "splitting"))
    s.add_argument("example", nargs="?")
    s.add_argument("--degree", type=int, default=4, help="truncation degree for square_zero")

    s = sub.add_parser("relations", parents=[common, example], help="random relation suite in free algebras")
    s.add_argument("--operad", choices=("com", "lie"), default="com")
    s.add_argument("--degree", type=int, default=4)
    s.add_argument("--dim-v", type=int, default=1)
    s.add_argument("--trials", type=int, default=100)
    return ap


def _emit(report: Report, args, output_spec: dict | None) -> None:
    fmt = args.format
    path = args.output
    if output_spec:
        fmt = output_spec.get("format", fmt) if args.format == "text" else fmt
        if path is None and "path" in output_spec:
            path = Path(output_spec["path"])
    text = report.structured() if fmt == "structured" else report.text(timings=not args.no_timings)
    if path is not None:
        path.write_text(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    ap = _parser()
    args = ap.parse_args(argv)
    options = RunOptions(args.seed, args.truncation_f, args.truncation_deg, args.strict_degree)
    try:
        if args.command == "run":
            try:
                text = args.file.read_text()
            except OSError as exc:
                print(f"error: cannot read {args.file}: {exc.strerror}", file=sys.stderr)
                return 2
        else:
            text = _build(args)
        job = parse(text)
        report = run(job, options)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return 2
    except DivPowerError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    _emit(report, args, job.output)
    return {"pass": 0, "fail": 1, "error": 2}[report.status]


if __name__ == "__main__":
    sys.exit(main())
