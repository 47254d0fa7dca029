"""Job documents: strict JSON parsing, validation, execution and reports.

A job is a JSON object with keys ``field``, ``objects``, ``tasks`` and an
optional ``seed`` (plus an optional ``output`` block).  Every object node is
tracked with its source position so that schema errors point at a line and
column.  Reports contain no timings, so the structured form is a pure
function of the job, the seed and the run options.
"""

from __future__ import annotations

import json
import json.decoder
import json.scanner
import time
from dataclasses import dataclass, field as dc_field
from typing import Any

import numpy as np

from . import linalg
from .beckmod import (BeckModuleCom, check_beck_com, com_to_ring, envelope_splitting, kernel_module_com,
                      lie_to_ring, one_slot_consistency)
from .catalog import lie_by_name
from .envelopes import (U_of, augmented_ring, regular_bimodule, theta_com, theta_lie, trivial_bimodule, u_of,
                        v_of, w_of)
from .errors import (DegreeOverflow, DivPowerError, NotSquareZero, ParseError, TaskError, ValidationError,
                     WellDefinednessFailure)
from .field import FieldSpec, is_prime
from .gamma import check_beta_relations
from .kahler import (adjoint_restricted_module, comparison_omega_com, comparison_omega_lie, derivations_assoc,
                     derivations_com, derivations_rlie, hom_module, naturality_com, naturality_lie, omega_com,
                     omega_rlie, restriction_to_lie, satisfies)
from .operads import operad_com, operad_lie
from .pdcom import PdComAlgebra, check_divided_powers, check_pdcom, free_pdcom, pd_envelope, zero_pdcom
from .reports import CheckReport
from .rlie import (RestrictedLie, RestrictedModule, abelian, adjoint_module, check_restricted_module, check_rlie,
                   p_envelope, trivial_module)

DEFAULT_N = 1
DEFAULT_D = 3


# --- positioned JSON ---------------------------------------------------------------------

class Node(dict):
    """A JSON object remembering where it started."""

    line: int = 0
    column: int = 0

    def where(self) -> str:
        return f"line {self.line}, column {self.column}"


def _position(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


def _decoder(text: str) -> json.JSONDecoder:
    dec = json.JSONDecoder()

    def parse_object(s_and_end, strict, scan_once, object_hook, object_pairs_hook, memo=None):
        s, end = s_and_end
        pairs, new_end = json.decoder.JSONObject(s_and_end, strict, scan_once, None, list, memo)
        node = Node()
        node.line, node.column = _position(s, end - 1)
        for key, value in pairs:
            if key in node:
                raise ParseError(f"duplicate key {key!r}", node.line, node.column)
            node[key] = value
        return node, new_end

    dec.parse_object = parse_object
    # the C scanner ignores parse_object, so use the pure-Python one
    dec.scan_once = json.scanner.py_make_scanner(dec)
    return dec


def load_json(text: str) -> Any:
    try:
        return _decoder(text).decode(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


# --- schema helpers -------------------------------------------------------------------

def _keys(node, required: set, optional: set, what: str) -> None:
    if not isinstance(node, Node):
        raise ParseError(f"{what} must be an object", getattr(node, "line", 0), getattr(node, "column", 0))
    missing = required - node.keys()
    if missing:
        raise ParseError(f"{what} is missing {sorted(missing)}", node.line, node.column)
    unknown = node.keys() - required - optional
    if unknown:
        raise ParseError(f"{what} has unknown keys {sorted(unknown)}", node.line, node.column)


def _int(node: Node, key: str, default=None, minimum: int | None = None) -> int:
    v = node.get(key, default)
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{key!r} must be an integer", node.line, node.column)
    if minimum is not None and v < minimum:
        raise ValidationError(f"{key!r} must be >= {minimum} ({node.where()})")
    return v


def _str(node: Node, key: str, choices=None, default=None) -> str:
    v = node.get(key, default)
    if not isinstance(v, str):
        raise ParseError(f"{key!r} must be a string", node.line, node.column)
    if choices is not None and v not in choices:
        raise ValidationError(f"{key!r} must be one of {sorted(choices)}, got {v!r} ({node.where()})")
    return v


# --- job model -------------------------------------------------------------------------

@dataclass
class JobSpec:
    field: FieldSpec
    objects: dict
    tasks: list
    seed: int | None = None
    output: dict | None = None
    kinds: dict = dc_field(default_factory=dict)


@dataclass
class RunOptions:
    seed: int | None = None
    truncation_f: int | None = None
    truncation_deg: int | None = None
    strict_degree: bool = False


def parse(text: str) -> JobSpec:
    """Parse and validate a job document; objects are built eagerly."""
    doc = load_json(text)
    _keys(doc, {"field", "objects", "tasks"}, {"seed", "output"}, "job")
    F = _parse_field(doc["field"])
    seed = _int(doc, "seed") if "seed" in doc else None
    output = None
    if "output" in doc:
        _keys(doc["output"], set(), {"path", "format"}, "output")
        output = dict(doc["output"])
        if "format" in output:
            _str(doc["output"], "format", {"text", "structured"})
    if not isinstance(doc["objects"], list):
        raise ParseError("'objects' must be a list", doc.line, doc.column)
    if not isinstance(doc["tasks"], list):
        raise ParseError("'tasks' must be a list", doc.line, doc.column)
    objects, kinds = {}, {}
    for node in doc["objects"]:
        _keys(node, {"name", "kind"}, set(node.keys()) if isinstance(node, Node) else set(), "object")
        name = _str(node, "name")
        if name in objects:
            raise ValidationError(f"duplicate object name {name!r} ({node.where()})")
        kind = _str(node, "kind", set(OBJECT_BUILDERS))
        try:
            objects[name] = OBJECT_BUILDERS[kind](node, F, objects, kinds)
        except (ParseError, ValidationError):
            raise
        except DivPowerError as exc:
            raise ValidationError(f"object {name!r}: {exc} ({node.where()})") from None
        kinds[name] = kind
    tasks = []
    for node in doc["tasks"]:
        _keys(node, {"op"}, set(node.keys()) if isinstance(node, Node) else set(), "task")
        op = _str(node, "op", set(TASKS))
        allowed = TASKS[op][0] | {"op", "name"}
        unknown = node.keys() - allowed
        if unknown:
            raise ParseError(f"task {op!r} has unknown keys {sorted(unknown)}", node.line, node.column)
        for key in ("target", "module", "map"):
            if key in node and key in allowed and node[key] not in objects:
                raise ValidationError(f"task {op!r} refers to unknown object {node[key]!r} ({node.where()})")
        tasks.append(node)
    return JobSpec(F, objects, tasks, seed, output, kinds)


def _parse_field(node) -> FieldSpec:
    _keys(node, {"p"}, {"k", "modulus"}, "field")
    p = _int(node, "p")
    if not is_prime(p):
        raise ValidationError(f"p = {p} is not prime ({node.where()})")
    k = _int(node, "k", 1, minimum=1)
    modulus = node.get("modulus")
    if modulus is not None and (not isinstance(modulus, list) or not all(isinstance(c, int) for c in modulus)):
        raise ParseError("'modulus' must be a list of integers", node.line, node.column)
    try:
        return FieldSpec(p, k, modulus)
    except DivPowerError as exc:
        raise ValidationError(f"bad field: {exc} ({node.where()})") from None


# --- object builders -------------------------------------------------------------------

def _scalar(F: FieldSpec, v, node: Node) -> np.ndarray:
    if isinstance(v, bool):
        raise ParseError("booleans are not scalars", node.line, node.column)
    if isinstance(v, int):
        out = np.zeros(F.k, dtype=np.int64)
        out[0] = v % F.p
        return out
    if isinstance(v, list) and len(v) == F.k and all(isinstance(c, int) for c in v):
        return np.asarray(v, dtype=np.int64) % F.p
    raise ParseError(f"a scalar is an integer or a list of {F.k} integers", node.line, node.column)


def _vector(F: FieldSpec, v, n: int, node: Node) -> np.ndarray:
    if not isinstance(v, list) or len(v) != n:
        raise ParseError(f"expected a coefficient vector of length {n}", node.line, node.column)
    if n == 0:
        return np.zeros((0, F.k), dtype=np.int64)
    return np.stack([_scalar(F, c, node) for c in v])


def _matrix(F: FieldSpec, v, rows: int, cols: int, node: Node) -> np.ndarray:
    if not isinstance(v, list) or len(v) != rows:
        raise ParseError(f"expected a {rows}x{cols} matrix", node.line, node.column)
    if rows == 0:
        return np.zeros((0, cols, F.k), dtype=np.int64)
    return np.stack([_vector(F, r, cols, node) for r in v])


def _triples(F: FieldSpec, entries, n: int, node: Node, symmetric_sign: int) -> np.ndarray:
    """Structure constants from [i, j, coeffs]; the (j, i) entry is filled by symmetry unless given."""
    table = np.zeros((n, n, n, F.k), dtype=np.int64)
    given = set()
    if not isinstance(entries, list):
        raise ParseError("structure constants must be a list of [i, j, coeffs]", node.line, node.column)
    for e in entries:
        if not (isinstance(e, list) and len(e) == 3 and isinstance(e[0], int) and isinstance(e[1], int)):
            raise ParseError("structure constants must be [i, j, coeffs] triples", node.line, node.column)
        i, j = e[0], e[1]
        if not (0 <= i < n and 0 <= j < n):
            raise ValidationError(f"index out of range in [{i}, {j}, ...] ({node.where()})")
        if (i, j) in given:
            raise ValidationError(f"entry [{i}, {j}] given twice ({node.where()})")
        given.add((i, j))
        table[i, j] = _vector(F, e[2], n, node)
    for i, j in given:
        if (j, i) not in given:
            table[j, i] = (symmetric_sign * table[i, j]) % F.p
    return table


def _labels(node: Node, n: int, default: str) -> list[str]:
    labels = node.get("labels")
    if labels is None:
        return [default] if n == 1 else [f"{default}{i + 1}" for i in range(n)]
    if not isinstance(labels, list) or len(labels) != n or not all(isinstance(x, str) for x in labels):
        raise ParseError(f"'labels' must list {n} strings", node.line, node.column)
    return labels


def _pmap_arg(F: FieldSpec, v, n: int, node: Node):
    if v in ("zero", "identity"):
        return v
    return _matrix(F, v, n, n, node)


def _build_rlie(node: Node, F: FieldSpec, objects, kinds) -> RestrictedLie:
    if "preset" in node:
        _keys(node, {"name", "kind", "preset"}, {"dim", "pmap"}, "rlie object")
        preset = _str(node, "preset", {"sl2", "heisenberg", "abelian"})
        if preset == "abelian":
            n = _int(node, "dim", 1, minimum=0)
            L = abelian(n, _pmap_arg(F, node.get("pmap", "zero"), n, node), F)
        else:
            if "dim" in node or "pmap" in node:
                raise ParseError(f"preset {preset!r} takes no dim or pmap", node.line, node.column)
            L = lie_by_name(preset, F.p) if F.k == 1 else _lie_preset_over(preset, F)
    else:
        _keys(node, {"name", "kind", "dim", "bracket", "pmap"}, {"labels"}, "rlie object")
        n = _int(node, "dim", minimum=0)
        bracket = _triples(F, node["bracket"], n, node, -1)
        pm = _pmap_arg(F, node["pmap"], n, node)
        if isinstance(pm, str):
            pm = np.eye(n, dtype=np.int64) if pm == "identity" else np.zeros((n, n), dtype=np.int64)
        L = RestrictedLie(F, bracket, pm, _labels(node, n, "e"))
    L.name = node["name"]
    return L


def _lie_preset_over(preset: str, F: FieldSpec) -> RestrictedLie:
    from .rlie import heisenberg, sl2

    return sl2(F) if preset == "sl2" else heisenberg(F)


def _build_pdcom(node: Node, F: FieldSpec, objects, kinds) -> PdComAlgebra:
    if "preset" in node:
        _keys(node, {"name", "kind", "preset"}, {"gens", "degree", "relations"}, "pdcom object")
        preset = _str(node, "preset", {"free", "zero", "envelope"})
        if preset == "zero":
            A = zero_pdcom(F)
        elif preset == "free":
            A = free_pdcom(_int(node, "gens", 1, minimum=0), _int(node, "degree", minimum=1), F)
        else:
            rels = node.get("relations", [])
            if not isinstance(rels, list):
                raise ParseError("'relations' must be a list of exponent vectors", node.line, node.column)
            A = pd_envelope(_int(node, "gens", 1, minimum=1), rels, _int(node, "degree", minimum=1), F).envelope
    else:
        _keys(node, {"name", "kind", "dim", "mult", "pi"}, {"labels"}, "pdcom object")
        n = _int(node, "dim", minimum=0)
        mult = _triples(F, node["mult"], n, node, 1)
        A = PdComAlgebra(F, mult, _matrix(F, node["pi"], n, n, node), _labels(node, n, "a"))
    A.name = node["name"]
    return A


def _base(node: Node, objects, kinds, kind: str):
    over = _str(node, "over")
    if over not in objects:
        raise ValidationError(f"unknown object {over!r} ({node.where()})")
    if kinds[over] != kind:
        raise ValidationError(f"{over!r} is not a {kind} object ({node.where()})")
    return objects[over]


def _build_module(node: Node, F: FieldSpec, objects, kinds) -> RestrictedModule:
    L = _base(node, objects, kinds, "rlie")
    if "preset" in node:
        _keys(node, {"name", "kind", "over", "preset"}, {"dim", "f"}, "module object")
        preset = _str(node, "preset", {"trivial", "adjoint"})
        d = _int(node, "dim", 1, minimum=1) if preset == "trivial" else L.dim
        f = _semilinear(F, node.get("f", "zero"), d, node)
        M = trivial_module(L, d, f) if preset == "trivial" else adjoint_module(L, f)
    else:
        _keys(node, {"name", "kind", "over", "dim", "action"}, {"f"}, "module object")
        d = _int(node, "dim", minimum=1)
        act = _actions(F, node["action"], L.dim, d, node)
        M = RestrictedModule(L, d, act, _semilinear(F, node.get("f", "zero"), d, node))
    M.name = node["name"]
    return M


def _build_beck(node: Node, F: FieldSpec, objects, kinds) -> BeckModuleCom:
    A = _base(node, objects, kinds, "pdcom")
    if "preset" in node:
        _keys(node, {"name", "kind", "over", "preset"}, {"dim", "pi"}, "beck object")
        _str(node, "preset", {"trivial"})
        d = _int(node, "dim", 1, minimum=1)
        act = np.zeros((A.dim, d, d, F.k), dtype=np.int64)
    else:
        _keys(node, {"name", "kind", "over", "dim", "action"}, {"pi"}, "beck object")
        d = _int(node, "dim", minimum=1)
        act = _actions(F, node["action"], A.dim, d, node)
    M = BeckModuleCom(A, d, act, _semilinear(F, node.get("pi", "zero"), d, node))
    M.name = node["name"]
    return M


def _semilinear(F: FieldSpec, v, d: int, node: Node) -> np.ndarray:
    if v == "zero":
        return np.zeros((d, d, F.k), dtype=np.int64)
    if v == "identity":
        return F.embed_prime(np.eye(d, dtype=np.int64))
    return _matrix(F, v, d, d, node)


def _actions(F: FieldSpec, v, n: int, d: int, node: Node) -> np.ndarray:
    if not isinstance(v, list) or len(v) != n:
        raise ParseError(f"'action' needs {n} matrices, one per basis element", node.line, node.column)
    if n == 0:
        return np.zeros((0, d, d, F.k), dtype=np.int64)
    return np.stack([_matrix(F, m, d, d, node) for m in v])


@dataclass
class MapSpec:
    source: str
    target: str
    matrix: np.ndarray  # (dim target, dim source) over F_p


def _build_map(node: Node, F: FieldSpec, objects, kinds) -> MapSpec:
    _keys(node, {"name", "kind", "source", "target", "matrix"}, set(), "map object")
    src, tgt = _str(node, "source"), _str(node, "target")
    for o in (src, tgt):
        if o not in objects:
            raise ValidationError(f"unknown object {o!r} ({node.where()})")
    if kinds[src] != kinds[tgt] or kinds[src] not in ("rlie", "pdcom"):
        raise ValidationError(f"a map needs two algebras of the same kind ({node.where()})")
    X, Y = objects[src], objects[tgt]
    m = _matrix(F, node["matrix"], Y.dim, X.dim, node)
    if F.k != 1 and np.any(m[..., 1:]):
        raise ValidationError(f"maps must have prime-field entries ({node.where()})")
    return MapSpec(src, tgt, m[..., 0] if m.size else np.zeros((Y.dim, X.dim), dtype=np.int64))


OBJECT_BUILDERS = {"rlie": _build_rlie, "pdcom": _build_pdcom, "module": _build_module,
                   "beck": _build_beck, "map": _build_map}


# --- reports ----------------------------------------------------------------------------

def matrix_json(m) -> dict:
    m = np.asarray(m, dtype=np.int64)
    if m.ndim == 1:
        m = m[None, :]
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]) if m.ndim > 1 else 0, "data": m.tolist()}


@dataclass
class TaskResult:
    index: int
    op: str
    label: str
    status: str = "pass"
    dimensions: dict = dc_field(default_factory=dict)
    witnesses: list = dc_field(default_factory=list)
    matrices: dict = dc_field(default_factory=dict)
    details: dict = dc_field(default_factory=dict)
    seconds: float = 0.0

    def to_dict(self) -> dict:
        out = {"index": self.index, "op": self.op, "label": self.label, "status": self.status}
        for key in ("dimensions", "witnesses", "matrices", "details"):
            val = getattr(self, key)
            if val:
                out[key] = val
        return out

    def absorb(self, rep: CheckReport, key: str = "checks") -> None:
        self.details[key] = rep.to_dict()
        if not rep.ok:
            self.status = "fail"
            self.witnesses += [f"{k}: {v}" for k, v in rep.to_dict()["counterexamples"].items()]


@dataclass
class Report:
    tasks: list
    field: str
    seed: int | None

    @property
    def status(self) -> str:
        states = {t.status for t in self.tasks}
        return "error" if "error" in states else ("fail" if "fail" in states else "pass")

    def to_dict(self) -> dict:
        return {"field": self.field, "seed": self.seed, "status": self.status,
                "tasks": [t.to_dict() for t in self.tasks]}

    def structured(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def text(self, timings: bool = True) -> str:
        lines = [f"field {self.field}, seed {self.seed}: {self.status}"]
        for t in self.tasks:
            head = f"[{t.index}] {t.op} {t.label}: {t.status}"
            if timings:
                head += f" ({t.seconds:.2f}s)"
            lines.append(head)
            for k, v in t.dimensions.items():
                lines.append(f"    dim {k} = {v}")
            for w in t.witnesses:
                lines.append(f"    witness: {w}")
            for k, v in t.details.items():
                if isinstance(v, dict) and "passes" in v:
                    bad = [n for n, c in v["failures"].items() if c]
                    total = sum(v["passes"].values()) + sum(v["failures"].values())
                    lines.append(f"    {k}: {total} checks, " + (f"failed {', '.join(bad)}" if bad else "all pass"))
                elif not isinstance(v, (dict, list)):
                    lines.append(f"    {k}: {v}")
        return "\n".join(lines) + "\n"


# --- execution -----------------------------------------------------------------------------

def run(job: JobSpec, options: RunOptions | None = None) -> Report:
    """Run every task in order; module errors become per-task ``error`` results."""
    options = options or RunOptions()
    seed = options.seed if options.seed is not None else job.seed
    results = []
    for i, node in enumerate(job.tasks):
        op = node["op"]
        label = node.get("name") or node.get("target") or node.get("kind") or node.get("operad") or ""
        res = TaskResult(i, op, str(label))
        start = time.perf_counter()
        try:
            TASKS[op][1](job, node, res, _Ctx(seed, options))
        except DegreeOverflow as exc:
            res.status = "error" if options.strict_degree else "fail"
            res.witnesses.append(f"degree overflow: {exc}")
        except TaskError as exc:
            res.status = "error"
            res.witnesses.append(str(exc))
        except DivPowerError as exc:
            res.status = "error"
            res.witnesses.append(f"{type(exc).__name__}: {exc}")
        res.seconds = time.perf_counter() - start
        results.append(res)
    F = job.field
    fname = f"F_{F.p}" if F.k == 1 else f"F_{F.p}^{F.k}"
    return Report(results, fname, seed)


@dataclass
class _Ctx:
    seed: int | None
    options: RunOptions

    def need_seed(self, node: Node) -> int:
        if "seed" in node:
            return _int(node, "seed")
        if self.seed is None:
            raise TaskError(f"randomized task at {node.where()} needs a seed (job key, task key or --seed)")
        return self.seed

    def N(self, node: Node) -> int:
        if "truncation_f" in node:
            return _int(node, "truncation_f", minimum=0)
        return self.options.truncation_f if self.options.truncation_f is not None else DEFAULT_N

    def D(self, node: Node) -> int:
        if "truncation_deg" in node:
            return _int(node, "truncation_deg", minimum=1)
        return self.options.truncation_deg if self.options.truncation_deg is not None else DEFAULT_D


def _expect(node: Node, res: TaskResult, key: str, value: int) -> None:
    if "expect_dim" in node and key == "result":
        want = _int(node, "expect_dim")
        res.details["expected_dim"] = want
        if want != value:
            res.status = "fail"
            res.witnesses.append(f"expected dimension {want}, got {value}")


def _task_check(job: JobSpec, node: Node, res: TaskResult, ctx: _Ctx) -> None:
    name = node["target"]
    obj, kind = job.objects[name], job.kinds[name]
    trials = _int(node, "trials", 100, minimum=1)
    seed = ctx.need_seed(node)
    if kind == "rlie":
        res.absorb(check_rlie(obj, trials, seed))
        res.dimensions["algebra"] = obj.dim
    elif kind == "pdcom":
        res.absorb(check_pdcom(obj, trials, seed))
        if "gamma_degree" in node:
            res.absorb(check_divided_powers(obj, _int(node, "gamma_degree", minimum=1), trials, seed),
                       "divided_powers")
        res.dimensions["algebra"] = obj.dim
    elif kind == "module":
        res.absorb(check_restricted_module(obj.L, obj, trials, seed))
        res.dimensions["module"] = obj.dim
    elif kind == "beck":
        res.absorb(check_beck_com(obj, trials, seed))
        res.dimensions["module"] = obj.dim
        # reported only; the Beck checker above decides the status
        diag = one_slot_consistency(obj, 4, min(trials, 20), seed)
        res.details["one_slot_diagnostic"] = "pass" if diag.ok else f"differs: {diag.counterexamples['one_slot']}"
    else:
        raise TaskError(f"nothing to check on a {kind} object")


def _map_matrix(job: JobSpec, node: Node, src_name: str, base_name: str, base_dim: int, src_dim: int):
    if "map" not in node:
        if src_name != base_name:
            raise TaskError(f"{src_name!r} and {base_name!r} differ; give a 'map'")
        return np.eye(base_dim, dtype=np.int64)
    m = job.objects[node["map"]]
    if not isinstance(m, MapSpec) or m.source != src_name or m.target != base_name:
        raise TaskError(f"map {node['map']!r} must go from {src_name!r} to {base_name!r}")
    return m.matrix


def _task_derive(job: JobSpec, node: Node, res: TaskResult, ctx: _Ctx) -> None:
    name = node["target"]
    X, kind = job.objects[name], job.kinds[name]
    if "bimodule" in node:
        if kind != "rlie":
            raise TaskError("bimodule derivations need a restricted Lie target")
        which = _str(node, "bimodule", {"trivial", "regular"})
        u = u_of(X)
        B = regular_bimodule(u) if which == "regular" else trivial_bimodule(u)
        assoc = derivations_assoc(u, B)
        ad = adjoint_restricted_module(X, B)
        lie = derivations_rlie(np.eye(X.dim, dtype=np.int64), X, ad)
        restricted = restriction_to_lie(assoc, u)
        rank = linalg.rank(restricted, X.p) if restricted.size else 0
        res.dimensions.update({"u": u.dim, "assoc": assoc.dim, "rlie": lie.dim, "restriction_rank": rank})
        lands = satisfies(lie.system, restricted, X.p) if lie.system is not None else True
        res.details["restriction_lands_in_rlie"] = bool(lands)
        if not (assoc.dim == lie.dim == rank and lands):
            res.status = "fail"
            res.witnesses.append(f"Der_assoc {assoc.dim}, Der_rlie {lie.dim}, restriction rank {rank}")
        _expect(node, res, "result", assoc.dim)
        return
    if "module" not in node:
        raise TaskError("derive needs a 'module' or a 'bimodule'")
    M, mkind = job.objects[node["module"]], job.kinds[node["module"]]
    if kind == "rlie" and mkind == "module":
        g = _map_matrix(job, node, name, _owner(job, M.L), M.L.dim, X.dim)
        space = derivations_rlie(g, X, M)
    elif kind == "pdcom" and mkind == "beck":
        g = _map_matrix(job, node, name, _owner(job, M.A), M.A.dim, X.dim)
        space = derivations_com(g, X, M)
    else:
        raise TaskError(f"cannot take derivations of a {kind} object into a {mkind} object")
    res.dimensions["derivations"] = space.dim
    if node.get("basis", False):
        for i, b in enumerate(space.basis):
            res.matrices[f"d{i + 1}"] = matrix_json(b)
    _expect(node, res, "result", space.dim)


def _owner(job: JobSpec, algebra) -> str:
    for name, obj in job.objects.items():
        if obj is algebra:
            return name
    return ""


def _task_envelope(job: JobSpec, node: Node, res: TaskResult, ctx: _Ctx) -> None:
    name = node["target"]
    X, kind = job.objects[name], job.kinds[name]
    ring_kind = _str(node, "ring", {"u", "U", "w", "V", "augmented", "p_envelope"})
    if ring_kind == "p_envelope":
        if kind != "rlie":
            raise TaskError("p_envelope needs a Lie target")
        env = p_envelope(X.plain(), ctx.N(node))
        rank = linalg.rank(env.eta.T, X.p) if env.eta.size else 0
        res.dimensions.update({"source": X.dim, "envelope": env.hat.dim})
        res.details["basis"] = ", ".join(env.hat.labels)
        res.details["eta_injective"] = bool(rank == X.dim)
        if rank != X.dim:
            res.status = "fail"
        res.absorb(check_rlie(env.hat, 30, ctx.seed or 0))
        _expect(node, res, "result", env.hat.dim)
        return
    builders = {"u": ("rlie", lambda: u_of(X)), "U": ("rlie", lambda: U_of(X.plain(), ctx.D(node))),
                "w": ("rlie", lambda: w_of(X, ctx.N(node))), "V": ("pdcom", lambda: v_of(X, ctx.N(node))),
                "augmented": ("pdcom", lambda: augmented_ring(X))}
    need, build = builders[ring_kind]
    if kind != need:
        raise TaskError(f"ring {ring_kind!r} needs a {need} target")
    R = build()
    res.dimensions["ring"] = R.dim
    if "associative" in R.meta:
        res.details["associative_on_truncation"] = bool(R.meta["associative"])
    if node.get("check", True):
        rep = R.check(seed=ctx.seed or 0)
        if ring_kind == "U" and not R.meta.get("associative", True):
            # degree truncation of U is not an ideal; record without failing
            res.details["checks"] = rep.to_dict()
        else:
            res.absorb(rep)
    if node.get("table", False):
        if R.field.k != 1:
            raise TaskError("tables are exported over prime fields only")
        res.details["labels"] = list(R.labels)
        for i in range(R.dim):
            res.matrices[f"left({R.labels[i]})"] = matrix_json(R.left_matrix(R.basis(i)))
    _expect(node, res, "result", R.dim)


def _task_omega(job: JobSpec, node: Node, res: TaskResult, ctx: _Ctx) -> None:
    name = node["target"]
    X, kind = job.objects[name], job.kinds[name]
    truncs = node.get("truncations")
    if truncs is None:
        truncs = [ctx.N(node)]
    if not isinstance(truncs, list) or not all(isinstance(t, int) and t >= 1 for t in truncs):
        raise ParseError("'truncations' must be a list of integers >= 1", node.line, node.column)
    M = job.objects.get(node["module"]) if "module" in node else None
    for N in truncs:
        om = omega_rlie(X, N) if kind == "rlie" else (omega_com(X, N) if kind == "pdcom" else None)
        if om is None:
            raise TaskError(f"no Kähler module for a {kind} object")
        res.dimensions[f"omega(N={N})"] = om.dim
        res.details[f"relations(N={N})"] = len(om.relations)
        if M is None:
            continue
        if kind == "rlie":
            if not isinstance(M, RestrictedModule) or M.L is not X:
                raise TaskError("module must live over the target")
            hom = hom_module(om, lie_to_ring(M, N)).dim
            der = derivations_rlie(np.eye(X.dim, dtype=np.int64), X, M).dim
        else:
            if not isinstance(M, BeckModuleCom) or M.A is not X:
                raise TaskError("module must live over the target")
            hom = hom_module(om, com_to_ring(M, N)).dim
            der = derivations_com(np.eye(X.dim, dtype=np.int64), X, M).dim
        res.dimensions[f"hom(N={N})"] = hom
        res.dimensions["derivations"] = der
        if hom != der:
            res.status = "fail"
            res.witnesses.append(f"N={N}: dim Hom {hom} != dim Der {der}")


def _task_compare(job: JobSpec, node: Node, res: TaskResult, ctx: _Ctx) -> None:
    kind = _str(node, "kind", {"omega", "naturality", "theta", "square_zero", "splitting"})
    F = job.field
    if kind == "square_zero":
        D = _int(node, "degree", 4, minimum=3)
        # PD envelope of F[x]/(x^2); at p = 2 the relation imposes nothing
        gam = pd_envelope(1, [[2]], D, F).envelope
        res.dimensions["envelope"] = gam.dim
        if (2,) not in gam.index:
            res.status = "fail"
            res.details["outcome"] = "x^(2) vanishes in the envelope"
            return
        x, x2 = gam.basis(gam.index[(1,)]), gam.basis(gam.index[(2,)])
        prod = gam.mul(x, x2)
        res.details["product"] = f"({gam.format(x)}) * ({gam.format(x2)}) = {gam.format(prod)}"
        base = zero_pdcom(F)
        try:
            kernel_module_com(gam, base, np.zeros((0, gam.dim), dtype=np.int64),
                              np.zeros((gam.dim, 0), dtype=np.int64))
        except NotSquareZero as exc:
            res.witnesses.append(f"NotSquareZero: {exc.witness}")
            res.details["outcome"] = "kernel is not square-zero"
            return
        res.status = "fail"
        res.details["outcome"] = "kernel unexpectedly square-zero"
        return
    if kind == "naturality":
        if "map" not in node:
            raise TaskError("naturality needs a 'map'")
        m = job.objects[node["map"]]
        X, Y = job.objects[m.source], job.objects[m.target]
        if job.kinds[m.source] == "rlie":
            ok = naturality_lie(m.matrix, X, Y, ctx.N(node), ctx.D(node))
        else:
            ok = naturality_com(m.matrix, X, Y, ctx.N(node))
        res.details["commutes"] = bool(ok)
        if not ok:
            res.status = "fail"
        return
    name = node.get("target")
    if name is None:
        raise TaskError(f"compare {kind!r} needs a 'target'")
    X, xkind = job.objects[name], job.kinds[name]
    if kind == "theta":
        phi = theta_lie(X, ctx.D(node), ctx.N(node)) if xkind == "rlie" else theta_com(X, ctx.N(node))
        res.dimensions.update({"source": phi.source.dim, "target": phi.target.dim})
        res.absorb(phi.check_multiplicative())
    elif kind == "omega":
        eye = np.eye(X.dim, dtype=np.int64)
        try:
            cmp = (comparison_omega_lie(eye, X, X, ctx.N(node), ctx.D(node)) if xkind == "rlie"
                   else comparison_omega_com(eye, X, X, ctx.N(node)))
        except WellDefinednessFailure as exc:
            res.status = "fail"
            res.witnesses.append(f"{exc}: {exc.witness}")
            return
        res.dimensions.update({"source": cmp.source.dim, "target": cmp.target.dim})
        res.details["relations_checked"] = cmp.checked
        res.matrices["comparison"] = matrix_json(cmp.matrix)
    else:
        if "module" not in node:
            raise TaskError("splitting needs a 'module'")
        M = job.objects[node["module"]]
        if not isinstance(M, RestrictedModule):
            raise TaskError("splitting needs a restricted module")
        if np.any(M.action[..., 1:]):
            raise TaskError("splitting runs over prime fields only")
        sp = envelope_splitting(X.plain(), M.action[..., 0], ctx.N(node))
        res.dimensions.update(dict(zip(("total", "base", "fiber"), (int(d) for d in sp.dims))))
        res.absorb(sp.report)


def _task_relations(job: JobSpec, node: Node, res: TaskResult, ctx: _Ctx) -> None:
    operad = _str(node, "operad", {"com", "lie"})
    D = _int(node, "degree", minimum=1)
    dim_v = _int(node, "dim_v", 1, minimum=1)
    trials = _int(node, "trials", 100, minimum=1)
    seed = ctx.need_seed(node)
    P = (operad_com if operad == "com" else operad_lie)(D, job.field.p)
    rep = check_beta_relations(P, dim_v, D, trials, job.field, seed, strict=ctx.options.strict_degree)
    res.absorb(rep)


TASKS = {
    "check": ({"target", "trials", "seed", "gamma_degree"}, _task_check),
    "derive": ({"target", "module", "bimodule", "map", "basis", "expect_dim"}, _task_derive),
    "envelope": ({"target", "ring", "truncation_f", "truncation_deg", "check", "table", "expect_dim"},
                 _task_envelope),
    "omega": ({"target", "module", "truncation_f", "truncations"}, _task_omega),
    "compare": ({"kind", "target", "module", "map", "degree", "truncation_f", "truncation_deg"}, _task_compare),
    "relations": ({"operad", "degree", "dim_v", "trials", "seed"}, _task_relations),
}


def run_text(text: str, options: RunOptions | None = None) -> Report:
    return run(parse(text), options)
