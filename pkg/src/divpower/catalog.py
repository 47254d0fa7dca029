"""Named example algebras and modules used by the CLI, the gallery and the tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beckmod import BeckModuleCom, com_examples, lie_examples, random_beck_com, random_beck_lie
from .errors import InvalidArgs
from .field import FieldSpec
from .pdcom import PdComAlgebra, free_pdcom, zero_pdcom
from .rlie import RestrictedLie, abelian, adjoint_module, heisenberg, sl2, trivial_module


@dataclass
class Example:
    name: str
    algebra: object
    modules: list  # (name, module) pairs


def lie_by_name(name: str, p: int) -> RestrictedLie:
    F = FieldSpec(p)
    table = {
        "abelian1-zero": lambda: abelian(1, "zero", F),
        "abelian1-id": lambda: abelian(1, "identity", F),
        "abelian2-zero": lambda: abelian(2, "zero", F),
        "heisenberg": lambda: heisenberg(F),
        "sl2": lambda: sl2(F),
    }
    if name not in table:
        raise InvalidArgs(f"unknown Lie example {name!r}; choose from {sorted(table)}")
    return table[name]()


def com_by_name(name: str, p: int) -> PdComAlgebra:
    F = FieldSpec(p)
    if name == "zero":
        return zero_pdcom(F)
    if name == "square-zero":
        return com_examples(p)[1]
    if name.startswith("gamma") and name[5:].isdigit():
        return free_pdcom(1, int(name[5:]), F)
    raise InvalidArgs(f"unknown Com example {name!r}; choose from zero, square-zero, gammaD")


def lie_grid(p: int, seed: int = 0) -> list[Example]:
    """Restricted Lie examples with a trivial, an adjoint-type and a random module each."""
    rng = np.random.default_rng(seed)
    out = []
    for L in lie_examples(p):
        mods = [("trivial, f=0", trivial_module(L, 1)),
                ("trivial, f=id", trivial_module(L, 1, np.eye(1, dtype=np.int64)))]
        if not np.any(L.pmap_on_basis):
            mods.append(("adjoint, f=0", adjoint_module(L, np.zeros((L.dim, L.dim), dtype=np.int64))))
        mods.append(("random", random_beck_lie(rng, p, base=L)))
        out.append(Example(L.name, L, mods))
    return out


def com_grid(p: int, seed: int = 0) -> list[Example]:
    """PD examples with trivial modules (π_M zero or identity) and a random module."""
    rng = np.random.default_rng(seed)
    out = []
    for A in com_examples(p):
        zero_act = np.zeros((A.dim, 1, 1), dtype=np.int64)
        mods = [("trivial, pi=0", BeckModuleCom(A, 1, zero_act, np.zeros((1, 1), dtype=np.int64), "trivial")),
                ("trivial, pi=id", BeckModuleCom(A, 1, zero_act, np.eye(1, dtype=np.int64), "trivial"))]
        mods.append(("random", random_beck_com(rng, p, base=A)))
        out.append(Example(A.name, A, mods))
    return out

