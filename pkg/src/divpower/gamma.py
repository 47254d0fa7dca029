"""Truncated free divided power algebras Γ(P, V) and the operations β_{x,r}.

The degree-n piece lives in P(n) ⊗ V^{⊗n}.  A tensor basis vector is
(operad basis b, word w) with flat index ``b * dimV**n + code(w)``, where the
first tensor factor is the most significant digit of ``code(w)``.  A
permutation σ moves the tensor factor at position j to position σ(j) and acts
on the operad factor as in :mod:`divpower.operads`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .combinatorics import (Composition, Permutation, block_permutation, compose_split,
                            compositions_of, coset_reps, diamond, permute_parts, refine,
                            wreath_elements, young_elements)
from .errors import ArityTooLarge, DegreeOverflow, InvalidArgs, ShapeMismatch
from .field import FieldSpec, base_p_digits, factorial_mod
from .operads import OperadData
from .reports import CheckReport


class GammaElement:
    """Element of Γ(P, V) truncated at degree D, stored by homogeneous degree."""

    __slots__ = ("algebra", "comps")

    def __init__(self, algebra: "FreeGamma", comps: dict | None = None):
        self.algebra = algebra
        self.comps = {}
        for n, v in (comps or {}).items():
            v = np.asarray(v, dtype=np.int64) % algebra.field.p
            if v.shape != (algebra.tensor_dim(n), algebra.field.k):
                raise ShapeMismatch(f"degree {n} component has shape {v.shape}")
            if np.any(v):
                self.comps[int(n)] = v

    @property
    def degrees(self) -> list[int]:
        return sorted(self.comps)

    def component(self, n: int) -> np.ndarray:
        v = self.comps.get(n)
        if v is None:
            return self.algebra.field.zeros(self.algebra.tensor_dim(n))
        return v

    def is_zero(self) -> bool:
        return not self.comps

    def is_homogeneous(self) -> bool:
        return len(self.comps) <= 1

    def __add__(self, other: "GammaElement") -> "GammaElement":
        out = dict(self.comps)
        for n, v in other.comps.items():
            out[n] = out[n] + v if n in out else v
        return GammaElement(self.algebra, out)

    def __neg__(self):
        return GammaElement(self.algebra, {n: -v for n, v in self.comps.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, lam) -> "GammaElement":
        F = self.algebra.field
        return GammaElement(self.algebra, {n: F.scale(lam, v) for n, v in self.comps.items()})

    def __eq__(self, other):
        return (isinstance(other, GammaElement) and self.comps.keys() == other.comps.keys()
                and all(np.array_equal(v, other.comps[n]) for n, v in self.comps.items()))

    def __repr__(self):
        return f"GammaElement(degrees={self.degrees})"


class FreeGamma:
    """Γ(P, V) = ⊕_{n<=D} (P(n) ⊗ V^{⊗n})^{Σ_n} with β-operations."""

    def __init__(self, operad: OperadData, dim_v: int, D: int, field: FieldSpec | None = None,
                 strict: bool = False):
        if D > operad.max_arity:
            raise ArityTooLarge(f"truncation {D} exceeds the operad arity bound {operad.max_arity}")
        self.operad = operad
        self.dim_v = int(dim_v)
        self.D = int(D)
        self.field = field or FieldSpec(operad.p)
        if self.field.p != operad.p:
            raise InvalidArgs("operad and field characteristics differ")
        self.strict = strict
        self._act_cache: dict = {}
        self._sum_cache: dict = {}
        self._basis_cache: dict = {}
        self._reps_cache: dict = {}

    @property
    def p(self) -> int:
        return self.field.p

    def tensor_dim(self, n: int) -> int:
        return self.operad.dim(n) * self.dim_v**n

    # --- Σ_n action on P(n) ⊗ V^{⊗n} -----------------------------------------
    def _word_matrix(self, sigma: Permutation) -> np.ndarray:
        n, d = sigma.n, self.dim_v
        size = d**n
        mat = np.zeros((size, size), dtype=np.int64)
        for idx, word in enumerate(itertools.product(range(d), repeat=n)):
            new = [0] * n
            for j, c in enumerate(word):
                new[sigma(j)] = c
            code = 0
            for c in new:
                code = code * d + c
            mat[code, idx] = 1
        return mat

    def act_matrix(self, sigma: Permutation) -> np.ndarray:
        key = sigma.images
        mat = self._act_cache.get(key)
        if mat is None:
            mat = np.kron(self.operad.action_matrix(sigma.n, sigma), self._word_matrix(sigma)) % self.p
            self._act_cache[key] = mat
        return mat

    def act(self, sigma: Permutation, v: np.ndarray) -> np.ndarray:
        return linalg.mod_matmul(self.act_matrix(sigma), v, self.p)

    def _generators(self, n: int) -> list[Permutation]:
        return [Permutation.transposition(n, a, a + 1) for a in range(n - 1)]

    def invariant_basis(self, n: int) -> np.ndarray:
        """Rows spanning (P(n) ⊗ V^{⊗n})^{Σ_n} over F_p."""
        if n < 1 or n > self.D:
            raise ArityTooLarge(f"degree {n} outside 1..{self.D}")
        if n not in self._basis_cache:
            eye = np.eye(self.tensor_dim(n), dtype=np.int64)
            eqs = [(self.act_matrix(t) - eye) % self.p for t in self._generators(n)]
            self._basis_cache[n] = linalg.kernel(np.vstack(eqs), self.p) if eqs else eye
        return self._basis_cache[n]

    def dims(self) -> dict[int, int]:
        return {n: self.invariant_basis(n).shape[0] for n in range(1, self.D + 1)}

    def is_invariant_component(self, n: int, v: np.ndarray) -> bool:
        return all(np.array_equal(self.act(t, v), v % self.p) for t in self._generators(n))

    def assert_invariant(self, elem: GammaElement):
        for n, v in elem.comps.items():
            if not self.is_invariant_component(n, v):
                raise AssertionError(f"degree {n} component is not Σ_{n}-invariant")

    # --- constructors ------------------------------------------------------
    def zero(self) -> GammaElement:
        return GammaElement(self, {})

    def homogeneous(self, n: int, coords) -> GammaElement:
        """Element of degree n from coordinates in the invariant basis."""
        basis = self.invariant_basis(n)
        coords = np.asarray(coords, dtype=np.int64)
        if coords.ndim == 1:
            coords = self.field.embed_prime(coords)
        vec = np.einsum("bt,bc->tc", basis, coords) % self.p
        return GammaElement(self, {n: vec})

    def generator(self, index: int = 0) -> GammaElement:
        """The degree-one element 1_P ⊗ v_index."""
        v = self.field.zeros(self.tensor_dim(1))
        v[index] = self.field.one()
        return GammaElement(self, {1: v})

    def random_homogeneous(self, rng, n: int) -> GammaElement:
        basis = self.invariant_basis(n)
        coords = self.field.random(rng, basis.shape[0])
        return self.homogeneous(n, coords)

    def random_element(self, rng, degrees: Sequence[int]) -> GammaElement:
        out = self.zero()
        for n in degrees:
            out = out + self.random_homogeneous(rng, n)
        return out

    def coordinates(self, elem: GammaElement, n: int) -> np.ndarray:
        """Coordinates of the degree-n component in the invariant basis."""
        basis = self.invariant_basis(n)
        v = elem.component(n)
        out = []
        for c in range(self.field.k):
            sol = linalg.solve(basis.T, v[:, c], self.p)
            if sol is None:
                raise InvalidArgs("component is not invariant")
            out.append(sol[0])
        return np.stack(out, axis=1) if out else self.field.zeros(basis.shape[0])

    # --- the operations β_{x,r} -------------------------------------------------
    def _as_operad_vector(self, x, n: int) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        if x.ndim == 1:
            x = self.field.embed_prime(x)
        if x.shape != (self.operad.dim(n), self.field.k):
            raise ShapeMismatch("operation has the wrong size for its arity")
        return x % self.p

    def _sum_matrix(self, N: int, layout: tuple) -> np.ndarray:
        key = (N, layout)
        mat = self._sum_cache.get(key)
        if mat is None:
            reps = coset_reps(Composition((N,)), wreath_elements(layout))
            mat = np.zeros((self.tensor_dim(N),) * 2, dtype=np.int64)
            for tau in reps:
                mat += self.act_matrix(tau)
            mat %= self.p
            self._sum_cache[key] = mat
        return mat

    def _composite(self, x: np.ndarray, inputs: list[np.ndarray], degrees: list[int]) -> np.ndarray:
        """x(y_1, .., y_n) in P(N) ⊗ V^{⊗N}, words concatenated in slot order."""
        F = self.field
        n = len(inputs)
        G = self.operad.composition(n, degrees)
        vec = x
        for y, d in zip(inputs, degrees):
            y3 = y.reshape(self.operad.dim(d), self.dim_v**d, F.k)
            lead = vec.ndim - 1
            vec = F.mul(vec.reshape(vec.shape[:-1] + (1, 1, F.k)),
                        y3.reshape((1,) * lead + y3.shape))
        # axes of vec: xP, (yP, yW) per input, k ; of G: xP, yP..., zP
        nin = len(inputs)
        vec_axes = [0] + [a for i in range(nin) for a in (1 + 2 * i, 2 + 2 * i)] + [51]
        g_axes = [0] + [1 + 2 * i for i in range(nin)] + [50]
        out_axes = [50] + [2 + 2 * i for i in range(nin)] + [51]
        res = np.einsum(vec, vec_axes, G, g_axes, out_axes) % self.p
        return res.reshape(-1, F.k)

    def _beta_homogeneous(self, x: np.ndarray, slots: list[tuple[int, np.ndarray, int]]) -> np.ndarray | None:
        """β for homogeneous nonzero args: slots are (degree, component, multiplicity)."""
        N = sum(d * m for d, _, m in slots)
        if N > self.D:
            if self.strict:
                raise DegreeOverflow(f"output degree {N} exceeds truncation {self.D}")
            return None
        inputs, degrees = [], []
        for d, comp, m in slots:
            inputs += [comp] * m
            degrees += [d] * m
        vec = self._composite(x, inputs, degrees)
        layout = tuple((d, m) for d, _, m in slots)
        return linalg.mod_matmul(self._sum_matrix(N, layout), vec, self.p)

    def beta(self, x, r, args: Sequence[GammaElement]) -> GammaElement:
        """β_{x,r}(args) with multi-degree arguments expanded by additivity."""
        r = Composition(r)
        if len(args) != len(r):
            raise ShapeMismatch("need one argument per part of r")
        n = r.n
        if n < 1:
            raise InvalidArgs("composition must have positive total")
        if n > self.operad.max_arity:
            raise ArityTooLarge(f"arity {n} exceeds operad bound")
        x = self._as_operad_vector(x, n)
        live = [(ri, a) for ri, a in zip(r, args) if ri > 0]
        choices = []
        for ri, a in live:
            comps = [(d, a.comps[d]) for d in a.degrees]
            if not comps:
                return self.zero()
            options = []
            for split in compositions_of(ri, len(comps)):
                options.append([(d, v, m) for (d, v), m in zip(comps, split) if m > 0])
            choices.append(options)
        total: dict[int, np.ndarray] = {}
        for combo in itertools.product(*choices):
            slots = [s for group in combo for s in group]
            val = self._beta_homogeneous(x, slots)
            if val is not None:
                N = sum(d * m for d, _, m in slots)
                total[N] = (total[N] + val) % self.p if N in total else val
        out = GammaElement(self, total)
        self.assert_invariant(out)
        return out

    # --- helpers used by relation (β4) and (β8) ------------------------------------
    def orbit_sum(self, x: np.ndarray, big: Composition, small) -> np.ndarray:
        reps = coset_reps(big, small)
        out = np.zeros_like(x)
        for s in reps:
            out = (out + self.operad.act(s, x)) % self.p
        return out

    def composite_operation(self, x: np.ndarray, r: Composition, ys: Sequence[np.ndarray],
                            qs: Sequence[Composition]) -> tuple[np.ndarray, Composition]:
        """Σ_τ τ·ζ·x(y_1^{r_1}, .., y_s^{r_s}) together with r ⋄ q."""
        F = self.field
        ks = [Composition(q).n for q in qs]
        degrees, inputs = [], []
        for ri, k, y in zip(r, ks, ys):
            degrees += [k] * ri
            inputs += [y] * ri
        K = sum(degrees)
        if K > self.operad.max_arity:
            raise ArityTooLarge("composite arity exceeds operad bound")
        if inputs:
            G = self.operad.composition(len(inputs), degrees)
            vec = x
            for y in inputs:
                lead = vec.ndim - 1
                vec = F.mul(vec.reshape(vec.shape[:-1] + (1, F.k)), y.reshape((1,) * lead + y.shape))
            nin = len(inputs)
            res = np.einsum(vec, list(range(nin + 1)) + [51], G, list(range(nin + 1)) + [50], [50, 51]) % self.p
        else:
            raise InvalidArgs("empty composite")
        target = diamond(r, qs)
        zeta, conj = self._regrouping(r, qs)
        res = self.operad.act(zeta, res)
        reps = coset_reps(target, conj)
        out = np.zeros_like(res)
        for tau in reps:
            out = (out + self.operad.act(tau, res)) % self.p
        return out, target

    def _regrouping(self, r, qs):
        key = (tuple(r), tuple(tuple(q) for q in qs))
        if key in self._reps_cache:
            return self._reps_cache[key]
        qs = [Composition(q) for q in qs]
        target = diamond(r, qs)
        tstart = target.starts
        block_index = {}
        b = 0
        for i, q in enumerate(qs):
            for j in range(len(q)):
                block_index[(i, j)] = b
                b += 1
        images = []
        for i, (ri, q) in enumerate(zip(r, qs)):
            for c in range(ri):
                for j, qj in enumerate(q):
                    for t in range(qj):
                        images.append(tstart[block_index[(i, j)]] + c * qj + t)
        zeta = Permutation(images)
        zinv = zeta.inverse()
        # W = prod_i (Σ_{q_i})^{r_i} ⋊ Σ_{r_i} in the composite's input order
        factors = []
        start = 0
        for ri, q in zip(r, qs):
            k = q.n
            elems = []
            inner = young_elements(q)
            for outer in itertools.permutations(range(ri)):
                for ins in itertools.product(inner, repeat=ri):
                    im = [0] * (ri * k)
                    for c in range(ri):
                        for t in range(k):
                            im[c * k + t] = outer[c] * k + ins[c](t)
                    elems.append(tuple(start + v for v in im))
            factors.append(elems)
            start += ri * k
        conj = []
        for combo in itertools.product(*factors):
            w = Permutation([v for part in combo for v in part])
            conj.append(zeta * w * zinv)
        self._reps_cache[key] = (zeta, conj)
        return zeta, conj


def gamma_free(P: OperadData, dim_v: int, D: int, field: FieldSpec | None = None,
               strict: bool = False) -> FreeGamma:
    return FreeGamma(P, dim_v, D, field, strict)


def beta_eval(algebra: FreeGamma, x, r, args) -> GammaElement:
    return algebra.beta(x, r, args)


# --- the norm map -------------------------------------------------------------------

@dataclass
class NormMap:
    matrix: np.ndarray
    rank: int
    coinvariant_dim: int
    invariant_dim: int


def norm_map(P: OperadData, dim_v: int, n: int, field: FieldSpec | None = None) -> NormMap:
    """Tr(v) = Σ_σ σ·v from (P(n)⊗V^{⊗n})_{Σ_n} to the invariants."""
    alg = FreeGamma(P, dim_v, n, field)
    p = alg.p
    size = alg.tensor_dim(n)
    total = np.zeros((size, size), dtype=np.int64)
    for sigma in young_elements((n,)):
        total += alg.act_matrix(sigma)
    total %= p
    eye = np.eye(size, dtype=np.int64)
    rel = [((alg.act_matrix(t) - eye) % p).T for t in alg._generators(n)]
    if rel:
        rows, piv = linalg.rref(np.vstack(rel), p)
    else:
        piv = []
    reps = linalg.complement_columns(None, piv, size)
    inv = alg.invariant_basis(n)
    cols = []
    for c in reps:
        sol = linalg.solve(inv.T, total[:, c], p)
        if sol is None:
            raise AssertionError("trace does not land in the invariants")
        cols.append(sol[0])
    mat = np.array(cols, dtype=np.int64).T if cols else np.zeros((inv.shape[0], 0), dtype=np.int64)
    return NormMap(mat, linalg.rank(mat, p) if mat.size else 0, len(reps), inv.shape[0])


# --- reduction to p-power compositions ----------------------------------------------

@dataclass
class PowerReduction:
    coefficient: int
    composition: Composition
    operation: np.ndarray
    arg_map: tuple

    def evaluate(self, algebra: FreeGamma, args) -> GammaElement:
        out = algebra.beta(self.operation, self.composition, [args[i] for i in self.arg_map])
        return out.scale(algebra.field.scalar(self.coefficient))


def reduce_to_p_powers(x, r, p: int) -> PowerReduction:
    """Rewrite β_{x,r} as c·β_{x,Q} with every part of Q a power of p.

    Digit-splitting r_i = Σ r_ij p^j costs a multinomial ≡ 1; splitting each
    r_ij p^j into r_ij blocks of size p^j costs Π r_ij!, which is inverted.
    The operation x is unchanged because Q refines r consecutively.
    """
    r = Composition(r)
    coeff = 1
    parts, arg_map = [], []
    for i, ri in enumerate(r):
        for j, digit in enumerate(base_p_digits(ri, p)):
            coeff = coeff * pow(factorial_mod(digit, p), -1, p) % p
            parts += [p**j] * digit
            arg_map += [i] * digit
    return PowerReduction(coeff, Composition(parts), np.asarray(x), tuple(arg_map))


# --- relation checker -----------------------------------------------------------

RELATIONS = ("beta1", "beta2", "beta3", "beta4", "beta5", "beta6", "beta7", "beta8")


class RelationReport(CheckReport):
    def __init__(self, subject: str = ""):
        super().__init__(subject)
        self.ensure(*RELATIONS)


class _Sampler:
    def __init__(self, alg: FreeGamma, rng):
        self.alg, self.rng = alg, rng
        self.F = alg.field

    def composition(self, n: int, parts: int) -> Composition:
        cuts = sorted(self.rng.integers(0, n + 1, size=parts - 1).tolist())
        bounds = [0] + cuts + [n]
        return Composition(bounds[i + 1] - bounds[i] for i in range(parts))

    def positive_composition(self, n: int, parts: int) -> Composition:
        c = self.composition(n - parts, parts)
        return Composition(x + 1 for x in c)

    def invariant(self, n: int, r, nonzero: bool = False) -> np.ndarray:
        basis = self.alg.operad.invariants_subspace(n, r)
        if basis.shape[0] == 0:
            return self.F.zeros(self.alg.operad.dim(n))
        coeffs = self.F.random(self.rng, basis.shape[0])
        while nonzero and not np.any(coeffs):
            coeffs = self.F.random(self.rng, basis.shape[0])
        return np.einsum("bt,bc->tc", basis, coeffs) % self.F.p

    def element(self, max_degree: int = 2) -> GammaElement:
        top = max(1, min(max_degree, self.alg.D))
        degs = {int(self.rng.integers(1, top + 1))}
        if self.rng.random() < 0.4:
            degs.add(int(self.rng.integers(1, top + 1)))
        return self.alg.random_element(self.rng, sorted(degs))

    def arity(self, low: int = 1) -> int:
        return int(self.rng.integers(low, self.alg.D + 1))


def _describe(**kw) -> str:
    parts = []
    for key, val in kw.items():
        if isinstance(val, np.ndarray):
            val = val.tolist()
        parts.append(f"{key}={val}")
    return ", ".join(parts)


def check_beta_relations(P: OperadData, dim_v: int, D: int, trials: int = 100,
                         field: FieldSpec | None = None, seed: int = 0,
                         strict: bool = False) -> RelationReport:
    """Evaluate both sides of (β1)-(β8) on random instances in Γ(P, V)."""
    alg = FreeGamma(P, dim_v, D, field, strict)
    F = alg.field
    rng = np.random.default_rng(seed)
    S = _Sampler(alg, rng)
    rep = RelationReport(f"beta relations {P.name} dimV={dim_v} D={D} p={F.p}")
    for _ in range(trials):
        # (β1) block permutation of arguments
        n = S.arity()
        s = int(rng.integers(1, min(3, n) + 1))
        r = S.composition(n, s)
        x = S.invariant(n, r)
        args = [S.element() for _ in range(s)]
        rho = Permutation(rng.permutation(s).tolist())
        lhs = alg.beta(x, r, args)
        bp = block_permutation(rho, r)
        rinv = rho.inverse()
        rhs = alg.beta(P.act(bp, x), permute_parts(rho, r), [args[rinv(i)] for i in range(s)])
        rep.record("beta1", lhs == rhs, _describe(r=r, rho=rho.one_based()))

        # (β2) a leading zero part is ignored
        extra = S.element()
        rhs = alg.beta(x, Composition((0,) + tuple(r)), [extra] + args)
        rep.record("beta2", lhs == rhs, _describe(r=r))

        # (β3) scaling the first argument
        lam = F.random_scalar(rng)
        scaled = alg.beta(x, r, [args[0].scale(lam)] + args[1:])
        rep.record("beta3", scaled == lhs.scale(F.power(lam, r[0])),
                   _describe(r=r, lam=lam))

        # (β4) repeated arguments merge into coarser parts
        q = S.positive_composition(s, int(rng.integers(1, s + 1)))
        coarse = refine(q, r)
        distinct = [S.element() for _ in range(len(q))]
        repeated = [a for a, qi in zip(distinct, q) for _ in range(qi)]
        lhs4 = alg.beta(x, r, repeated)
        rhs4 = alg.beta(alg.orbit_sum(x, coarse, r), coarse, distinct)
        rep.record("beta4", lhs4 == rhs4, _describe(r=r, q=q))

        # (β5) additivity in the first argument
        a0, a1 = S.element(), S.element()
        lhs5 = alg.beta(x, r, [a0 + a1] + args[1:])
        rhs5 = alg.zero()
        for l in range(r[0] + 1):
            rhs5 = rhs5 + alg.beta(x, compose_split(r, 0, l, r[0] - l), [a0, a1] + args[1:])
        rep.record("beta5", lhs5 == rhs5, _describe(r=r))

        # (β6) linearity in the operation
        y = S.invariant(n, r)
        mu = F.random_scalar(rng)
        lhs6 = alg.beta((F.scale(mu, x) + y) % F.p, r, args)
        rhs6 = lhs.scale(mu) + alg.beta(y, r, args)
        rep.record("beta6", lhs6 == rhs6, _describe(r=r, mu=mu))

        # (β7) unit
        a = S.element(alg.D)
        rep.record("beta7", alg.beta(P.unit(), (1,), [a]) == a, "unit")

        # (β8) composition of operations
        ok, witness = _check_composition(alg, S)
        rep.record("beta8", ok, witness)
    return rep


def _check_composition(alg: FreeGamma, S: _Sampler) -> tuple[bool, str]:
    rng = S.rng
    D = alg.D
    # pick r, then inner arities m_i within the budget Σ r_i m_i <= D
    repeated = D >= 4 and rng.random() < 0.5
    if repeated:
        # repeated inner operations are where the regrouping matters
        r = Composition((int(rng.integers(2, D // 2 + 1)),))
    else:
        s = int(rng.integers(1, min(2, D) + 1))
        r = S.positive_composition(int(rng.integers(s, max(s, D // 2) + 1)), s)
    budget = D - r.n
    ms = []
    for ri in r:
        extra = int(rng.integers(0, budget // ri + 1))
        budget -= extra * ri
        ms.append(1 + extra)
    n = r.n
    x = S.invariant(n, r, nonzero=repeated)
    qs, xs, bs = [], [], []
    for mi in ms:
        u = int(rng.integers(max(1, mi - 1), mi + 1))
        qi = S.positive_composition(mi, u)
        qs.append(qi)
        xs.append(S.invariant(mi, qi, nonzero=repeated))
        bs.append([S.element(1 if repeated or rng.random() < 0.7 else 2) for _ in qi])
    inner = [alg.beta(xi, qi, bi) for xi, qi, bi in zip(xs, qs, bs)]
    lhs = alg.beta(x, r, inner)
    op, target = alg.composite_operation(x, r, xs, qs)
    rhs = alg.beta(op, target, [b for bi in bs for b in bi])
    return lhs == rhs, _describe(r=r, qs=[tuple(q) for q in qs])
