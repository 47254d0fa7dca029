"""Commutative divided power algebras in (A, π) form.

Elements of a finite-dimensional non-unital algebra A₊ are coefficient arrays
of shape (dim, k).  The augmented algebra F ⊕ A₊ is used where a unit is
needed; an augmented element is a pair (scalar, vector).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InvalidArgs, ShapeMismatch, UnsupportedPresentation
from .field import FieldSpec, divided_power_coefficient, factorial_mod, lucas_binomial
from .reports import CheckReport
from .structure import SparseBilinear, as_table


class CommAlgebra:
    """Finite-dimensional non-unital commutative algebra given by structure constants."""

    def __init__(self, field: FieldSpec, mult, labels: Sequence[str] | None = None, name: str = ""):
        self.field = field
        mult = np.asarray(mult, dtype=np.int64)
        n = mult.shape[0] if mult.ndim >= 3 else 0
        self.dim = n
        self.mult = as_table(field, mult, n)
        self.labels = list(labels) if labels is not None else [f"a{i + 1}" for i in range(n)]
        if len(self.labels) != n:
            raise ShapeMismatch("one label per basis element")
        self.name = name
        self._product = SparseBilinear(field, self.mult)

    @property
    def p(self) -> int:
        return self.field.p

    # --- arithmetic ------------------------------------------------------------
    def zero(self) -> np.ndarray:
        return self.field.zeros(self.dim)

    def basis(self, i: int) -> np.ndarray:
        v = self.zero()
        v[i] = self.field.one()
        return v

    def vec(self, values) -> np.ndarray:
        """Coefficient array from a list of ints (prime field) or (dim, k) data."""
        arr = np.asarray(values, dtype=np.int64)
        if arr.shape == (self.dim,):
            return self.field.embed_prime(arr)
        if arr.shape != (self.dim, self.field.k):
            raise ShapeMismatch(f"expected a vector of length {self.dim}")
        return arr % self.p

    def mul(self, a, b) -> np.ndarray:
        return self._product(a, b)

    def power(self, a, e: int) -> np.ndarray:
        """a^e for e >= 1 (no unit needed)."""
        if e < 1:
            raise InvalidArgs("non-unital powers need e >= 1")
        out = np.asarray(a, dtype=np.int64) % self.p
        for _ in range(e - 1):
            out = self.mul(out, a)
        return out

    def left_matrix(self, a) -> np.ndarray:
        """(dim, dim, k) array whose column j is a·e_j."""
        cols = [self.mul(a, self.basis(j)) for j in range(self.dim)]
        return np.stack(cols, axis=1) if cols else np.zeros((0, 0, self.field.k), dtype=np.int64)

    # augmented algebra F ⊕ A₊
    def aug_mul(self, x: tuple, y: tuple) -> tuple:
        F = self.field
        (s, a), (t, b) = x, y
        scalar = F.mul(s, t)
        vec = (F.scale(s, b) + F.scale(t, a) + self.mul(a, b)) % self.p
        return scalar, vec

    def aug_power(self, x: tuple, e: int) -> tuple:
        out = (self.field.one(), self.zero())
        for _ in range(e):
            out = self.aug_mul(out, x)
        return out

    def random(self, rng) -> np.ndarray:
        return self.field.random(rng, self.dim)

    def format(self, v) -> str:
        F = self.field
        terms = []
        for i in range(self.dim):
            if np.any(v[i]):
                c = F.format_scalar(v[i])
                terms.append(self.labels[i] if np.array_equal(v[i] % self.p, self.field.one()) else f"{c}*{self.labels[i]}")
        return " + ".join(terms) if terms else "0"

    # --- structural checks --------------------------------------------------------
    def check_ring_axioms(self, report: CheckReport, rng, samples: int = 500) -> None:
        """Commutativity, associativity (exhaustive up to dim 27), nilpotency."""
        n = self.dim
        asym = np.argwhere(np.any(self.mult != self.mult.transpose(1, 0, 2, 3), axis=(2, 3)))
        report.record("commutative", asym.size == 0,
                      lambda: f"{self.labels[asym[0][0]]}*{self.labels[asym[0][1]]}")
        if n <= 27:
            triples = itertools.product(range(n), repeat=3)
        else:
            triples = (tuple(int(x) for x in rng.integers(0, n, size=3)) for _ in range(samples))
        for i, j, l in triples:
            ei, ej, el = self.basis(i), self.basis(j), self.basis(l)
            good = np.array_equal(self.mul(self.mul(ei, ej), el), self.mul(ei, self.mul(ej, el)))
            report.record("associative", good, lambda: f"({self.labels[i]},{self.labels[j]},{self.labels[l]})")
        report.record("nilpotent", self.nilpotency_index() is not None, "powers of A+ never vanish")

    def nilpotency_index(self) -> int | None:
        """Smallest m with A₊^m = 0, or None.

        Powers are tracked as F_p-spans of flattened vectors; these stay
        F_q-closed because the product is F_q-bilinear.
        """
        F = self.field
        if self.dim == 0:
            return 1
        span = [F.unflatten(row, self.dim) for row in np.eye(self.dim * F.k, dtype=np.int64)]
        for m in range(1, self.dim * F.k + 2):
            if not span:
                return m
            prods = [F.flatten(self.mul(r, self.basis(j))) for r in span for j in range(self.dim)]
            rows, _ = linalg.rref(np.array(prods), self.p)
            span = [F.unflatten(row, self.dim) for row in rows]
        return None


class PdComAlgebra(CommAlgebra):
    """Soublin pair (A₊, π) with π given on a basis and extended by (DPpeq2), (DPpeq4)."""

    def __init__(self, field: FieldSpec, mult, pi_on_basis, labels=None, name: str = ""):
        super().__init__(field, mult, labels, name)
        pi = np.asarray(pi_on_basis, dtype=np.int64)
        if pi.shape == (self.dim, self.dim):
            pi = field.embed_prime(pi)
        if self.dim and pi.shape != (self.dim, self.dim, field.k):
            raise ShapeMismatch("pi_on_basis needs one vector per basis element")
        self.pi_on_basis = pi % field.p if self.dim else np.zeros((0, 0, field.k), dtype=np.int64)
        self._corr = [(-1) ** k * pow(k, -1, field.p) % field.p for k in range(1, field.p)]

    def pi(self, v, order: Sequence[int] | None = None) -> np.ndarray:
        return pi_extend(self, v, order)

    def gamma(self, n: int, v) -> np.ndarray:
        return gamma_from_pi(self, n, v)

    def pi_matrix_rows(self) -> np.ndarray:
        return self.pi_on_basis


def _sum_correction(A: CommAlgebra, a, b, corr: Sequence[int]) -> np.ndarray:
    """Σ_{k=1}^{p-1} (-1)^k/k · a^k b^{p-k}."""
    p = A.p
    out = A.zero()
    apow = [None] * p
    bpow = [None] * p
    apow[1], bpow[1] = a % p, b % p
    for e in range(2, p):
        apow[e] = A.mul(apow[e - 1], a)
        bpow[e] = A.mul(bpow[e - 1], b)
    for k in range(1, p):
        c = corr[k - 1]
        if c:
            out = (out + c * A.mul(apow[k], bpow[p - k])) % p
    return out


def pi_extend(A: PdComAlgebra, v, order: Sequence[int] | None = None) -> np.ndarray:
    """π(v), peeling one basis term at a time in the given order."""
    F = A.field
    v = np.asarray(v, dtype=np.int64) % A.p
    order = range(A.dim) if order is None else order
    acc = A.zero()
    pi_acc = A.zero()
    for i in order:
        if not np.any(v[i]):
            continue
        term = A.zero()
        term[i] = v[i]
        pi_term = F.scale(F.frob(v[i], 1), A.pi_on_basis[i])
        if np.any(acc):
            pi_acc = (pi_acc + pi_term + _sum_correction(A, acc, term, A._corr)) % A.p
        else:
            pi_acc = pi_term
        acc = (acc + term) % A.p
    return pi_acc


def gamma_from_pi(A: PdComAlgebra, n: int, v) -> np.ndarray:
    """γ_n(v) = (Π n_j!)^{-1} Π_j π^j(v)^{n_j} with n = Σ n_j p^j."""
    if n < 1:
        raise InvalidArgs("n must be positive")
    F = A.field
    p = A.p
    digits = []
    m = n
    while m:
        m, d = divmod(m, p)
        digits.append(d)
    out = (F.one(), A.zero())
    cur = np.asarray(v, dtype=np.int64) % p
    coeff = 1
    for j, d in enumerate(digits):
        if j:
            cur = pi_extend(A, cur)
        if d:
            coeff = coeff * pow(factorial_mod(d, p), -1, p) % p
            out = A.aug_mul(out, A.aug_power((F.zeros(()), cur), d))
    return (coeff * out[1]) % p


# --- checks -----------------------------------------------------------------------

PD_SOUBLIN = ("DPpeq1", "DPpeq2", "DPpeq3", "DPpeq4", "order_independence")


def check_pdcom(A: PdComAlgebra, trials: int = 100, seed: int = 0) -> CheckReport:
    """Ring axioms plus (DPpeq1)-(DPpeq4) on basis pairs and random pairs."""
    F = A.field
    rng = np.random.default_rng(seed)
    rep = CheckReport(A.name or "pdcom").ensure(*PD_SOUBLIN)
    A.check_ring_axioms(rep, rng)
    n = A.dim
    samples = [A.basis(i) for i in range(n)] + [A.random(rng) for _ in range(trials)]
    for a in samples:
        rep.record("DPpeq1", not np.any(A.power(a, A.p)), lambda: A.format(a))
    pairs = [(A.basis(i), A.basis(j)) for i in range(n) for j in range(n)]
    pairs += [(A.random(rng), A.random(rng)) for _ in range(trials)]
    for a, b in pairs:
        lhs = pi_extend(A, a + b)
        rhs = (pi_extend(A, a) + pi_extend(A, b) + _sum_correction(A, a, b, A._corr)) % A.p
        rep.record("DPpeq2", np.array_equal(lhs, rhs), lambda: (A.format(a), A.format(b)))
        rep.record("DPpeq3", not np.any(pi_extend(A, A.mul(a, b))), lambda: (A.format(a), A.format(b)))
    for a in samples:
        lam = F.random_scalar(rng)
        lhs = pi_extend(A, F.scale(lam, a))
        rhs = F.scale(F.frob(lam, 1), pi_extend(A, a))
        rep.record("DPpeq4", np.array_equal(lhs, rhs), lambda: A.format(a))
    for _ in range(min(trials, 50)):
        v = A.random(rng)
        perm = rng.permutation(n).tolist()
        rep.record("order_independence", np.array_equal(pi_extend(A, v), pi_extend(A, v, perm)),
                   lambda: (A.format(v), perm))
    return rep


# --- free divided power algebras on monomials --------------------------------------------

def _gamma_monomial_coefficient(k: int, exps: Sequence[int], p: int) -> int:
    """γ_k(x^(a)) = (k!)^{r-1} Π_i C_{k,a_i} · x^(k a), r = #variables present."""
    present = [a for a in exps if a]
    coeff = factorial_mod(k, p) ** max(len(present) - 1, 0) % p
    for a in present:
        coeff = coeff * divided_power_coefficient(k, a, p) % p
    return coeff


class MonomialPdCom(PdComAlgebra):
    """Divided power monomials x^(a) in g variables, 1 <= |a| <= D, minus an excluded set.

    The excluded monomials span an ideal closed under γ; the quotient keeps the
    monomial basis, and every operation maps monomials to multiples of monomials.
    """

    def __init__(self, g: int, D: int, field: FieldSpec, excluded: set | None = None,
                 var_names: Sequence[str] | None = None, name: str = ""):
        if g < 0 or D < 1:
            raise InvalidArgs("need g >= 0 and D >= 1")
        self.g, self.D = g, D
        p = field.p
        excluded = set(excluded or ())
        monos = [a for a in _monomials(g, D) if a not in excluded]
        self.monomials = monos
        self.index = {a: i for i, a in enumerate(monos)}
        n = len(monos)
        var_names = list(var_names) if var_names else (["x"] if g == 1 else [f"x{i + 1}" for i in range(g)])
        labels = [_label(a, var_names) for a in monos]
        mult = np.zeros((n, n, n), dtype=np.int64)
        for i, a in enumerate(monos):
            for j, b in enumerate(monos):
                s = tuple(x + y for x, y in zip(a, b))
                t = self.index.get(s)
                if t is not None:
                    mult[i, j, t] = _binomial_product(a, b, p)
        pi = np.zeros((n, n), dtype=np.int64)
        for i, a in enumerate(monos):
            t = self.index.get(tuple(p * x for x in a))
            if t is not None:
                pi[i, t] = _gamma_monomial_coefficient(p, a, p)
        super().__init__(field, field.embed_prime(mult), field.embed_prime(pi), labels, name)
        # augmented shift maps: index 0 is the unit monomial
        aug = [tuple([0] * g)] + monos
        self._aug_index = {a: i for i, a in enumerate(aug)}
        self._aug = aug
        self._tgt, self._coef, self._valid = [], [], []
        for m in aug:
            tgt = np.full(n + 1, -1, dtype=np.int64)
            coef = np.zeros(n + 1, dtype=np.int64)
            for j, b in enumerate(aug):
                s = tuple(x + y for x, y in zip(m, b))
                t = self._aug_index.get(s)
                if t is not None:
                    c = _binomial_product(m, b, p)
                    if c:
                        tgt[j], coef[j] = t, c
            valid = tgt >= 0
            self._tgt.append(tgt[valid])
            self._coef.append(coef[valid])
            self._valid.append(np.flatnonzero(valid))

    def degree(self, i: int) -> int:
        return sum(self.monomials[i])

    def _shift(self, m: int, S: np.ndarray) -> np.ndarray:
        """x^(aug m) · S for a stack S of augmented vectors (..., n+1, k)."""
        out = np.zeros_like(S)
        src = self._valid[m]
        out[..., self._tgt[m], :] = S[..., src, :] * self._coef[m][:, None] % self.p
        return out

    def gamma_series(self, v, nmax: int) -> np.ndarray:
        """Augmented γ_0(v), .., γ_nmax(v) as an array (nmax+1, dim+1, k)."""
        F = self.field
        p = self.p
        S = np.zeros((nmax + 1, self.dim + 1, F.k), dtype=np.int64)
        S[0, 0] = F.one()
        v = np.asarray(v, dtype=np.int64) % p
        for t in np.flatnonzero(np.any(v, axis=1)):
            a = self.monomials[t]
            deg = sum(a)
            new = S.copy()
            lam_pow = F.one()
            for k in range(1, nmax + 1):
                lam_pow = F.mul(lam_pow, v[t])
                if k * deg > self.D:
                    break
                target = self._aug_index.get(tuple(k * x for x in a))
                if target is None:
                    continue
                c = _gamma_monomial_coefficient(k, a, p)
                if not c:
                    continue
                shifted = self._shift(target, S[:nmax + 1 - k])
                new[k:] += F.scale((c * lam_pow) % p, shifted)
            S = new % p
        return S

    def gamma(self, n: int, v) -> np.ndarray:
        """Intrinsic γ_n(v) from the monomial formula and (PDeq2), (PDeq3)."""
        if n < 1:
            raise InvalidArgs("n must be positive")
        if n > self.D:
            return self.zero()
        S = self.gamma_series(v, n)
        return S[n, 1:]


def _monomials(g: int, D: int) -> list[tuple]:
    out = []
    for total in range(1, D + 1):
        for combo in itertools.combinations_with_replacement(range(g), total):
            exps = [0] * g
            for c in combo:
                exps[c] += 1
            out.append(tuple(exps))
    # graded, then reverse-lex inside a degree so x1 powers come first
    out = sorted(set(out), key=lambda a: (sum(a), tuple(-x for x in a)))
    return out


def _binomial_product(a, b, p: int) -> int:
    c = 1
    for x, y in zip(a, b):
        c = c * lucas_binomial(x + y, x, p) % p
    return c


def _label(a, names) -> str:
    parts = [f"{nm}^({x})" for nm, x in zip(names, a) if x]
    return "*".join(parts) if parts else "1"


def free_pdcom(g: int, D: int, field: FieldSpec | int) -> MonomialPdCom:
    """Free divided power algebra on g generators, truncated at total degree D."""
    F = field if isinstance(field, FieldSpec) else FieldSpec(field)
    return MonomialPdCom(g, D, F, name=f"Gamma({g} gens, D={D})")


# --- divided power axioms (γ form) ------------------------------------------------------

PD_GAMMA = ("PDeq1", "PDeq2", "PDeq3", "PDeq4", "PDeq5")


def check_divided_powers(A: PdComAlgebra, max_degree: int, trials: int = 100, seed: int = 0,
                         gamma=None) -> CheckReport:
    """(PDeq1)-(PDeq5) for all i, j with the relevant products <= max_degree.

    ``gamma(n, v)`` defaults to the algebra's own γ; samples are all basis
    elements followed by ``trials`` random elements.
    """
    F = A.field
    p = A.p
    D = max_degree
    gamma = gamma or A.gamma
    rng = np.random.default_rng(seed)
    rep = CheckReport(f"divided powers on {A.name or 'algebra'}").ensure(*PD_GAMMA)
    samples = [A.basis(i) for i in range(A.dim)] + [A.random(rng) for _ in range(trials)]

    def series(v, top):
        if isinstance(A, MonomialPdCom) and gamma == A.gamma:
            S = A.gamma_series(v, top)
            return [S[n, 1:] for n in range(top + 1)]
        return [None] + [gamma(n, v) for n in range(1, top + 1)]

    for a in samples:
        g = series(a, D)
        rep.record("PDeq1", np.array_equal(g[1], a % p), lambda: A.format(a))
        for i in range(1, D + 1):
            for j in range(1, D + 1 - i):
                lhs = A.mul(g[i], g[j])
                c = lucas_binomial(i + j, i, p)
                rep.record("PDeq4", np.array_equal(lhs, (c * g[i + j]) % p), lambda: (A.format(a), i, j))
        for j in range(1, D + 1):
            gj = g[j]
            top = D // j
            if top < 1:
                continue
            inner = series(gj, top)
            for i in range(1, top + 1):
                c = divided_power_coefficient(i, j, p)
                rep.record("PDeq5", np.array_equal(inner[i], (c * g[i * j]) % p), lambda: (A.format(a), i, j))
    for idx in range(len(samples)):
        a = samples[idx]
        b = samples[(idx * 7 + 3) % len(samples)] if idx < A.dim else A.random(rng)
        ga, gb, gab = series(a, D), series(b, D), series((a + b) % p, D)
        for i in range(1, D + 1):
            rhs = (ga[i] + gb[i]) % p
            for k in range(1, i):
                rhs = (rhs + A.mul(ga[k], gb[i - k])) % p
            rep.record("PDeq2", np.array_equal(gab[i], rhs), lambda: (A.format(a), A.format(b), i))
        # (PDeq3) with a multiplier from the augmented algebra
        lam = F.random_scalar(rng)
        c = (lam, A.random(rng))
        prod = (F.scale(lam, b) + A.mul(c[1], b)) % p
        gp = series(prod, D)
        for i in range(1, D + 1):
            ci = A.aug_power(c, i)
            rhs = (F.scale(ci[0], gb[i]) + A.mul(ci[1], gb[i])) % p
            rep.record("PDeq3", np.array_equal(gp[i], rhs), lambda: (A.format(b), i))
    return rep


# --- PD envelopes of monomial presentations -------------------------------------------------

@dataclass
class PdEnvelope:
    """Envelope Â of a monomial algebra A with the unit map η: A₊ → Â₊."""

    source: CommAlgebra
    envelope: MonomialPdCom
    eta: np.ndarray  # (dim Â, dim A) over F_p

    def apply_eta(self, v) -> np.ndarray:
        F = self.envelope.field
        v = np.asarray(v, dtype=np.int64)
        return np.einsum("ts,sc->tc", self.eta, v) % F.p


def monomial_algebra(g: int, relations: Sequence[Sequence[int]], D: int, field: FieldSpec,
                     var_names=None) -> CommAlgebra:
    """F[x_1..x_g]₊ / (monomial relations), truncated at total degree D."""
    rels = [tuple(r) for r in relations]
    monos = [a for a in _monomials(g, D) if not any(all(x >= y for x, y in zip(a, r)) for r in rels)]
    index = {a: i for i, a in enumerate(monos)}
    n = len(monos)
    mult = np.zeros((n, n, n), dtype=np.int64)
    for i, a in enumerate(monos):
        for j, b in enumerate(monos):
            t = index.get(tuple(x + y for x, y in zip(a, b)))
            if t is not None:
                mult[i, j, t] = 1
    names = list(var_names) if var_names else (["x"] if g == 1 else [f"x{i + 1}" for i in range(g)])
    labels = ["*".join(f"{nm}^{x}" if x > 1 else nm for nm, x in zip(names, a) if x) for a in monos]
    alg = CommAlgebra(field, field.embed_prime(mult), labels, name="monomial algebra")
    alg.monomials = monos
    return alg


def pd_envelope(g: int, relations: Sequence[Sequence[int]], D: int, field: FieldSpec | int,
                var_names=None) -> PdEnvelope:
    """PD envelope of F[x_1..x_g]/(monomials), truncated at degree D.

    A relation x^α = 0 becomes α!·x^(α) = 0; when α! ≡ 0 it imposes nothing.
    Otherwise the ideal is spanned by the nonzero products m·γ_n(x^(α)).
    """
    F = field if isinstance(field, FieldSpec) else FieldSpec(field)
    p = F.p
    rels = []
    for r in relations:
        r = tuple(int(x) for x in r)
        if len(r) != g or any(x < 0 for x in r) or sum(r) == 0:
            raise UnsupportedPresentation(f"relation {r} is not a monomial in {g} variables")
        rels.append(r)
    all_monos = _monomials(g, D)
    excluded = set()
    for alpha in rels:
        if _factorial_multi(alpha, p) == 0:
            continue
        for n in range(1, D + 1):
            na = tuple(n * x for x in alpha)
            if sum(na) > D:
                break
            if _gamma_monomial_coefficient(n, alpha, p) == 0:
                continue
            excluded.add(na)
            for b in all_monos:
                s = tuple(x + y for x, y in zip(b, na))
                if sum(s) <= D and _binomial_product(b, na, p):
                    excluded.add(s)
    env = MonomialPdCom(g, D, F, excluded, var_names, name="PD envelope")
    src = monomial_algebra(g, rels, D, F, var_names)
    eta = np.zeros((env.dim, src.dim), dtype=np.int64)
    for s, a in enumerate(src.monomials):
        t = env.index.get(a)
        if t is not None:
            eta[t, s] = _factorial_multi(a, p)
    return PdEnvelope(src, env, eta)


def _factorial_multi(a, p: int) -> int:
    c = 1
    for x in a:
        c = c * factorial_mod(x, p) % p
    return c


def eta_is_algebra_map(env: PdEnvelope) -> bool:
    A, B = env.source, env.envelope
    for i in range(A.dim):
        for j in range(A.dim):
            lhs = env.apply_eta(A.mul(A.basis(i), A.basis(j)))
            rhs = B.mul(env.apply_eta(A.basis(i)), env.apply_eta(A.basis(j)))
            if not np.array_equal(lhs, rhs):
                return False
    return True


def zero_pdcom(field: FieldSpec) -> PdComAlgebra:
    return PdComAlgebra(field, np.zeros((0, 0, 0), dtype=np.int64), np.zeros((0, 0), dtype=np.int64),
                        [], name="zero")
