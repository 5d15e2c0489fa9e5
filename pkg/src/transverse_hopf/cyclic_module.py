"""Cyclic modules, the (b, B) bicomplex and cocycle checks.

Two instances share one interface:

* HopfInstance: C^0 is the coefficient ring, C^q (q >= 1) the q-fold tensor
  power of the operator algebra over it.
* CoarseInstance: C^q is the (q+1)-fold tensor power of a small unital
  algebra, given by structure constants.

All index conventions are 0-based; ``face(i, x, q)`` maps C^{q-1} to C^q,
``degeneracy(i, x, q)`` maps C^{q+1} to C^q and ``cyclic(x, q)`` acts on C^q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .coeff_ring import CoeffPoly, base, mono_mul
from .hopf_core import EMPTY_WORD, HElement, _add
from .hopf_structure import (
    TensorElement,
    antipode,
    coproduct_slot,
    counit_term,
    iterated_coproduct,
    random_word,
    right_mul_raw,
    tensor_normalize,
)


class CyclicInstance:
    """Interface: faces, degeneracies, cyclic operators and linear structure."""

    def face(self, i, x, q):
        raise NotImplementedError

    def degeneracy(self, i, x, q):
        raise NotImplementedError

    def cyclic(self, x, q):
        raise NotImplementedError

    def zero(self, q):
        raise NotImplementedError

    def add(self, x, y):
        return x + y

    def scale(self, x, c):
        return x * Fraction(c)

    def is_zero(self, x) -> bool:
        return not x

    def random_element(self, q, rnd):
        raise NotImplementedError

    def _check(self, i, lo, hi):
        if not lo <= i <= hi:
            raise IndexError(f"operator index {i} outside {lo}..{hi}")


# Hopf instance ------------------------------------------------------------------------------

class HopfInstance(CyclicInstance):
    def __init__(self, n: int, word_len: int = 2):
        self.n = n
        self.word_len = word_len

    def zero(self, q):
        return CoeffPoly() if q == 0 else TensorElement(self.n, q)

    def face(self, i, x, q):
        self._check(i, 0, q)
        n = self.n
        if q == 1:
            key = "b" if i == 0 else "a"
            terms = {}
            for m, c in x.terms.items():
                k = ((EMPTY_WORD,), ((),), m) if key == "b" else ((EMPTY_WORD,), (m,), ())
                terms[k] = c
            return TensorElement._raw(n, 1, terms)
        if i == 0:
            return TensorElement._raw(n, q, {
                ((EMPTY_WORD,) + w, ((),) + a, b): c for (w, a, b), c in x.terms.items()
            })
        if i == q:
            return TensorElement._raw(n, q, {
                (w + (EMPTY_WORD,), a + (b,), ()): c for (w, a, b), c in x.terms.items()
            })
        return coproduct_slot(x, i - 1)

    def degeneracy(self, i, x, q):
        self._check(i, 0, q)
        n = self.n
        if q == 0:
            out = CoeffPoly()
            for key, c in x.terms.items():
                out = out + counit_term(x.slot_terms(key)[0]) * c
            return out
        out: dict = {}
        for key, c in x.terms.items():
            words, alphas, beta = key
            reps = x.slot_terms(key)
            e = counit_term(reps[i])
            for em, ec in e.terms.items():
                w2 = words[:i] + words[i + 1:]
                if i < q:
                    a2 = alphas[:i] + (mono_mul(em, alphas[i + 1]),) + alphas[i + 2:]
                    b2 = beta
                else:
                    a2 = alphas[:i]
                    b2 = em
                _add(out, (w2, a2, b2), c * ec)
        return TensorElement._raw(n, q, out)

    def cyclic(self, x, q):
        n = self.n
        if q == 0:
            return x
        if q == 1:
            h = HElement._raw(n, {(w[0], a[0], b): c for (w, a, b), c in x.terms.items()})
            s = antipode(h)
            return TensorElement._raw(n, 1, {((w,), (p,), qq): c for (w, p, qq), c in s.terms.items()})
        out = TensorElement(n, q)
        for key, c in x.terms.items():
            reps = x.slot_terms(key)
            first = HElement._raw(n, {reps[0]: Fraction(c)})
            head = iterated_coproduct(antipode(first), q)
            w_last, a_last, b_last = reps[-1]
            tail = [HElement._raw(n, {r: Fraction(1)}) for r in reps[1:-1]]
            tail.append(HElement._raw(n, {(w_last, a_last, ()): Fraction(1)}))
            tail.append(HElement._raw(n, {(EMPTY_WORD, b_last, ()): Fraction(1)}))
            out = out + right_mul_raw(head, tail)
        return out

    def random_element(self, q, rnd):
        n = self.n
        if q == 0:
            return base(rnd.choice("fg")) * rnd.randint(1, 3)
        raw = []
        for _ in range(2):
            slots = [random_word(rnd, n, self.word_len) for _ in range(q)]
            raw.append((rnd.randint(-2, 2) or 1, slots))
        return tensor_normalize(raw, n)


# Coarse instance ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoarseAlgebra:
    """Finite-dimensional unital algebra with a functional nu, nu(1) = 1.

    ``table[(a, b)]`` is the product of basis elements as {label: coeff}.
    """

    labels: tuple
    unit: str
    table: dict
    nu: dict = field(default_factory=dict)

    def __post_init__(self):
        for a in self.labels:
            if self.mult_basis(self.unit, a) != {a: 1} or self.mult_basis(a, self.unit) != {a: 1}:
                raise ValueError("unit law fails")
        for a, b, c in product(self.labels, repeat=3):
            if self.mult(self.mult({a: 1}, {b: 1}), {c: 1}) != self.mult({a: 1}, self.mult({b: 1}, {c: 1})):
                raise ValueError("structure constants are not associative")
        if Fraction(self.nu.get(self.unit, 0)) != 1:
            raise ValueError("nu(1) must be 1")

    def mult_basis(self, a, b) -> dict:
        return {k: Fraction(v) for k, v in self.table[(a, b)].items() if v}

    def mult(self, x: dict, y: dict) -> dict:
        out: dict = {}
        for a, ca in x.items():
            for b, cb in y.items():
                for k, v in self.table[(a, b)].items():
                    _add(out, k, Fraction(ca) * cb * v)
        return out

    def functional(self, x: dict) -> Fraction:
        return sum((Fraction(self.nu.get(a, 0)) * c for a, c in x.items()), Fraction(0))


def dual_numbers(c=0, d=0, nu_e=0) -> CoarseAlgebra:
    """Two-dimensional algebra spanned by 1, e with e*e = c + d*e."""
    table = {
        ("1", "1"): {"1": 1},
        ("1", "e"): {"e": 1},
        ("e", "1"): {"e": 1},
        ("e", "e"): {"1": Fraction(c), "e": Fraction(d)},
    }
    return CoarseAlgebra(("1", "e"), "1", table, {"1": 1, "e": Fraction(nu_e)})


class CoarseInstance(CyclicInstance):
    """Cyclic module of the coarse algebroid; elements are dicts of label tuples."""

    def __init__(self, algebra: CoarseAlgebra):
        self.K = algebra
        self.unit_vec = {algebra.unit: 1}

    def zero(self, q):
        return {}

    def add(self, x, y):
        out = dict(x)
        for k, c in y.items():
            _add(out, k, c)
        return out

    def scale(self, x, c):
        c = Fraction(c)
        return {k: v * c for k, v in x.items()} if c else {}

    def _insert_unit(self, x, pos):
        out: dict = {}
        for k, c in x.items():
            for u, cu in self.unit_vec.items():
                _add(out, k[:pos] + (u,) + k[pos:], c * cu)
        return out

    def face(self, i, x, q):
        self._check(i, 0, q)
        return self._insert_unit(x, i)

    def degeneracy(self, i, x, q):
        self._check(i, 0, q)
        out: dict = {}
        for k, c in x.items():
            for lab, v in self.K.mult({k[i]: 1}, {k[i + 1]: 1}).items():
                _add(out, k[:i] + (lab,) + k[i + 2:], c * v)
        return out

    def cyclic(self, x, q):
        return {k[1:] + k[:1]: c for k, c in x.items()}

    def homotopy_s(self, x, q):
        """s(k1 (x) ... (x) k_{q+1}) = nu(k1) k2 (x) ... (x) k_{q+1}."""
        if q < 1:
            raise ValueError("s needs q >= 1")
        out: dict = {}
        for k, c in x.items():
            v = self.K.functional({k[0]: 1})
            if v:
                _add(out, k[1:], c * v)
        return out

    def random_element(self, q, rnd):
        out: dict = {}
        for _ in range(3):
            k = tuple(rnd.choice(self.K.labels) for _ in range(q + 1))
            _add(out, k, Fraction(rnd.randint(-3, 3)))
        return out


def coarse_homotopy_s(K: CoarseAlgebra, x: dict, q: int) -> dict:
    return CoarseInstance(K).homotopy_s(x, q)


# derived operators --------------------------------------------------------------------------

def face(inst, i, x, q):
    return inst.face(i, x, q)


def degeneracy(inst, i, x, q):
    return inst.degeneracy(i, x, q)


def cyclic(inst, q, x):
    return inst.cyclic(x, q)


def power(inst, op, x, times):
    for _ in range(times):
        x = op(x)
    return x


def lam(inst, x, q):
    """lambda_q = (-1)^q tau_q."""
    y = inst.cyclic(x, q)
    return inst.scale(y, -1) if q % 2 else y


def hochschild_b(inst, x, q):
    """b: C^{q-1} -> C^q, the alternating sum of faces."""
    out = inst.zero(q)
    for i in range(q + 1):
        y = inst.face(i, x, q)
        out = inst.add(out, inst.scale(y, -1) if i % 2 else y)
    return out


def extra_degeneracy(inst, x, q):
    """sigma_{-1} = sigma_q o tau_{q+1}: C^{q+1} -> C^q (tau applied first)."""
    return inst.degeneracy(q, inst.cyclic(x, q + 1), q)


def norm_operator(inst, x, q):
    """N_q = 1 + lambda_q + ... + lambda_q^q."""
    out = x
    y = x
    for _ in range(q):
        y = lam(inst, y, q)
        out = inst.add(out, y)
    return out


def connes_B(inst, x, q):
    """B: C^{q+1} -> C^q, B = N_q sigma_{-1} (1 - lambda_{q+1})."""
    y = inst.add(x, inst.scale(lam(inst, x, q + 1), -1))
    return norm_operator(inst, extra_degeneracy(inst, y, q), q)


# cochains --------------------------------------------------------------------------------------

@dataclass
class CyclicCochain:
    """Finitely supported cochain of the total complex; components by degree."""

    parity: int
    components: dict

    def __post_init__(self):
        for q in self.components:
            if q % 2 != self.parity % 2:
                raise ValueError(f"component degree {q} has the wrong parity")


def total_boundary(inst, c: CyclicCochain) -> dict:
    """(b + B) c, by degree; b raises the degree, B lowers it."""
    out: dict = {}
    for q, x in c.components.items():
        targets = [(q + 1, hochschild_b(inst, x, q + 1))]
        if q >= 1:
            targets.append((q - 1, connes_B(inst, x, q - 1)))
        for d, y in targets:
            out[d] = inst.add(out[d], y) if d in out else y
    return out


def cocycle_check(inst, c: CyclicCochain) -> dict:
    """Verdict {'verdict': 'cocycle'} or {'verdict': 'not-cocycle', 'witness': ...}."""
    bd = total_boundary(inst, c)
    for d in sorted(bd):
        if not inst.is_zero(bd[d]):
            return {"verdict": "not-cocycle", "degree": d, "witness": bd[d]}
    return {"verdict": "cocycle"}


# identity suites ----------------------------------------------------------------------------------

def _eq(inst, x, y):
    return inst.is_zero(inst.add(x, inst.scale(y, -1)))


def simplicial_identities(inst, q_max, samples, rnd) -> dict:
    """Counts of failures of the cosimplicial identities, by name."""
    fails = {"dd": 0, "ss": 0, "sd": 0}
    for q in range(1, q_max + 1):
        for _ in range(samples):
            x = inst.random_element(q - 1, rnd)
            # d_j d_i = d_i d_{j-1}, i < j, as maps C^{q-1} -> C^{q+1}
            for j in range(q + 2):
                for i in range(j):
                    lhs = inst.face(j, inst.face(i, x, q), q + 1)
                    rhs = inst.face(i, inst.face(j - 1, x, q), q + 1)
                    fails["dd"] += not _eq(inst, lhs, rhs)
        for _ in range(samples):
            y = inst.random_element(q + 1, rnd)
            # s_j s_i = s_i s_{j+1}, i <= j, as maps C^{q+1} -> C^{q-1}
            for j in range(q):
                for i in range(j + 1):
                    lhs = inst.degeneracy(j, inst.degeneracy(i, y, q), q - 1)
                    rhs = inst.degeneracy(i, inst.degeneracy(j + 1, y, q), q - 1)
                    fails["ss"] += not _eq(inst, lhs, rhs)
        for _ in range(samples):
            x = inst.random_element(q, rnd)
            # s_j d_i on C^q -> C^{q+1} -> C^q
            for j in range(q + 1):
                for i in range(q + 2):
                    lhs = inst.degeneracy(j, inst.face(i, x, q + 1), q)
                    if i < j:
                        rhs = inst.face(i, inst.degeneracy(j - 1, x, q - 1), q) if q >= 1 else None
                    elif i in (j, j + 1):
                        rhs = x
                    else:
                        rhs = inst.face(i - 1, inst.degeneracy(j, x, q - 1), q) if q >= 1 else None
                    if rhs is None:
                        continue
                    fails["sd"] += not _eq(inst, lhs, rhs)
    return fails


def cyclic_identities(inst, q_max, samples, rnd) -> dict:
    """Failures of tau d_i = d_{i-1} tau, tau s_i = s_{i-1} tau, tau^{q+1} = 1."""
    fails = {"td": 0, "ts": 0, "tpow": 0}
    for q in range(1, q_max + 1):
        for _ in range(samples):
            x = inst.random_element(q - 1, rnd)
            for i in range(1, q + 1):
                lhs = inst.cyclic(inst.face(i, x, q), q)
                rhs = inst.face(i - 1, inst.cyclic(x, q - 1), q)
                fails["td"] += not _eq(inst, lhs, rhs)
            y = inst.random_element(q + 1, rnd)
            for i in range(1, q + 1):
                lhs = inst.cyclic(inst.degeneracy(i, y, q), q)
                rhs = inst.degeneracy(i - 1, inst.cyclic(y, q + 1), q)
                fails["ts"] += not _eq(inst, lhs, rhs)
            z = inst.random_element(q, rnd)
            w = z
            for _ in range(q + 1):
                w = inst.cyclic(w, q)
            fails["tpow"] += not _eq(inst, w, z)
    return fails


def bicomplex_identities(inst, q_max, samples, rnd) -> dict:
    """Failures of b b = 0, B B = 0 and b B + B b = 0 up to degree q_max."""
    fails = {"bb": 0, "BB": 0, "bB": 0}
    for q in range(0, q_max):
        for _ in range(samples):
            x = inst.random_element(q, rnd)
            fails["bb"] += not inst.is_zero(hochschild_b(inst, hochschild_b(inst, x, q + 1), q + 2))
        for _ in range(samples):
            if q + 2 <= q_max:
                y = inst.random_element(q + 2, rnd)
                fails["BB"] += not inst.is_zero(connes_B(inst, connes_B(inst, y, q + 1), q))
        for _ in range(samples):
            if q + 1 <= q_max:
                y = inst.random_element(q + 1, rnd)
                s = inst.add(hochschild_b(inst, connes_B(inst, y, q), q + 1),
                             connes_B(inst, hochschild_b(inst, y, q + 2), q + 1))
                fails["bB"] += not inst.is_zero(s)
    return fails


def homotopy_identity(inst: CoarseInstance, q_max, samples, rnd) -> int:
    """Failures of s d_i = d_{i-1} s for i = 1..q on C^{q-1}."""
    fails = 0
    for q in range(2, q_max + 1):
        for _ in range(samples):
            x = inst.random_element(q - 1, rnd)
            for i in range(1, q + 1):
                lhs = inst.homotopy_s(inst.face(i, x, q), q)
                rhs = inst.face(i - 1, inst.homotopy_s(x, q - 1), q - 1)
                fails += not _eq(inst, lhs, rhs)
    return fails
