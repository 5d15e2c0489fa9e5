"""The algebra of transverse differential operators in PBW normal form.

An element is a finite sum of terms  c * a(P) b(Q) D_kappa X_I Y_J  where
P, Q are monomials of the coefficient ring, kappa is a sorted tuple of
delta generators, I a nondecreasing tuple of X indices and J a
nondecreasing tuple of (lower, upper) Y index pairs.  Terms are stored
in a dict keyed by (word, P, Q) with word = (kappa, I, J).

A delta generator is the jet atom ('g', DELTA, i, j, k, ells) of the
coefficient ring under a reserved label, so its brackets with X and Y are
read off from the ring's derivations.  Products are computed by
left-multiplying generator by generator, with the generator-times-word
products memoized.
"""

from __future__ import annotations

import random
import threading
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .coeff_ring import (
    CoeffPoly,
    base,
    IndexError_,
    atom_str,
    canonical_atom,
    derive,
    derive_atom,
    format_poly,
    gamma_atom,
    mono_mul,
    mono_str,
    _frac_str,
)

DELTA = "~"

EMPTY_WORD = ((), (), ())


class RewriteLimit(RuntimeError):
    """The rewrite step budget was exhausted."""


_steps = threading.local()


def _tick(k=1):
    cap = getattr(_steps, "cap", None)
    _steps.count = getattr(_steps, "count", 0) + k
    if cap is not None and _steps.count > cap:
        raise RewriteLimit(f"more than {cap} rewrite steps")


def delta_atom(i, j, k, ells=()):
    if j > k:
        j, k = k, j
    return ("g", DELTA, i, j, k, tuple(ells))


def _insert_sorted(t: tuple, x) -> tuple:
    lo, hi = 0, len(t)
    while lo < hi:
        mid = (lo + hi) // 2
        if t[mid] <= x:
            lo = mid + 1
        else:
            hi = mid
    return t[:lo] + (x,) + t[lo:]


def exact(v):
    """Integral rationals are kept as int, which is much faster than Fraction."""
    if type(v) is Fraction and v.denominator == 1:
        return v.numerator
    return v


def _clean(d) -> dict:
    """Drop zero entries and store integral values as int."""
    out = {}
    for k, v in d.items():
        if v:
            out[k] = v.numerator if type(v) is Fraction and v.denominator == 1 else v
    return out


def _add(out: dict, key, c):
    v = out.get(key)
    v = c if v is None else v + c
    if v:
        out[key] = exact(v)
    else:
        out.pop(key, None)


class HElement:
    """Immutable element of the operator algebra in dimension n."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {}
        if terms:
            for k, c in terms.items():
                if c:
                    self.terms[k] = exact(Fraction(c))

    @classmethod
    def _raw(cls, n, terms):
        h = cls.__new__(cls)
        h.n = n
        h.terms = terms
        return h

    # constructors ------------------------------------------------------------
    @classmethod
    def one(cls, n):
        return cls._raw(n, {(EMPTY_WORD, (), ()): 1})

    @classmethod
    def scalar(cls, n, c):
        return cls.one(n) * Fraction(c)

    @classmethod
    def alpha(cls, n, p: CoeffPoly):
        return cls._raw(n, {(EMPTY_WORD, m, ()): c for m, c in p.terms.items()})

    @classmethod
    def beta(cls, n, p: CoeffPoly):
        return cls._raw(n, {(EMPTY_WORD, (), m): c for m, c in p.terms.items()})

    @classmethod
    def X(cls, n, k):
        _check_indices(n, k)
        return cls._raw(n, {(((), (k,), ()), (), ()): 1})

    @classmethod
    def Y(cls, n, i, j):
        _check_indices(n, i, j)
        return cls._raw(n, {(((), (), ((i, j),)), (), ()): 1})

    @classmethod
    def delta(cls, n, i, j, k, ells=()):
        _check_indices(n, i, j, k, *ells)
        return cls._raw(n, canonical_delta(n, i, j, k, tuple(ells)))

    # arithmetic --------------------------------------------------------------
    def __add__(self, other):
        _same_n(self, other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            _add(out, k, c)
        return HElement._raw(self.n, out)

    def __neg__(self):
        return HElement._raw(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return HElement(self.n)
            return HElement._raw(self.n, {k: c * other for k, c in self.terms.items()})
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if not isinstance(other, HElement):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self):
        return hash((self.n, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def words(self):
        return {k[0] for k in self.terms}

    def __repr__(self):
        return f"HElement(n={self.n}, {self})"

    def __str__(self):
        return format_element(self)


def _check_indices(n, *idx):
    for i in idx:
        if not isinstance(i, int) or not 1 <= i <= n:
            raise IndexError_(f"index {i!r} outside 1..{n}")


def _same_n(a, b):
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


# brackets of X and Y with delta generators ----------------------------------------
#
# A canonical delta generator has lower indices j <= k <= l1 <= ... <= lr,
# the l's listed innermost first.  Brackets of X and Y with a generator are
# "delta polynomials": term dicts whose words carry only a delta block.
# Exchanging k with the innermost l uses the structure relation
#   D^p_{qk,l} - D^p_{ql,k} = b(R^p_{qkl}) - a(R^p_{qkl})
#                             + sum_m (D^p_{mk} D^m_{ql} - D^m_{qk} D^p_{ml}),
# the one forced by the Jacobi identity for X_k, X_l and b(f).


def _dterm(kappa, p=(), q=()):
    return ((kappa, (), ()), p, q)


@lru_cache(maxsize=None)
def delta_bracket(d, gen, n):
    """[d, gen] for a derivation d, as a tuple of delta-polynomial terms."""
    _, _, i, j, k, ells = gen
    out: dict = {}
    if d[0] == "X":
        l = d[1]
        if ells:
            last = ells[-1]
            if l >= last:
                _add(out, _dterm((delta_atom(i, j, k, ells + (l,)),)), 1)
                return tuple(out.items())
            inner = gen[:5] + (ells[:-1],)
            # [X_l, [X_last, D']] = [X_last, [X_l, D']] + sum a(R^a_{b l last}) [Y_a^b, D']
            _accumulate(out, dpoly_derive(("X", last), dict(delta_bracket(d, inner, n)), n))
            for a, b in product(range(1, n + 1), repeat=2):
                r = CoeffPoly.from_atom(("R", a, b, l, last, ()))
                for rm, rc in r.terms.items():
                    for (w, p, q), c in delta_bracket(("Y", a, b), inner, n):
                        _add(out, (w, mono_mul(rm, p), q), c * exact(rc))
            return tuple(out.items())
        if l >= k:
            _add(out, _dterm((delta_atom(i, j, k, (l,)),)), 1)
            return tuple(out.items())
        lo, hi = min(j, l), max(j, l)
        _add(out, _dterm((delta_atom(i, lo, hi, (k,)),)), 1)
        r = CoeffPoly.from_atom(("R", i, j, k, l, ()))
        for rm, rc in r.terms.items():
            _add(out, _dterm((), (), rm), rc)
            _add(out, _dterm((), rm, ()), -rc)
        for m in range(1, n + 1):
            pair1 = tuple(sorted((delta_atom(i, m, k), delta_atom(m, j, l))))
            pair2 = tuple(sorted((delta_atom(m, j, k), delta_atom(i, m, l))))
            _add(out, _dterm(pair1), 1)
            _add(out, _dterm(pair2), -1)
        return tuple(out.items())
    lo, up = d[1], d[2]
    if ells:
        last = ells[-1]
        inner = gen[:5] + (ells[:-1],)
        # [Y, [X_last, D']] = [X_last, [Y, D']] + [up == last] [X_lo, D']
        _accumulate(out, dpoly_derive(("X", last), dict(delta_bracket(d, inner, n)), n))
        if up == last:
            _accumulate(out, delta_bracket(("X", lo), inner, n))
        return tuple(out.items())
    if j == up:
        _add(out, _dterm((delta_atom(i, lo, k),)), 1)
    if k == up:
        _add(out, _dterm((delta_atom(i, j, lo),)), 1)
    if i == lo:
        _add(out, _dterm((delta_atom(up, j, k),)), -1)
    return tuple(out.items())


def dpoly_derive(d, terms: dict, n: int) -> dict:
    """Bracket of X or Y with a commutative delta polynomial (Leibniz)."""
    out: dict = {}
    for ((kappa, _xs, _ys), p, q), c in terms.items():
        if p:
            for dm, dc in derive_atom_mono(p, d, n):
                _add(out, _dterm(kappa, dm, q), c * dc)
        if q:
            for dm, dc in derive_atom_mono(q, d, n):
                _add(out, _dterm(kappa, p, dm), c * dc)
            if d[0] == "X":
                for i, j in product(range(1, n + 1), repeat=2):
                    da = delta_atom(i, j, d[1])
                    for dm, dc in derive_atom_mono(q, ("Y", i, j), n):
                        _add(out, _dterm(_insert_sorted(kappa, da), p, dm), c * dc)
        for t, gen in enumerate(kappa):
            if t and kappa[t - 1] == gen:
                continue
            mult = kappa.count(gen)
            others = kappa[:t] + kappa[t + 1:]
            for ((k2, _x, _y), p2, q2), c2 in delta_bracket(d, gen, n):
                _add(out, _dterm(_kappa_with(others, k2), mono_mul(p, p2), mono_mul(q, q2)),
                     c * c2 * mult)
    return out


def canonical_delta(n, i, j, k, ells=()) -> dict:
    """The generator [X_lr, ... [X_l1, D^i_{jk}]] as a delta polynomial."""
    terms = {_dterm((delta_atom(i, min(j, k), max(j, k)),)): 1}
    for l in ells:
        terms = dpoly_derive(("X", l), terms, n)
    return terms


# left multiplication ---------------------------------------------------------------

def _kappa_with(kappa, atoms):
    for a in atoms:
        kappa = _insert_sorted(kappa, a)
    return kappa


@lru_cache(maxsize=None)
def _pure_cached(g, word, n):
    """Generator times a bare PBW word, as a tuple of ((word, P, Q), c)."""
    kappa, xs, ys = word
    out: dict = {}
    kind = g[0]
    if kind == "D":
        _add(out, ((_insert_sorted(kappa, g[1]), xs, ys), (), ()), 1)
        return tuple(out.items())
    # pass g through the delta block
    for t, gen in enumerate(kappa):
        others = kappa[:t] + kappa[t + 1:]
        for ((k2, _x, _y), p2, q2), c in delta_bracket(_deriv_of(g), gen, n):
            _add(out, ((_kappa_with(others, k2), xs, ys), p2, q2), c)
    inner = _lmul_xy(g, xs, ys, n)
    for (w, p, q), c in inner.items():
        _add(out, ((_kappa_with(w[0], kappa), w[1], w[2]), p, q), c)
    return tuple(out.items())


def _deriv_of(g):
    return ("X", g[1]) if g[0] == "X" else ("Y", g[1], g[2])


def _lmul_xy(g, xs, ys, n) -> dict:
    """g * X_xs Y_ys with g an X or Y generator; no delta block present."""
    out: dict = {}
    if g[0] == "X":
        k = g[1]
        if not xs or k <= xs[0]:
            return {(((), (k,) + xs, ys), (), ()): 1}
        first = xs[0]
        rest = ((), xs[1:], ys)
        # X_k X_first = X_first X_k + sum a(R^i_{j k first}) Y_i^j
        inner = _lmul_xy(g, xs[1:], ys, n)
        _accumulate(out, lmul_terms(("X", first), inner, n))
        for i, j in product(range(1, n + 1), repeat=2):
            r = CoeffPoly.from_atom(("R", i, j, k, first, ()))
            if not r:
                continue
            yw = dict(_pure_cached(("Y", i, j), rest, n))
            for (w, p, q), c in yw.items():
                for rm, rc in r.terms.items():
                    _add(out, (w, mono_mul(rm, p), q), c * exact(rc))
        return out
    lo, up = g[1], g[2]
    if xs:
        first = xs[0]
        # Y_lo^up X_first = X_first Y + [up == first] X_lo
        inner = _lmul_xy(g, xs[1:], ys, n)
        _accumulate(out, lmul_terms(("X", first), inner, n))
        if up == first:
            _accumulate(out, dict(_pure_cached(("X", lo), ((), xs[1:], ys), n)))
        return out
    y = (lo, up)
    if not ys or y <= ys[0]:
        return {(((), (), (y,) + ys), (), ()): 1}
    first = ys[0]
    inner = _lmul_xy(g, (), ys[1:], n)
    _accumulate(out, lmul_terms(("Y",) + first, inner, n))
    (i, j), (k, l) = y, first
    if k == j:
        _accumulate(out, _lmul_xy(("Y", i, l), (), ys[1:], n))
    if i == l:
        _accumulate(out, _lmul_xy(("Y", k, j), (), ys[1:], n), -1)
    return out


def _accumulate(out: dict, src, scale=1):
    items = src.items() if isinstance(src, dict) else src
    for k, c in items:
        _add(out, k, c * scale)


def lmul_terms(g, terms: dict, n: int) -> dict:
    """Left-multiply a term dict by one generator.

    ``g`` is ('X', k), ('Y', i, j), ('D', atom), ('a', mono) or ('b', mono).
    """
    out = defaultdict(int)
    kind = g[0]
    if kind == "a" or kind == "b":
        for (w, p, q), c in terms.items():
            if kind == "a":
                out[(w, mono_mul(g[1], p), q)] += c
            else:
                out[(w, p, mono_mul(g[1], q))] += c
        return _clean(out)
    if kind == "D":
        for (w, p, q), c in terms.items():
            out[((_insert_sorted(w[0], g[1]), w[1], w[2]), p, q)] += c
        return _clean(out)
    d = _deriv_of(g)
    for (w, p, q), c in terms.items():
        for (w2, p2, q2), c2 in _pure_cached(g, w, n):
            out[(w2, mono_mul(p, p2), mono_mul(q, q2))] += c * c2
        if p:
            for dm, dc in derive_atom_mono(p, d, n):
                out[(w, dm, q)] += c * dc
        if q:
            for dm, dc in derive_atom_mono(q, d, n):
                out[(w, p, dm)] += c * dc
            if kind == "X":
                k = g[1]
                for i, j in product(range(1, n + 1), repeat=2):
                    da = delta_atom(i, j, k)
                    w3 = (_insert_sorted(w[0], da), w[1], w[2])
                    for dm, dc in derive_atom_mono(q, ("Y", i, j), n):
                        out[(w3, p, dm)] += c * dc
    return _clean(out)


@lru_cache(maxsize=None)
def derive_atom_mono(m, d, n):
    """Derivation applied to a monomial, as a tuple of (mono, coeff)."""
    p = CoeffPoly._raw({m: 1})
    return tuple((m, exact(c)) for m, c in derive(p, d, n).terms.items())


def word_generators(word):
    """The generator sequence of a bare word, left to right."""
    kappa, xs, ys = word
    return [("D", a) for a in kappa] + [("X", x) for x in xs] + [("Y",) + y for y in ys]


def mul(a: HElement, b: HElement) -> HElement:
    _same_n(a, b)
    n = a.n
    by_word: dict = {}
    for (w, p, q), c in a.terms.items():
        by_word.setdefault(w, []).append((p, q, c))
    out = defaultdict(int)
    for w1, coeffs in by_word.items():
        for key, c0 in b.terms.items():
            # the budget counts produced terms, so it does not depend on the memo tables
            res = _word_times_term(w1, key, n)
            _tick(len(res))
            for (w, p, q), c in res:
                c = c * c0
                for p1, q1, c1 in coeffs:
                    out[(w, mono_mul(p1, p), mono_mul(q1, q))] += c * c1
    return HElement._raw(n, _clean(out))


@lru_cache(maxsize=1 << 18)
def _word_times_term(w1, key, n):
    """A bare word times one unit term, as a tuple of ((word, P, Q), c)."""
    terms = {key: 1}
    for g in reversed(word_generators(w1)):
        terms = lmul_terms(g, terms, n)
    return tuple(terms.items())


def commutator(a: HElement, b: HElement) -> HElement:
    return mul(a, b) - mul(b, a)


# expression trees -------------------------------------------------------------------

def normalize(expr, n: int, max_steps: int | None = None) -> HElement:
    """Evaluate a generator expression tree to PBW normal form.

    Trees are tuples: ('sum', [..]), ('prod', [..]), ('neg', e),
    ('scalar', q), ('alpha', poly), ('beta', poly), ('X', k), ('Y', i, j),
    ('D', i, j, k, ells).
    """
    _steps.count = 0
    _steps.cap = max_steps
    try:
        return _eval(expr, n)
    finally:
        _steps.cap = None


def step_count() -> int:
    return getattr(_steps, "count", 0)


def _eval(e, n) -> HElement:
    kind = e[0]
    if kind == "sum":
        out = HElement(n)
        for s in e[1]:
            out = out + _eval(s, n)
        return out
    if kind == "prod":
        out = HElement.one(n)
        for f in e[1]:
            out = mul(out, _eval(f, n))
        return out
    if kind == "neg":
        return -_eval(e[1], n)
    if kind == "scalar":
        return HElement.scalar(n, e[1])
    if kind == "alpha":
        return HElement.alpha(n, e[1])
    if kind == "beta":
        return HElement.beta(n, e[1])
    if kind == "X":
        return HElement.X(n, e[1])
    if kind == "Y":
        return HElement.Y(n, e[1], e[2])
    if kind == "D":
        return HElement.delta(n, e[1], e[2], e[3], e[4] if len(e) > 4 else ())
    raise ValueError(f"unknown expression node {kind!r}")


# random trees ------------------------------------------------------------------------

def random_leaf(rnd: random.Random, n: int):
    kind = rnd.choice("XXYYDabs")
    if kind == "X":
        return ("X", rnd.randint(1, n))
    if kind == "Y":
        return ("Y", rnd.randint(1, n), rnd.randint(1, n))
    if kind == "D":
        j, k = sorted((rnd.randint(1, n), rnd.randint(1, n)))
        return ("D", rnd.randint(1, n), j, k, ())
    if kind == "a":
        return ("alpha", base(rnd.choice("fg")))
    if kind == "b":
        return ("beta", base(rnd.choice("fg")))
    return ("scalar", Fraction(rnd.randint(-3, 3), rnd.randint(1, 2)))


def random_bracketing(rnd: random.Random, leaves: list):
    """A random binary product tree over the leaves, in order."""
    if len(leaves) == 1:
        return leaves[0]
    cut = rnd.randint(1, len(leaves) - 1)
    return ("prod", [random_bracketing(rnd, leaves[:cut]), random_bracketing(rnd, leaves[cut:])])


def confluence_suite(n: int, trees: int = 500, seed: int = 0, max_leaves: int = 5) -> dict:
    """Normal forms agree across bracketings; the product is associative."""
    rnd = random.Random(seed)
    fails = {"reparenthesize": 0, "associative": 0}
    witness = None
    for _ in range(trees):
        leaves = [random_leaf(rnd, n) for _ in range(rnd.randint(2, max_leaves))]
        t1 = random_bracketing(rnd, leaves)
        t2 = random_bracketing(rnd, leaves)
        if normalize(t1, n) != normalize(t2, n):
            fails["reparenthesize"] += 1
            witness = witness or leaves
        cut1 = rnd.randint(1, len(leaves) - 1)
        cut2 = rnd.randint(cut1, len(leaves))
        a = normalize(("prod", leaves[:cut1]), n)
        b = normalize(("prod", leaves[cut1:cut2]), n)
        c = normalize(("prod", leaves[cut2:]), n)
        if mul(mul(a, b), c) != mul(a, mul(b, c)):
            fails["associative"] += 1
            witness = witness or leaves
    return {"passed": not any(fails.values()), "failures": fails, "trees": trees, "witness": witness}


# printing ----------------------------------------------------------------------------

def delta_str(a) -> str:
    _, _, i, j, k, xs = a
    if xs:
        return f"D[{i};{j},{k};{','.join(map(str, xs))}]"
    return f"D[{i};{j},{k}]"


def word_str(word) -> str:
    kappa, xs, ys = word
    parts = [delta_str(a) for a in kappa]
    parts += [f"X[{x}]" for x in xs]
    parts += [f"Y[{i},{j}]" for i, j in ys]
    return "*".join(parts)


def word_key(word):
    kappa, xs, ys = word
    return (-(len(kappa) + len(xs) + len(ys)), kappa, xs, ys)


def term_key(key):
    w, p, q = key
    return (word_key(w), len(p), p, len(q), q)


def term_body(key) -> str:
    w, p, q = key
    parts = []
    if p:
        parts.append(f"a({mono_str(p)})")
    if q:
        parts.append(f"b({mono_str(q)})")
    ws = word_str(w)
    if ws:
        parts.append(ws)
    return "*".join(parts)


def format_terms(items) -> str:
    items = sorted(items, key=lambda t: term_key(t[0]))
    if not items:
        return "0"
    out = ""
    for idx, (key, c) in enumerate(items):
        body = term_body(key)
        mag = abs(c)
        if not body:
            s = _frac_str(mag)
        elif mag == 1:
            s = body
        else:
            s = f"{_frac_str(mag)}*{body}"
        if idx == 0:
            out = ("-" if c < 0 else "") + s
        else:
            out += (" - " if c < 0 else " + ") + s
    return out


def format_element(h: HElement) -> str:
    return format_terms(h.terms.items())
