"""Truncated Weil complex of a connection matrix theta and its curvature R.

A monomial is ``(thetas, curvs)``: a strictly increasing tuple of anticommuting
theta index pairs and a sorted tuple of commuting curvature index pairs.
Monomials with more than ``n`` curvature factors vanish.
"""

from __future__ import annotations

import random
from fractions import Fraction


def _sort_sign(items):
    """Sort anticommuting factors; returns (sign, tuple) with sign 0 on repeats."""
    items = list(items)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and items[j - 1] > items[j]:
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b:
            return 0, ()
    return sign, tuple(items)


class WeilForm:
    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms=None):
        self.n = n
        self.terms = {}
        for (th, cv), c in (terms or {}).items():
            sign, th2 = _sort_sign(th)
            if sign and len(cv) <= n:
                key = (th2, tuple(sorted(cv)))
                v = self.terms.get(key, 0) + Fraction(c) * sign
                if v:
                    self.terms[key] = v
                else:
                    self.terms.pop(key, None)

    @classmethod
    def one(cls, n):
        return cls(n, {((), ()): 1})

    @classmethod
    def theta(cls, n, i, j):
        _check(n, i, j)
        return cls(n, {(((i, j),), ()): 1})

    @classmethod
    def curv(cls, n, i, j):
        _check(n, i, j)
        return cls(n, {((), ((i, j),)): 1})

    def degrees(self):
        return {len(th) + 2 * len(cv) for th, cv in self.terms}

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0) + c
        return WeilForm(self.n, out)

    def __neg__(self):
        return WeilForm(self.n, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, WeilForm):
            return WeilForm(self.n, {k: c * Fraction(other) for k, c in self.terms.items()})
        out: dict = {}
        for (t1, c1), a in self.terms.items():
            for (t2, c2), b in other.terms.items():
                key = (t1 + t2, c1 + c2)
                out[key] = out.get(key, 0) + a * b
        return WeilForm(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, WeilForm) and self.n == other.n and self.terms == other.terms

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"WeilForm({format_form(self)})"


def _check(n, i, j):
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"index out of range 1..{n}")


def _from_factors(n, thetas, curvs, coeff):
    return WeilForm(n, {(tuple(thetas), tuple(curvs)): coeff})


def _d_theta(n, i, j):
    out = {((), ((i, j),)): Fraction(1)}
    for k in range(1, n + 1):
        out[(((i, k), (k, j)), ())] = out.get((((i, k), (k, j)), ()), 0) - 1
    return out


def _d_curv(n, i, j):
    out: dict = {}
    for k in range(1, n + 1):
        a = (((k, j),), ((i, k),))
        b = (((i, k),), ((k, j),))
        out[a] = out.get(a, 0) + 1
        out[b] = out.get(b, 0) - 1
    return out


def weil_d(w: WeilForm) -> WeilForm:
    """Graded derivation of degree one; theta factors are odd, R factors even."""
    n = w.n
    out = WeilForm(n)
    for (th, cv), c in w.terms.items():
        for pos, (i, j) in enumerate(th):
            sign = -1 if pos % 2 else 1
            for (th2, cv2), c2 in _d_theta(n, i, j).items():
                out = out + _from_factors(n, th[:pos] + th2 + th[pos + 1:], cv + cv2, c * c2 * sign)
        odd = -1 if len(th) % 2 else 1
        for pos, (i, j) in enumerate(cv):
            rest = cv[:pos] + cv[pos + 1:]
            for (th2, cv2), c2 in _d_curv(n, i, j).items():
                out = out + _from_factors(n, th + th2, rest + cv2, c * c2 * odd)
    return out


def interior(w: WeilForm, A) -> WeilForm:
    """Contraction with a matrix A (1-based entries A[i-1][j-1]); kills R."""
    n = w.n
    out = WeilForm(n)
    for (th, cv), c in w.terms.items():
        for pos, (i, j) in enumerate(th):
            a = Fraction(A[i - 1][j - 1])
            if a:
                sign = -1 if pos % 2 else 1
                out = out + _from_factors(n, th[:pos] + th[pos + 1:], cv, c * a * sign)
    return out


def lie_derivative(w: WeilForm, A) -> WeilForm:
    return weil_d(interior(w, A)) + interior(weil_d(w), A)


def rotation_generators(n: int):
    """Basis E_ab - E_ba (a < b) of the skew-symmetric matrices."""
    gens = []
    for a in range(n):
        for b in range(a + 1, n):
            m = [[0] * n for _ in range(n)]
            m[a][b], m[b][a] = 1, -1
            gens.append(m)
    return gens


def is_basic(w: WeilForm, gens=None) -> bool:
    gens = rotation_generators(w.n) if gens is None else gens
    for A in gens:
        if any(A[i][j] != -A[j][i] for i in range(w.n) for j in range(w.n)):
            raise ValueError("generator must be skew-symmetric")
        if interior(w, A) or lie_derivative(w, A):
            return False
    return True


def is_closed(w: WeilForm) -> bool:
    return not weil_d(w)


def chern(n: int, k: int) -> WeilForm:
    """Trace of the k-th power of the curvature matrix."""
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    out = WeilForm(n)
    idx = range(1, n + 1)

    def walk(path):
        nonlocal out
        if len(path) == k:
            pairs = [(path[m], path[(m + 1) % k]) for m in range(k)]
            out = out + _from_factors(n, (), pairs, 1)
            return
        for i in idx:
            walk(path + [i])

    walk([])
    return out


def h1(n: int) -> WeilForm:
    out = WeilForm(n)
    for i in range(1, n + 1):
        out = out + WeilForm.theta(n, i, i)
    return out


def gv(n: int) -> WeilForm:
    w = h1(n)
    c = chern(n, 1)
    for _ in range(n):
        w = w * c
    return w


def class_builder(name: str, n: int, k: int | None = None) -> WeilForm:
    if name == "chern":
        if k is None:
            raise ValueError("chern needs k")
        return chern(n, k)
    if name == "h1":
        return h1(n)
    if name == "gv":
        return gv(n)
    raise ValueError(f"unknown class {name!r}")


def random_form(n: int, rnd: random.Random, max_degree: int, terms: int = 3) -> WeilForm:
    """Sum of random monomials of total degree at most max_degree."""
    pairs = [(i, j) for i in range(1, n + 1) for j in range(1, n + 1)]
    out = WeilForm(n)
    for _ in range(terms):
        deg = rnd.randint(0, max_degree)
        ncurv = rnd.randint(0, min(n, deg // 2))
        nth = deg - 2 * ncurv
        th = rnd.sample(pairs, min(nth, len(pairs)))
        cv = [rnd.choice(pairs) for _ in range(ncurv)]
        out = out + _from_factors(n, th, cv, Fraction(rnd.randint(-3, 3), rnd.randint(1, 2)))
    return out


def format_form(w: WeilForm) -> str:
    if not w.terms:
        return "0"
    parts = []
    for (th, cv), c in sorted(w.terms.items()):
        body = "*".join([f"th[{i},{j}]" for i, j in th] + [f"R[{i},{j}]" for i, j in cv])
        if not body:
            parts.append(str(c))
        elif c == 1:
            parts.append(body)
        elif c == -1:
            parts.append("-" + body)
        else:
            parts.append(f"{c}*{body}")
    return " + ".join(parts).replace("+ -", "- ")
