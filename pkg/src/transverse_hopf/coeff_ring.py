"""Formal differential ring of functions on the frame bundle.

A polynomial is a sparse map from monomials (sorted tuples of atoms) to
exact rationals.  Atoms are plain tuples so they hash and sort cheaply:

    ('b', name, xs, ys)         generic function with a derivation word
    ('R', i, j, k, l, xs)       curvature component, stored with k < l
    ('g', phi, i, j, k, xs)     connection jet of a diffeomorphism, j <= k

For generic functions and curvature the derivation word reads
leftmost-outermost: xs = (1, 2) means X_1 X_2, kept nondecreasing, then
(generic functions only) a nondecreasing Y-block.  A jet atom instead
lists its X-derivatives innermost first, ells = (1, 2) meaning X_2 X_1,
kept nondecreasing.  Curvature and jet atoms carry no Y-block because the
vertical fields act on them tensorially.

Derivations are written ('X', k) and ('Y', i, j); the latter is Y_i^j with
i the lower and j the upper index.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product

IDENTITY = "Id"

__all__ = [
    "IDENTITY",
    "CoeffPoly",
    "IndexError_",
    "UnboundAtom",
    "base",
    "curv",
    "gamma",
    "const",
    "derive",
    "substitute",
    "atom_str",
    "mono_mul",
    "curv_atom",
    "gamma_atom",
]


class IndexError_(ValueError):
    """An index lies outside 1..n."""


class UnboundAtom(KeyError):
    """Total substitution met an atom with no binding."""


def mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    return tuple(sorted(m1 + m2))


class CoeffPoly:
    """Immutable sparse polynomial over the rationals in atom symbols."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for m, c in terms.items():
                if c:
                    clean[m] = Fraction(c)
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "CoeffPoly":
        p = cls.__new__(cls)
        p.terms = terms
        p._hash = None
        return p

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c) -> "CoeffPoly":
        return cls({(): Fraction(c)}) if c else cls()

    @classmethod
    def from_atom(cls, a) -> "CoeffPoly":
        a, sign = canonical_atom(a)
        if sign == 0:
            return cls()
        return cls._raw({(a,): Fraction(sign)})

    # ring operations ------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return CoeffPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return CoeffPoly._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return CoeffPoly()
            return CoeffPoly._raw({m: c * other for m, c in self.terms.items()})
        other = _coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                v = out.get(m, 0) + c1 * c2
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return CoeffPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = CoeffPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    # comparison -----------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CoeffPoly.const(other)
        if not isinstance(other, CoeffPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def atoms(self) -> set:
        return {a for m in self.terms for a in m}

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def __repr__(self):
        return f"CoeffPoly({self})"

    def __str__(self):
        return format_poly(self)


def _coerce(x) -> CoeffPoly:
    if isinstance(x, CoeffPoly):
        return x
    if isinstance(x, (int, Fraction)):
        return CoeffPoly.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to CoeffPoly")


# atoms --------------------------------------------------------------------

def canonical_atom(a):
    """Return (atom, sign) with symmetries applied; sign 0 means zero."""
    tag = a[0]
    if tag == "R":
        _, i, j, k, l, xs = a
        if k == l:
            return a, 0
        if k > l:
            return ("R", i, j, l, k, xs), -1
        return a, 1
    if tag == "g":
        _, phi, i, j, k, xs = a
        if phi == IDENTITY:
            return a, 0
        if j > k:
            return ("g", phi, i, k, j, xs), 1
        return a, 1
    return a, 1


def curv_atom(i, j, k, l, xs=()):
    return ("R", i, j, k, l, tuple(xs))


def gamma_atom(phi, i, j, k, xs=()):
    return ("g", phi, i, j, k, tuple(xs))


def const(c) -> CoeffPoly:
    return CoeffPoly.const(c)


def base(name: str) -> CoeffPoly:
    return CoeffPoly.from_atom(("b", name, (), ()))


def curv(i, j, k, l) -> CoeffPoly:
    return CoeffPoly.from_atom(curv_atom(i, j, k, l))


def gamma(phi, i, j, k, ells=(), n: int | None = None) -> CoeffPoly:
    """Jet symbol X_{lr} ... X_{l1} applied to the base symbol.

    ``ells`` reads innermost first; an unsorted list is canonicalized with
    the curvature corrections.
    """
    ells = tuple(ells)
    if list(ells) == sorted(ells):
        return CoeffPoly.from_atom(gamma_atom(phi, i, j, k, ells))
    out = CoeffPoly.from_atom(gamma_atom(phi, i, j, k))
    if n is None:
        raise ValueError("unsorted jet indices need the dimension n")
    for l in ells:
        out = derive(out, ("X", l), n)
    return out


# derivations ----------------------------------------------------------------

def _with_xs(a, xs):
    if a[0] == "b":
        return ("b", a[1], xs, a[3])
    if a[0] == "R":
        return a[:5] + (xs,)
    return a[:5] + (xs,)


def _xs(a):
    return a[2] if a[0] == "b" else a[5]


@lru_cache(maxsize=None)
def _apply_x(k: int, a, n: int) -> CoeffPoly:
    if a[0] == "g":
        return _apply_x_jet(k, a, n)
    xs = _xs(a)
    if not xs or k <= xs[0]:
        return CoeffPoly.from_atom(_with_xs(a, (k,) + xs))
    first = xs[0]
    rest = _with_xs(a, xs[1:])
    # X_k X_first g = X_first X_k g + sum R^i_{j k first} Y_i^j g
    out = _derive_poly(_apply_x(k, rest, n), ("X", first), n)
    for i, j in product(range(1, n + 1), repeat=2):
        r = CoeffPoly.from_atom(curv_atom(i, j, k, first))
        out = out + r * _apply_y(i, j, rest, n)
    return out


def _apply_x_jet(k, a, n):
    ells = a[5]
    if not ells or k >= ells[-1]:
        return CoeffPoly.from_atom(a[:5] + (ells + (k,),))
    last = ells[-1]
    rest = a[:5] + (ells[:-1],)
    # X_k X_last g = X_last X_k g + sum R^i_{j k last} Y_i^j g
    out = _derive_poly(_apply_x(k, rest, n), ("X", last), n)
    for i, j in product(range(1, n + 1), repeat=2):
        r = CoeffPoly.from_atom(curv_atom(i, j, k, last))
        out = out + r * _apply_y(i, j, rest, n)
    return out


@lru_cache(maxsize=None)
def _apply_y(lo: int, up: int, a, n: int) -> CoeffPoly:
    if a[0] == "g" and a[5]:
        last = a[5][-1]
        rest = a[:5] + (a[5][:-1],)
        out = _derive_poly(_apply_y(lo, up, rest, n), ("X", last), n)
        if up == last:
            out = out + _apply_x(lo, rest, n)
        return out
    xs = _xs(a)
    if xs and a[0] != "g":
        first = xs[0]
        rest = _with_xs(a, xs[1:])
        # Y_lo^up X_first g = X_first Y g + [up == first] X_lo g
        out = _derive_poly(_apply_y(lo, up, rest, n), ("X", first), n)
        if up == first:
            out = out + _apply_x(lo, rest, n)
        return out
    tag = a[0]
    if tag == "b":
        return _insert_y(a[1], (lo, up), a[3], n)
    if tag == "R":
        _, i, j, k, l, _xs0 = a
        out = CoeffPoly()
        if j == up:
            out = out + CoeffPoly.from_atom(curv_atom(i, lo, k, l))
        if k == up:
            out = out + CoeffPoly.from_atom(curv_atom(i, j, lo, l))
        if l == up:
            out = out + CoeffPoly.from_atom(curv_atom(i, j, k, lo))
        if i == lo:
            out = out - CoeffPoly.from_atom(curv_atom(up, j, k, l))
        return out
    _, phi, i, j, k, _xs0 = a
    out = CoeffPoly()
    if j == up:
        out = out + CoeffPoly.from_atom(gamma_atom(phi, i, lo, k))
    if k == up:
        out = out + CoeffPoly.from_atom(gamma_atom(phi, i, j, lo))
    if i == lo:
        out = out - CoeffPoly.from_atom(gamma_atom(phi, up, j, k))
    return out


def _insert_y(name, y, ys, n) -> CoeffPoly:
    if not ys or y <= ys[0]:
        return CoeffPoly.from_atom(("b", name, (), (y,) + ys))
    first = ys[0]
    # Y_y Y_first h = Y_first Y_y h + [Y_y, Y_first] h
    out = _derive_poly(_insert_y(name, y, ys[1:], n), ("Y",) + first, n)
    (i, j), (k, l) = y, first
    if k == j:
        out = out + _insert_y(name, (i, l), ys[1:], n)
    if i == l:
        out = out - _insert_y(name, (k, j), ys[1:], n)
    return out


def derive_atom(a, d, n: int) -> CoeffPoly:
    if d[0] == "X":
        return _apply_x(d[1], a, n)
    return _apply_y(d[1], d[2], a, n)


def _derive_poly(f: CoeffPoly, d, n: int) -> CoeffPoly:
    out: dict = {}
    for m, c in f.terms.items():
        if not m:
            continue
        seen = set()
        for idx, a in enumerate(m):
            if a in seen:
                continue
            seen.add(a)
            mult = m.count(a)
            rest = m[:idx] + m[idx + 1:]
            da = derive_atom(a, d, n)
            for dm, dc in da.terms.items():
                mm = mono_mul(rest, dm)
                v = out.get(mm, 0) + c * mult * dc
                if v:
                    out[mm] = v
                else:
                    out.pop(mm, None)
    return CoeffPoly._raw(out)


def check_derivation(d, n: int) -> None:
    if d[0] not in ("X", "Y") or len(d) != (2 if d[0] == "X" else 3):
        raise ValueError(f"malformed derivation {d!r}")
    for idx in d[1:]:
        if not 1 <= idx <= n:
            raise IndexError_(f"index {idx} outside 1..{n}")


def derive(f: CoeffPoly, d, n: int) -> CoeffPoly:
    """Apply the derivation ``d`` (('X', k) or ('Y', i, j)) in dimension n."""
    check_derivation(d, n)
    return _derive_poly(_coerce(f), d, n)


def substitute(f: CoeffPoly, env: dict, total: bool = False) -> CoeffPoly:
    """Homomorphic substitution of atoms by polynomials."""
    out = CoeffPoly()
    for m, c in f.terms.items():
        term = CoeffPoly.const(c)
        for a in m:
            if a in env:
                term = term * _coerce(env[a])
            elif total:
                raise UnboundAtom(a)
            else:
                term = term * CoeffPoly._raw({(a,): Fraction(1)})
        out = out + term
    return out


def flat_env(f: CoeffPoly) -> dict:
    """Binding that sends every curvature atom occurring in ``f`` to 0."""
    return {a: CoeffPoly() for a in f.atoms() if a[0] == "R"}


# printing ---------------------------------------------------------------------

def atom_str(a) -> str:
    tag = a[0]
    if tag == "b":
        s = a[1]
        for y in reversed(a[3]):
            s = f"Dy[{y[0]},{y[1]}]({s})"
        for x in reversed(a[2]):
            s = f"Dx[{x}]({s})"
        return s
    if tag == "R":
        s = f"R[{a[1]},{a[2]},{a[3]},{a[4]}]"
        for x in reversed(a[5]):
            s = f"Dx[{x}]({s})"
        return s
    _, phi, i, j, k, xs = a
    if xs:
        return f"g[{phi};{i};{j},{k};{','.join(map(str, xs))}]"
    return f"g[{phi};{i};{j},{k}]"


def _frac_str(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def mono_str(m) -> str:
    return "*".join(atom_str(a) for a in m)


def format_poly(p: CoeffPoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for m, c in p.sorted_terms():
        body = mono_str(m)
        if not body:
            s = _frac_str(abs(c))
        elif abs(c) == 1:
            s = body
        else:
            s = f"{_frac_str(abs(c))}*{body}"
        parts.append(("-" if c < 0 else "+", s))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, s in parts[1:]:
        out += f" {sign} {s}"
    return out
