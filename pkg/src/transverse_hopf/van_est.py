"""Weil classes to Hopf cyclic cochains through simplices of connections.

Exterior forms on the frame bundle are written in the coframe
``("th", k)`` (canonical form) and ``("om", a, b)`` (connection form paired
with ``Y[a,b]``), plus ``("dt", r)`` on the simplex.  Coefficients are
CoeffPoly in curvature and jet atoms; jet atoms of a vertex carry the vertex
label as their diffeomorphism name.

The crossed-product evaluation works with one base point per argument.  A
quantity living at the base point of argument ``k`` is a coefficient atom
tagged ``@k``: ``b("@k")`` with derivatives is the k-th argument function, a
jet atom with name ``@k`` is the jet of the k-th diffeomorphism.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial

import sympy as sp

from .coeff_ring import (
    IDENTITY,
    CoeffPoly,
    curv,
    derive,
    format_poly,
    gamma,
)
from .cyclic_module import (
    CyclicCochain,
    HopfInstance,
    cocycle_check,
    connes_B,
    hochschild_b,
    total_boundary,
)
from .hopf_core import HElement
from .hopf_structure import TensorElement, tensor_normalize
from .weil_complex import WeilForm, weil_d

# curvature sign of the connection form relative to [X_k, X_l] = R Y; fixed
# by requiring d(d f) = 0 on functions
CURV_SIGN = -1

# pairing sign of the form against the simplex integral; fixed by the chain map check
PAIR_SIGN = lambda p, m: 1


# exterior forms -------------------------------------------------------------------

def _gen_key(g):
    return {"dt": 0, "th": 1, "om": 2}[g[0]], g[1:]


def _merge(g1: tuple, g2: tuple):
    """Sign and sorted generator tuple of g1 ^ g2; sign 0 if a factor repeats."""
    items = list(g1 + g2)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and _gen_key(items[j - 1]) > _gen_key(items[j]):
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    for a, b in zip(items, items[1:]):
        if a == b:
            return 0, ()
    return sign, tuple(items)


class SimplexForm:
    """Sum of coeff * t^e * generators; ``t`` are the simplex coordinates t_1..t_p."""

    __slots__ = ("n", "p", "terms")

    def __init__(self, n: int, p: int, terms=None):
        self.n, self.p = n, p
        self.terms = {}
        for k, c in (terms or {}).items():
            if c:
                self.terms[k] = c

    @classmethod
    def scalar(cls, n, p, c) -> "SimplexForm":
        return cls(n, p, {((), (0,) * p): CoeffPoly.const(c) if not isinstance(c, CoeffPoly) else c})

    @classmethod
    def gen(cls, n, p, g, coeff=1) -> "SimplexForm":
        c = coeff if isinstance(coeff, CoeffPoly) else CoeffPoly.const(coeff)
        return cls(n, p, {((g,), (0,) * p): c})

    @classmethod
    def t(cls, n, p, r) -> "SimplexForm":
        """Barycentric coordinate t_r, with t_0 = 1 - t_1 - ... - t_p."""
        if r == 0:
            out = cls.scalar(n, p, 1)
            for s in range(1, p + 1):
                out = out - cls.t(n, p, s)
            return out
        e = tuple(1 if s == r else 0 for s in range(1, p + 1))
        return cls(n, p, {((), e): CoeffPoly.const(1)})

    def degree_set(self):
        return {len(g) for g, _ in self.terms}

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return SimplexForm(self.n, self.p, out)

    def __neg__(self):
        return SimplexForm(self.n, self.p, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "SimplexForm":
        return SimplexForm(self.n, self.p, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        """Wedge product."""
        if not isinstance(other, SimplexForm):
            return self.scale(other)
        out: dict = {}
        for (g1, e1), c1 in self.terms.items():
            for (g2, e2), c2 in other.terms.items():
                sign, g = _merge(g1, g2)
                if not sign:
                    continue
                key = (g, tuple(a + b for a, b in zip(e1, e2)))
                v = c1 * c2 * sign
                out[key] = out[key] + v if key in out else v
        return SimplexForm(self.n, self.p, out)

    def __eq__(self, other):
        return isinstance(other, SimplexForm) and (self.n, self.p, self.terms) == (other.n, other.p, other.terms)

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f"SimplexForm(p={self.p}, {len(self.terms)} terms)"


def _gen_str(g) -> str:
    if g[0] == "om":
        return f"om[{g[1]},{g[2]}]"
    return f"{g[0]}[{g[1]}]"


def format_simplex_form(w: SimplexForm) -> str:
    if not w.terms:
        return "0"
    parts = []
    for (gens, e), c in sorted(w.terms.items(), key=lambda kv: (len(kv[0][0]), [_gen_key(g) for g in kv[0][0]], kv[0][1])):
        body = [f"t{r + 1}^{x}" if x > 1 else f"t{r + 1}" for r, x in enumerate(e) if x]
        body += [_gen_str(g) for g in gens]
        coef = format_poly(c)
        if len(c.terms) > 1:
            coef = f"({coef})"
        if body and coef in ("1", "-1"):
            parts.append(coef[:-1] + "*".join(body))
        else:
            parts.append("*".join([coef] + body) if body else coef)
    return " + ".join(parts).replace("+ -", "- ")


def _coeff_d(n, p, c: CoeffPoly) -> SimplexForm:
    """d of a coefficient: sum X_k(c) theta^k + sum Y[a,b](c) omega^a_b."""
    out = SimplexForm(n, p)
    for k in range(1, n + 1):
        out = out + SimplexForm.gen(n, p, ("th", k), derive(c, ("X", k), n))
    for a in range(1, n + 1):
        for b in range(1, n + 1):
            out = out + SimplexForm.gen(n, p, ("om", a, b), derive(c, ("Y", a, b), n))
    return out


def _gen_d(n, p, g) -> SimplexForm:
    if g[0] == "dt":
        return SimplexForm(n, p)
    if g[0] == "th":
        k = g[1]
        out = SimplexForm(n, p)
        for l in range(1, n + 1):
            out = out - SimplexForm.gen(n, p, ("om", k, l)) * SimplexForm.gen(n, p, ("th", l))
        return out
    _, a, b = g
    out = SimplexForm(n, p)
    for c in range(1, n + 1):
        out = out - SimplexForm.gen(n, p, ("om", a, c)) * SimplexForm.gen(n, p, ("om", c, b))
    for k in range(1, n + 1):
        for l in range(k + 1, n + 1):
            out = out + (SimplexForm.gen(n, p, ("th", k), curv(a, b, k, l) * CURV_SIGN)
                         * SimplexForm.gen(n, p, ("th", l)))
    return out


def form_d(w: SimplexForm) -> SimplexForm:
    """Exterior derivative on the simplex times the frame bundle."""
    n, p = w.n, w.p
    out = SimplexForm(n, p)
    for (gens, e), c in w.terms.items():
        mono = SimplexForm(n, p, {(gens, e): CoeffPoly.const(1)})
        scalar_part = SimplexForm(n, p, {((), e): CoeffPoly.const(1)})
        out = out + _coeff_d(n, p, c) * mono
        for r in range(1, p + 1):
            if e[r - 1]:
                e2 = tuple(x - 1 if s == r - 1 else x for s, x in enumerate(e))
                dt = SimplexForm(n, p, {((("dt", r),), e2): c * e[r - 1]})
                out = out + dt * SimplexForm(n, p, {(gens, (0,) * p): CoeffPoly.const(1)})
        for pos, g in enumerate(gens):
            sign = -1 if pos % 2 else 1
            left = SimplexForm(n, p, {(gens[:pos], (0,) * p): c * sign})
            right = SimplexForm(n, p, {(gens[pos + 1:], (0,) * p): CoeffPoly.const(1)})
            out = out + scalar_part * left * _gen_d(n, p, g) * right
    return out


# connection pullback -------------------------------------------------------------------

def pullback_connection(n: int, labels) -> list:
    """Matrix of SimplexForm: omega^i_j + sum_r t_r sum_k gamma^i_{jk}(label_r) theta^k."""
    labels = list(labels)
    p = len(labels) - 1
    mat = []
    for i in range(1, n + 1):
        row = []
        for j in range(1, n + 1):
            a = SimplexForm.gen(n, p, ("om", i, j))
            for r, lab in enumerate(labels):
                if lab == IDENTITY:
                    continue
                for k in range(1, n + 1):
                    a = a + SimplexForm.t(n, p, r) * SimplexForm.gen(n, p, ("th", k), gamma(lab, i, j, k))
            row.append(a)
        mat.append(row)
    return mat


def pullback_curvature(conn: list) -> list:
    n = len(conn)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            r = form_d(conn[i][j])
            for k in range(n):
                r = r + conn[i][k] * conn[k][j]
            row.append(r)
        out.append(row)
    return out


def pullback_weil(w: WeilForm, labels) -> SimplexForm:
    """Substitute the pulled-back connection and curvature into a Weil form."""
    degs = w.degrees()
    if len(degs) > 1:
        raise ValueError("Weil form is not homogeneous")
    n = w.n
    labels = list(labels)
    p = len(labels) - 1
    conn = pullback_connection(n, labels)
    curvm = pullback_curvature(conn) if any(cv for _, cv in w.terms) else None
    out = SimplexForm(n, p)
    for (th, cv), c in w.terms.items():
        term = SimplexForm.scalar(n, p, 1)
        for i, j in th:
            term = term * conn[i - 1][j - 1]
        for i, j in cv:
            term = term * curvm[i - 1][j - 1]
        out = out + term.scale(c)
    return out


def dirichlet(exps) -> Fraction:
    """Integral of t_1^a_1 ... t_p^a_p over the standard simplex."""
    num = 1
    for a in exps:
        num *= factorial(a)
    return Fraction(num, factorial(len(exps) + sum(exps)))


def simplex_integrate(w: SimplexForm) -> SimplexForm:
    """Integrate over the simplex; the result is a form with p = 0."""
    p = w.p
    full = tuple(("dt", r) for r in range(1, p + 1))
    out: dict = {}
    for (gens, e), c in w.terms.items():
        if gens[:p] != full:
            continue
        rest = gens[p:]
        if any(g[0] == "dt" for g in rest):
            continue
        key = (rest, ())
        v = c * dirichlet(e)
        out[key] = out[key] + v if key in out else v
    return SimplexForm(w.n, 0, out)


def group_cochain(w: WeilForm, p: int, m: int, labels) -> SimplexForm:
    """Sign-adjusted simplex integral of the pulled-back Weil form."""
    n = w.n
    (deg,) = w.degrees() or {0}
    if not (p >= 0 and -n * (n + 1) <= m <= 0 and p + m == deg - n * (n + 1)):
        raise ValueError(f"degree bookkeeping violated: p={p}, m={m}, deg={deg}")
    if len(labels) != p + 1:
        raise ValueError("need p + 1 labels")
    sign = -1 if (m * (m + 1) // 2) % 2 else 1
    return simplex_integrate(pullback_weil(w, labels)).scale(sign)


def bidegrees(w: WeilForm):
    n = w.n
    (deg,) = w.degrees() or {0}
    out = []
    for m in range(-n * (n + 1), 1):
        p = deg - n * (n + 1) - m
        if p >= 0:
            out.append((p, m))
    return out


# crossed-product evaluation ----------------------------------------------------------------

def _tag(k):
    return f"@{k}"


def _vol(n):
    gens = [("th", k) for k in range(1, n + 1)]
    gens += [("om", a, b) for a in range(1, n + 1) for b in range(1, n + 1)]
    return tuple(gens)


class _Ring:
    """Graded algebra of forms tensor the anticommuting vertex symbols."""

    def __init__(self, n):
        self.n = n

    @staticmethod
    def mul(x: dict, y: dict) -> dict:
        out: dict = {}
        for (g1, d1), c1 in x.items():
            for (g2, d2), c2 in y.items():
                s1, g = _merge(g1, g2)
                if not s1:
                    continue
                s2, d = _sort_signed(d1 + d2)
                if not s2:
                    continue
                sign = s1 * s2 * (-1 if (len(d1) * len(g2)) % 2 else 1)
                key = (g, d)
                v = c1 * c2 * sign
                out[key] = out[key] + v if key in out else v
        return {k: v for k, v in out.items() if v}


def _sort_signed(items):
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


class _Cycle:
    """Base points of the arguments in product order starting at slot s."""

    def __init__(self, n, q, s):
        self.n, self.q, self.s = n, q, s
        self.order = [(s + t) % (q + 1) for t in range(q + 1)]
        self.pos = {k: t for t, k in enumerate(self.order)}
        self._gam = {}

    def path_gamma(self, i):
        """Jet of the composite carrying the reference point to slot i, by indices."""
        if i in self._gam:
            return self._gam[i]
        t = self.pos[i]
        fwd = self.order[:t]
        back = self.order[t:]
        if 0 not in fwd:
            path, sign = fwd, 1
        else:
            path, sign = back, -1
        n = self.n
        out = {}
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                for c in range(1, n + 1):
                    v = CoeffPoly()
                    for j in path:
                        v = v + gamma(_tag(j), a, b, c)
                    out[(a, b, c)] = v * sign
        self._gam[i] = out
        return out

    def vertex_gamma(self, t):
        """Jet of the t-th vertex word at the reference point; slot list of atoms."""
        if t in (0, self.q + 1):
            return None
        return self.path_gamma(self.order[t])

    def x_at_ref(self, ell, f: CoeffPoly) -> CoeffPoly:
        """X_ell at the reference point of a polynomial in slot-local atoms."""
        n = self.n
        out = CoeffPoly()
        for mono, c in f.terms.items():
            for idx, a in enumerate(mono):
                rest = CoeffPoly._raw({mono[:idx] + mono[idx + 1:]: Fraction(c)})
                slot = _atom_slot(a, self.s)
                single = CoeffPoly.from_atom(a)
                dv = derive(single, ("X", ell), n)
                gam = self.path_gamma(slot)
                for lo in range(1, n + 1):
                    for up in range(1, n + 1):
                        g = gam[(lo, up, ell)]
                        if g:
                            dv = dv + derive(single, ("Y", lo, up), n) * g
                out = out + dv * rest
        return out


def _atom_slot(a, ref):
    if a[0] in ("b", "g") and isinstance(a[1], str) and a[1].startswith("@"):
        return int(a[1][1:])
    return ref


def _substitute_vertices(form: SimplexForm, cyc: _Cycle, vertex_of_label: dict) -> SimplexForm:
    """Replace vertex-label jet atoms by slot-local expansions."""
    cache = {}

    def expand(atom):
        if atom in cache:
            return cache[atom]
        if atom[0] == "g" and atom[1] in vertex_of_label:
            _, lab, a, b, c, ells = atom
            gam = cyc.vertex_gamma(vertex_of_label[lab])
            if gam is None:
                v = CoeffPoly()
            else:
                v = gam[(a, b, c)]
                for ell in ells:
                    v = cyc.x_at_ref(ell, v)
        else:
            v = CoeffPoly.from_atom(atom)
        cache[atom] = v
        return v

    out = {}
    for key, c in form.terms.items():
        total = CoeffPoly()
        for mono, k in c.terms.items():
            t = CoeffPoly.const(k)
            for a in mono:
                t = t * expand(a)
            total = total + t
        if total:
            out[key] = total
    return SimplexForm(form.n, form.p, out)


def _differential_of_argument(cyc: _Cycle, k: int) -> dict:
    """d(f^k) pulled back to the reference point, as a ring element."""
    n = cyc.n
    f = ("b", _tag(k))
    gam = cyc.path_gamma(k)
    out: dict = {}

    def add(g, c):
        key = ((g,), ())
        out[key] = out[key] + c if key in out else c

    for a in range(1, n + 1):
        for b in range(1, n + 1):
            yf = CoeffPoly.from_atom(("b", _tag(k), (), ((a, b),)))
            add(("om", a, b), yf)
            for c in range(1, n + 1):
                g = gam[(a, b, c)]
                if g:
                    add(("th", c), yf * g)
    for c in range(1, n + 1):
        add(("th", c), CoeffPoly.from_atom(("b", _tag(k), (c,), ())))
    del f
    return {k2: v for k2, v in out.items() if v}


def _delta_of_argument(cyc: _Cycle, k: int) -> dict:
    """-f^k (delta_{V_{t+1}} - delta_{V_t}) with t the position of slot k."""
    t = cyc.pos[k]
    fk = CoeffPoly.from_atom(("b", _tag(k), (), ()))
    out = {}
    if t + 1 <= cyc.q:
        out[((), (t + 1,))] = -fk
    if t >= 1:
        out[((), (t,))] = fk
    return out


@lru_cache(maxsize=None)
def _symbolic_cochain(w_key, n, p, m):
    w = WeilForm(n, dict(w_key))
    labels = [IDENTITY] + [f"L{r}" for r in range(1, p + 1)]
    return group_cochain(w, p, m, labels)


def _pair_top(n, eta_gens, form: SimplexForm) -> CoeffPoly:
    """Coefficient of the volume form in eta ^ form."""
    vol = _vol(n)
    out = CoeffPoly()
    for (gens, _), c in form.terms.items():
        sign, merged = _merge(eta_gens, gens)
        if sign and merged == vol:
            out = out + c * sign
    return out


def _to_tensor(n, q, poly: CoeffPoly, ref: int):
    """Slot-tagged polynomial to C^q of the Hopf algebra."""
    if q == 0:
        out = CoeffPoly()
        for mono, c in poly.terms.items():
            coeff = CoeffPoly.const(c)
            for a in mono:
                if a == ("b", _tag(0), (), ()):
                    continue
                if _atom_slot(a, ref) != 0:
                    raise ValueError("unexpected slot in degree zero")
                coeff = coeff * CoeffPoly.from_atom(a)
            out = out + coeff
        return out
    raw = []
    for mono, c in poly.terms.items():
        slots = [HElement.one(n) for _ in range(q)]
        words = [HElement.one(n) for _ in range(q)]
        last_beta = CoeffPoly.const(1)
        for a in mono:
            k = _atom_slot(a, ref)
            if a[0] == "b" and a[1] == _tag(k):
                if k == 0:
                    if a[2] or a[3]:
                        raise ValueError("zeroth argument differentiated")
                    continue
                z = HElement.one(n)
                for x in a[2]:
                    z = z * HElement.X(n, x)
                for lo, up in a[3]:
                    z = z * HElement.Y(n, lo, up)
                words[k - 1] = words[k - 1] * z
            elif a[0] == "g" and a[1] == _tag(k):
                if k == 0:
                    raise ValueError("jet of the zeroth argument left over")
                _, _, i, j, l, ells = a
                slots[k - 1] = slots[k - 1] * HElement.delta(n, i, j, l, ells)
            else:
                atom_poly = CoeffPoly.from_atom(a)
                if k == 0:
                    last_beta = last_beta * atom_poly
                else:
                    slots[k - 1] = HElement.alpha(n, atom_poly) * slots[k - 1]
        hs = [slots[i] * words[i] for i in range(q)]
        hs[-1] = HElement.beta(n, last_beta) * hs[-1]
        raw.append((c, hs))
    return tensor_normalize(raw, n) if raw else TensorElement(n, q)


def tilde_C_component(w: WeilForm, p: int, m: int):
    """The (p, m) component as an element of C^{p-m} of the Hopf algebra."""
    n = w.n
    q = p - m
    sym = _symbolic_cochain(tuple(sorted(w.terms.items())), n, p, m)
    labels = [f"L{r}" for r in range(1, p + 1)]
    pre = Fraction(factorial(p), factorial(q + 1))
    pair_sign = PAIR_SIGN(p, m)
    result = CoeffPoly() if q == 0 else TensorElement(n, q)
    for j in range(q + 1):
        s = (j + 1) % (q + 1)
        cyc = _Cycle(n, q, s)
        sign = -1 if (j * (q - j)) % 2 else 1
        terms = {((), ()): CoeffPoly.const(1)}
        for k in cyc.order:
            if k == 0:
                factor = {((), ()): CoeffPoly.from_atom(("b", _tag(0), (), ()))}
            else:
                factor = _differential_of_argument(cyc, k)
                for key, v in _delta_of_argument(cyc, k).items():
                    factor[key] = factor[key] + v if key in factor else v
            terms = _Ring.mul(terms, factor)
            terms = {kk: v for kk, v in terms.items() if len(kk[1]) <= p and len(kk[0]) <= -m}
        total = CoeffPoly()
        for (eta, verts), coef in terms.items():
            if len(verts) != p or len(eta) != -m:
                continue
            form = _substitute_vertices(sym, cyc, dict(zip(labels, verts)))
            val = _pair_top(n, eta, form)
            if val:
                total = total + coef * val
        if total:
            result = result + _to_tensor(n, q, total * (sign * pair_sign * pre), s)
    return result


def tilde_C(w: WeilForm) -> dict:
    """All components of a homogeneous Weil form, keyed by cochain degree."""
    out = {}
    for p, m in bidegrees(w):
        q = p - m
        comp = tilde_C_component(w, p, m)
        if q in out:
            out[q] = out[q] + comp
        else:
            out[q] = comp
    return out


def as_cochain(w: WeilForm, comps: dict) -> CyclicCochain:
    parity = next(iter(comps)) % 2 if comps else 0
    return CyclicCochain(parity, comps)


def _homogeneous_parts(w: WeilForm):
    parts = {}
    for key, c in w.terms.items():
        d = len(key[0]) + 2 * len(key[1])
        parts.setdefault(d, {})[key] = c
    return [WeilForm(w.n, t) for _, t in sorted(parts.items())]


def chain_map_check(w: WeilForm) -> dict:
    """Compare tilde_C(d w) with (b + B) tilde_C(w) degreewise."""
    n = w.n
    inst = HopfInstance(n)
    comps = tilde_C(w)
    lhs = {}
    for part in _homogeneous_parts(weil_d(w)):
        for q, x in tilde_C(part).items():
            lhs[q] = inst.add(lhs[q], x) if q in lhs else x
    rhs = total_boundary(inst, CyclicCochain(next(iter(comps)) % 2 if comps else 0, comps)) if comps else {}
    failures = []
    for q in sorted(set(lhs) | set(rhs)):
        a = lhs.get(q, inst.zero(q))
        b = rhs.get(q, inst.zero(q))
        if not inst.is_zero(inst.add(a, inst.scale(b, -1))):
            failures.append(q)
    return {"passed": not failures, "failed_degrees": failures, "lhs": lhs, "rhs": rhs}


def is_tilde_C_cocycle(w: WeilForm) -> dict:
    comps = tilde_C(w)
    c = CyclicCochain(next(iter(comps)) % 2, comps)
    return cocycle_check(HopfInstance(w.n), c)


phi_map = tilde_C


# consistency and specialization ----------------------------------------------------------------

def structure_consistency(w: WeilForm, labels) -> bool:
    """Pulling back commutes with the differentials: pullback(d w) == d(pullback w)."""
    labels = list(labels)
    lhs = SimplexForm(w.n, len(labels) - 1)
    for part in _homogeneous_parts(weil_d(w)):
        lhs = lhs + pullback_weil(part, labels)
    rhs = SimplexForm(w.n, len(labels) - 1)
    for part in _homogeneous_parts(w):
        rhs = rhs + form_d(pullback_weil(part, labels))
    return lhs == rhs


def d_squared_vanishes(w: SimplexForm) -> bool:
    return not form_d(form_d(w))


def _flat_mono(m) -> bool:
    return not any(a[0] == "R" for a in m)


def flat_specialize(x):
    """Set every curvature atom to zero in a CoeffPoly or TensorElement."""
    if isinstance(x, CoeffPoly):
        return CoeffPoly._raw({m: c for m, c in x.terms.items() if _flat_mono(m)})
    return TensorElement._raw(x.n, x.q, {
        (words, alphas, beta): c
        for (words, alphas, beta), c in x.terms.items()
        if _flat_mono(beta) and all(_flat_mono(a) for a in alphas)
    })


def basis_words(n: int) -> list:
    """Unit, X_k, Y_a^b and the basic jets: the weight <= 1 part of the PBW basis."""
    out = [("1", HElement.one(n))]
    out += [(f"X[{k}]", HElement.X(n, k)) for k in range(1, n + 1)]
    out += [(f"Y[{a},{b}]", HElement.Y(n, a, b)) for a in range(1, n + 1) for b in range(1, n + 1)]
    out += [(f"D[{i};{j},{k}]", HElement.delta(n, i, j, k))
            for i in range(1, n + 1) for j in range(1, n + 1) for k in range(j, n + 1)]
    return out


def coboundary_search(target: TensorElement, reference: TensorElement) -> dict:
    """Solve flat(target) = lam * reference + b(c0) + B(c2) exactly.

    c0 ranges over constants, c2 over tensors of two basis words.
    Returns lam, the nonzero witness coefficients and a recomputed residual flag.
    """
    n = target.n
    inst = HopfInstance(n)
    goal = flat_specialize(target)
    columns = [("lambda", reference)]
    columns.append(("b(1)", hochschild_b(inst, CoeffPoly.const(1), 1)))
    words = basis_words(n)
    for (nu, u), (nv, v) in product(words, repeat=2):
        columns.append((f"B({nu}|{nv})", flat_specialize(connes_B(inst, tensor_normalize([u, v], n), 1))))
    keys = sorted(set(goal.terms).union(*(c.terms for _, c in columns)), key=repr)
    mat = sp.Matrix([[_rat(col.terms.get(k, 0)) for _, col in columns] for k in keys])
    rhs = sp.Matrix([_rat(goal.terms.get(k, 0)) for k in keys])
    try:
        sol, params = mat.gauss_jordan_solve(rhs)
    except ValueError:
        return {"found": False}
    sol = sol.subs({t: 0 for t in params})
    coeffs = [Fraction(int(v.p), int(v.q)) for v in sol]
    witness = {name: c for (name, _), c in zip(columns[1:], coeffs[1:]) if c}
    recon = TensorElement(n, 1)
    for (_, col), c in zip(columns, coeffs):
        recon = recon + col * c
    return {"found": True, "lambda": coeffs[0], "witness": witness, "exact": recon == goal}


def _rat(c):
    c = Fraction(c)
    return sp.Rational(c.numerator, c.denominator)
