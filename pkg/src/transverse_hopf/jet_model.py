"""Jet symbols realized from Christoffel symbols and Taylor data, exactly.

Frame bundle coordinates are ``x^mu`` and ``y^mu_j`` (row mu, column j).  The
lift of a map psi is ``(x, y) -> (psi(x), dpsi(x) y)``.  Coordinate forms:

    theta = y^{-1} dx,    omega = y^{-1} (dy + Gamma(x) dx y)

and the jet symbol is the coefficient in ``lift^* omega - omega = gamma theta``.
Indices: ``gamma[i][j][k]`` has upper i, symmetric lower pair (j, k).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product

import sympy as sp

from .coeff_ring import CoeffPoly, derive, gamma as gamma_poly


@dataclass(frozen=True)
class JetTable:
    """Polynomial map psi and polynomial Christoffel symbols.

    ``psi[nu]`` maps exponent tuples to rationals; ``Gamma[(nu, a, m)]`` maps
    exponent tuples to rationals and must be symmetric in (a, m).
    """

    n: int
    order: int
    psi: tuple
    Gamma: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.psi) != self.n:
            raise ValueError("psi needs n components")
        for (nu, a, m), poly in self.Gamma.items():
            if self.Gamma.get((nu, m, a), {}) != poly:
                raise ValueError("Christoffel symbols must be symmetric in the lower pair")
        if self.jacobian0.det() == 0:
            raise ValueError("linear part of psi is singular")

    @cached_property
    def xs(self):
        return sp.symbols(f"x1:{self.n + 1}")

    @cached_property
    def ys(self):
        n = self.n
        return sp.Matrix(n, n, lambda r, c: sp.Symbol(f"y{r + 1}_{c + 1}"))

    def _poly(self, coeffs: dict):
        x = self.xs
        out = sp.Integer(0)
        for exps, c in coeffs.items():
            term = sp.Rational(Fraction(c).numerator, Fraction(c).denominator)
            for v, e in zip(x, exps):
                term *= v ** e
            out += term
        return out

    @cached_property
    def psi_expr(self):
        return sp.Matrix([self._poly(c) for c in self.psi])

    @cached_property
    def jacobian(self):
        return self.psi_expr.jacobian(sp.Matrix(self.xs))

    @cached_property
    def jacobian0(self):
        return self.jacobian.subs({v: 0 for v in self.xs})

    def christoffel(self, nu, a, m, at=None):
        """Gamma^nu_{a m} as an expression in x, or at the point ``at`` (a tuple of expressions)."""
        e = self._poly(self.Gamma.get((nu, a, m), {}))
        if at is not None:
            e = e.subs(dict(zip(self.xs, at)), simultaneous=True)
        return e


def identity_table(n: int, order: int = 2, Gamma=None) -> JetTable:
    psi = tuple({tuple(1 if i == nu else 0 for i in range(n)): 1} for nu in range(n))
    return JetTable(n, order, psi, dict(Gamma or {}))


def _check_frame(y):
    if y.det() == 0:
        raise ValueError("frame matrix is singular")


def _rat(v) -> sp.Rational:
    v = Fraction(v)
    return sp.Rational(v.numerator, v.denominator)


def _frac(e) -> Fraction:
    e = sp.sympify(e)
    if not e.is_Rational:
        e = sp.cancel(sp.together(e))
    if not e.is_Rational:
        raise ValueError(f"expression did not evaluate to a rational: {e}")
    return Fraction(int(e.p), int(e.q))


def _point_subs(J, x0, y0):
    subs = {v: _rat(c) for v, c in zip(J.xs, x0)}
    for r in range(J.n):
        for c in range(J.n):
            subs[J.ys[r, c]] = _rat(y0[r][c])
    return subs


def _tilde_minus_gamma(J: JetTable, at_x):
    """(Gamma-tilde - Gamma)^nu_{a m}; at_x substitutes x (None keeps it symbolic)."""
    n = J.n
    x = J.xs
    psi = J.psi_expr
    jac = J.jacobian
    ev = (lambda e: e.xreplace(at_x)) if at_x is not None else (lambda e: e)
    jac_v = jac.applyfunc(ev)
    jinv = jac_v.inv() if at_x is not None else jac_v.adjugate() / jac_v.det()
    psi_v = tuple(ev(c) for c in psi)
    out = {}
    for nu, a, m in product(range(n), repeat=3):
        s = sp.Integer(0)
        for d in range(n):
            inner = ev(sp.diff(psi[d], x[m], x[a]))
            for e, z in product(range(n), repeat=2):
                g = J.christoffel(d + 1, e + 1, z + 1, at=psi_v)
                if g != 0:
                    inner += g * jac_v[e, a] * jac_v[z, m]
            s += jinv[nu, d] * inner
        out[(nu, a, m)] = s - ev(J.christoffel(nu + 1, a + 1, m + 1))
    return out


def _contract(n, diff, y, yinv):
    out = [[[sp.Integer(0)] * n for _ in range(n)] for _ in range(n)]
    for i, j, k in product(range(n), repeat=3):
        s = sp.Integer(0)
        for nu, a, m in product(range(n), repeat=3):
            if diff[(nu, a, m)] != 0:
                s += yinv[i, nu] * diff[(nu, a, m)] * y[a, j] * y[m, k]
        out[i][j][k] = s
    return out


def gamma_symbolic(J: JetTable):
    """gamma[i][j][k] as unsimplified expressions in x and y."""
    y = J.ys
    return _contract(J.n, _tilde_minus_gamma(J, None), y, y.adjugate() / y.det())


def gamma_from_jets(J: JetTable, y0, x0=None):
    """Exact values gamma[i][j][k] at the frame (x0, y0); x0 defaults to the origin."""
    n = J.n
    y_m = sp.Matrix(n, n, lambda r, c: _rat(y0[r][c]))
    _check_frame(y_m)
    x0 = x0 if x0 is not None else (0,) * n
    diff = _tilde_minus_gamma(J, {v: _rat(c) for v, c in zip(J.xs, x0)})
    g = _contract(n, diff, y_m, y_m.inv())
    return [[[_frac(g[i][j][k]) for k in range(n)] for j in range(n)] for i in range(n)]


# coordinate vector fields ---------------------------------------------------------------------

def coord_X(J: JetTable, k: int, f):
    """X_k = y^mu_k (d_mu - Gamma^nu_{a mu} y^a_j d/dy^nu_j), k 1-based."""
    n = J.n
    x, y = J.xs, J.ys
    out = sp.Integer(0)
    for mu in range(n):
        term = sp.diff(f, x[mu])
        for nu, a, j in product(range(n), repeat=3):
            g = J.christoffel(nu + 1, a + 1, mu + 1)
            if g != 0:
                term -= g * y[a, j] * sp.diff(f, y[nu, j])
        out += y[mu, k - 1] * term
    return out


def coord_Y(J: JetTable, lo: int, up: int, f):
    """Y_lo^up = y^mu_lo d/dy^mu_up."""
    y = J.ys
    return sum(y[mu, lo - 1] * sp.diff(f, y[mu, up - 1]) for mu in range(J.n))


def coord_curvature(J: JetTable):
    """R[(a, b, k, l)] with [X_k, X_l] = sum R^a_{b k l} Y_a^b as vector fields."""
    n = J.n
    y = J.ys
    yinv = y.adjugate() / y.det()
    R = {}
    for k, l in product(range(1, n + 1), repeat=2):
        c = sp.zeros(n, n)
        for nu, b in product(range(n), repeat=2):
            f = y[nu, b]
            c[nu, b] = sp.expand(coord_X(J, k, coord_X(J, l, f)) - coord_X(J, l, coord_X(J, k, f)))
        for a, b in product(range(n), repeat=2):
            R[(a + 1, b + 1, k, l)] = sum(yinv[a, nu] * c[nu, b] for nu in range(n))
    return R


def sample_frames(n: int, count: int, rnd: random.Random, origin: bool = True, J=None):
    """Rational frames (x0, y0) with invertible y0; the first sits over the origin.

    With a table J, base points where its Jacobian is singular are skipped.
    """
    frames = []
    while len(frames) < count:
        if origin and not frames:
            x0 = (0,) * n
        else:
            x0 = tuple(Fraction(rnd.randint(-3, 3), rnd.randint(1, 4)) for _ in range(n))
        if J is not None:
            at = {v: _rat(c) for v, c in zip(J.xs, x0)}
            if J.jacobian.xreplace(at).det() == 0:
                continue
        while True:
            y0 = [[Fraction(rnd.randint(-4, 4), rnd.randint(1, 3)) for _ in range(n)] for _ in range(n)]
            if sp.Matrix(y0).det() != 0:
                break
        frames.append((x0, y0))
    return frames


def commutator_is_vertical(J: JetTable, frames) -> bool:
    """[X_k, X_l] has no horizontal part (torsion freedom), at the given frames."""
    n = J.n
    for k, l in product(range(1, n + 1), repeat=2):
        for mu in range(n):
            f = J.xs[mu]
            e = coord_X(J, k, coord_X(J, l, f)) - coord_X(J, l, coord_X(J, k, f))
            for x0, y0 in frames:
                if e.xreplace(_point_subs(J, x0, y0)) != 0:
                    return False
    return True


# pullback identity ----------------------------------------------------------------------------

def pullback_difference(J: JetTable, x0, y0):
    """Exact dx- and dy-coefficients of lift^* omega - omega at a frame.

    Returns (dx_part, dy_part): dx_part[i][j][lam], dy_part[i][j][rho] (the dy^rho_j coefficient).
    """
    n = J.n
    x = J.xs
    at = {v: _rat(c) for v, c in zip(x, x0)}
    y = sp.Matrix(n, n, lambda r, c: _rat(y0[r][c]))
    jac = J.jacobian
    jac_v = jac.xreplace(at)
    psi_v = tuple(c.xreplace(at) for c in J.psi_expr)
    yp = jac_v * y
    ypinv = yp.inv()
    yinv = y.inv()
    dx = [[[sp.Integer(0)] * n for _ in range(n)] for _ in range(n)]
    dy = [[[sp.Integer(0)] * n for _ in range(n)] for _ in range(n)]
    for i, j in product(range(n), repeat=2):
        for lam in range(n):
            # pulled back part: y'^{-1}(d_lam(J) y + Gamma(psi)(d_lam psi) y')
            s = sp.Integer(0)
            for nu in range(n):
                inner = sum(sp.diff(jac[nu, r], x[lam]).xreplace(at) * y[r, j] for r in range(n))
                for a, mu in product(range(n), repeat=2):
                    g = J.christoffel(nu + 1, a + 1, mu + 1, at=psi_v)
                    if g != 0:
                        inner += g * yp[a, j] * jac_v[mu, lam]
                s += ypinv[i, nu] * inner
            for nu, a in product(range(n), repeat=2):
                g = J.christoffel(nu + 1, a + 1, lam + 1).xreplace(at)
                if g != 0:
                    s -= yinv[i, nu] * g * y[a, j]
            dx[i][j][lam] = s
        for rho in range(n):
            dy[i][j][rho] = sum(ypinv[i, nu] * jac_v[nu, rho] for nu in range(n)) - yinv[i, rho]
    return dx, dy


def verify_pullback_identity(J: JetTable, samples: int = 3, seed: int = 0) -> dict:
    """Check lift^* omega - omega = gamma theta exactly at sampled frames."""
    n = J.n
    failures = []
    frames = sample_frames(n, samples, random.Random(seed), J=J)
    for x0, y0 in frames:
        dxp, dyp = pullback_difference(J, x0, y0)
        g = gamma_from_jets(J, y0, x0)
        yinv = sp.Matrix(n, n, lambda r, c: _rat(y0[r][c])).inv()
        for i, j in product(range(n), repeat=2):
            if any(v != 0 for v in dyp[i][j]):
                failures.append(("dy", i + 1, j + 1, x0))
            for lam in range(n):
                rhs = sum(_rat(g[i][j][k]) * yinv[k, lam] for k in range(n))
                if dxp[i][j][lam] != rhs:
                    failures.append(("dx", i + 1, j + 1, lam + 1, x0))
    return {"passed": not failures, "checked": len(frames), "failures": failures[:5]}


def check_tensoriality(J: JetTable, samples: int = 2, seed: int = 0) -> bool:
    """Y-derivatives of the coordinate jets agree with the coefficient-ring rule."""
    n = J.n
    g = gamma_symbolic(J)
    frames = sample_frames(n, samples, random.Random(seed), J=J)
    env = {("g", "phi", i + 1, j + 1, k + 1, ()): g[i][j][k] for i, j, k in product(range(n), repeat=3)}
    for i, j, k in product(range(1, n + 1), repeat=3):
        for lo, up in product(range(1, n + 1), repeat=2):
            lhs = coord_Y(J, lo, up, g[i - 1][j - 1][k - 1])
            rhs = _eval_poly(derive(gamma_poly("phi", i, j, k), ("Y", lo, up), n), env)
            for x0, y0 in frames:
                subs = _point_subs(J, x0, y0)
                if sp.cancel(sp.together(lhs.xreplace(subs) - rhs.xreplace(subs))) != 0:
                    return False
    return True


def check_jet_swap(J: JetTable, samples: int = 2, seed: int = 0) -> bool:
    """Second X-jets in reversed order match the coefficient-ring curvature correction."""
    n = J.n
    g = gamma_symbolic(J)
    R = coord_curvature(J)
    frames = sample_frames(n, samples, random.Random(seed), J=J)
    env = {}
    for i, j, k in product(range(1, n + 1), repeat=3):
        base_g = g[i - 1][j - 1][k - 1]
        env[("g", "phi", i, j, k, ())] = base_g
        for l in range(1, n + 1):
            first = coord_X(J, l, base_g)
            env[("g", "phi", i, j, k, (l,))] = first
            for m in range(l, n + 1):
                env[("g", "phi", i, j, k, (l, m))] = coord_X(J, m, first)
    for (a, b, k, l), v in R.items():
        if k < l:
            env[("R", a, b, k, l, ())] = v
    for i, j, k in product(range(1, n + 1), repeat=3):
        for l, m in product(range(1, n + 1), repeat=2):
            if m >= l:
                continue
            lhs = coord_X(J, m, coord_X(J, l, g[i - 1][j - 1][k - 1]))
            rhs = _eval_poly(gamma_poly("phi", i, j, k, (l, m), n=n), env)
            for x0, y0 in frames:
                subs = _point_subs(J, x0, y0)
                if sp.cancel(sp.together(lhs.xreplace(subs) - rhs.xreplace(subs))) != 0:
                    return False
    return True


def _eval_poly(p: CoeffPoly, env: dict):
    out = sp.Integer(0)
    for mono, c in p.terms.items():
        t = sp.Rational(c.numerator, c.denominator)
        for a in mono:
            t *= env[a]
        out += t
    return out


def random_table(n: int, degree: int, rnd: random.Random, with_gamma: bool = False) -> JetTable:
    """psi(x) = x + random terms of degree 2..degree; optional polynomial Gamma."""
    exps = [e for e in product(range(degree + 1), repeat=n) if 2 <= sum(e) <= degree]
    psi = []
    for nu in range(n):
        comp = {tuple(1 if i == nu else 0 for i in range(n)): 1}
        for e in exps:
            if rnd.random() < 0.5:
                comp[e] = Fraction(rnd.randint(-3, 3), rnd.randint(1, 3))
        psi.append(comp)
    Gamma = {}
    if with_gamma:
        lin = [e for e in product(range(2), repeat=n) if sum(e) <= 1]
        for nu in range(1, n + 1):
            for a in range(1, n + 1):
                for m in range(a, n + 1):
                    poly = {e: Fraction(rnd.randint(-2, 2), rnd.randint(1, 2)) for e in lin}
                    poly = {e: c for e, c in poly.items() if c}
                    if poly:
                        Gamma[(nu, a, m)] = poly
                        Gamma[(nu, m, a)] = poly
    return JetTable(n, degree, tuple(psi), Gamma)
