from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from transverse_hopf.coeff_ring import (
    CoeffPoly,
    IndexError_,
    base,
    const,
    curv,
    derive,
    flat_env,
    format_poly,
    gamma,
    substitute,
)

ATOMS = [base("f"), base("g"), curv(1, 2, 1, 2), curv(2, 1, 1, 2), gamma("phi", 1, 1, 2)]


@st.composite
def polys(draw):
    out = CoeffPoly()
    for _ in range(draw(st.integers(0, 3))):
        term = const(Fraction(draw(st.integers(-4, 4)), draw(st.integers(1, 3))))
        for _ in range(draw(st.integers(0, 2))):
            term = term * draw(st.sampled_from(ATOMS))
        out = out + term
    return out


DERIVS = [("X", 1), ("X", 2), ("Y", 1, 1), ("Y", 1, 2), ("Y", 2, 1)]


def test_additive_identity_and_commutativity():
    x, y = base("f") + curv(1, 2, 1, 2), base("g") * 3
    assert x + CoeffPoly() == x
    assert x * y == y * x


def test_difference_of_squares():
    b, r = base("b"), curv(1, 2, 1, 2)
    assert (b + r) * (b - r) == b * b - r * r


def test_curvature_antisymmetry():
    assert curv(1, 1, 2, 1) == -curv(1, 1, 1, 2)
    assert not curv(1, 1, 2, 2)


def test_derive_constant_is_zero():
    assert not derive(const(5), ("X", 1), 1)


def test_derive_fresh_symbol_records_word():
    assert format_poly(derive(base("b"), ("X", 1), 1)) == "Dx[1](b)"


def test_y_acts_on_jet_by_index_rule_n1():
    g = gamma("phi", 1, 1, 1)
    assert derive(g, ("Y", 1, 1), 1) == g


def test_x_bracket_on_functions_is_curvature_n2():
    b = base("b")
    lhs = derive(derive(b, ("X", 2), 2), ("X", 1), 2) - derive(derive(b, ("X", 1), 2), ("X", 2), 2)
    rhs = CoeffPoly()
    for i in (1, 2):
        for j in (1, 2):
            rhs = rhs + curv(i, j, 1, 2) * derive(b, ("Y", i, j), 2)
    assert lhs == rhs


def test_index_out_of_range():
    with pytest.raises(IndexError_):
        derive(base("b"), ("X", 3), 2)


def test_substitute_flat_and_empty():
    r = curv(1, 2, 1, 2)
    assert not substitute(r, flat_env(r))
    assert substitute(base("b"), {}) == base("b")


def test_substitute_jet_value_squared():
    g = gamma("phi", 1, 1, 1)
    (atom,) = g.atoms()
    val = const(2) * base("a") * base("y")
    assert substitute(g * g, {atom: val}) == const(4) * base("a") * base("a") * base("y") * base("y")


@given(polys(), polys(), polys())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a


@given(polys(), polys(), st.sampled_from(DERIVS))
def test_leibniz_rule(a, b, d):
    assert derive(a * b, d, 2) == derive(a, d, 2) * b + a * derive(b, d, 2)


@given(polys(), st.sampled_from(DERIVS), st.sampled_from(DERIVS))
def test_bracket_of_derivations_on_ring(a, d1, d2):
    # [Y, Y'] and [Y, X] close on the derivations themselves
    if d1[0] == "X" and d2[0] == "X":
        return
    lhs = derive(derive(a, d2, 2), d1, 2) - derive(derive(a, d1, 2), d2, 2)
    if d1[0] == "Y" and d2[0] == "Y":
        (_, i, j), (_, k, l) = d1, d2
        rhs = CoeffPoly()
        if k == j:
            rhs = rhs + derive(a, ("Y", i, l), 2)
        if i == l:
            rhs = rhs - derive(a, ("Y", k, j), 2)
    else:
        y, x = (d1, d2) if d1[0] == "Y" else (d2, d1)
        sign = 1 if d1[0] == "Y" else -1
        (_, i, j), (_, k) = y, x
        rhs = derive(a, ("X", i), 2) * sign if k == j else CoeffPoly()
    assert lhs == rhs
