import random

import pytest
from hypothesis import given, strategies as st

from transverse_hopf.weil_complex import (
    WeilForm,
    chern,
    class_builder,
    gv,
    h1,
    interior,
    is_basic,
    is_closed,
    random_form,
    rotation_generators,
    weil_d,
)


def test_d_theta_structure_equation():
    n = 2
    want = WeilForm.curv(n, 1, 2)
    for k in (1, 2):
        want = want - WeilForm.theta(n, 1, k) * WeilForm.theta(n, k, 2)
    assert weil_d(WeilForm.theta(n, 1, 2)) == want


def test_truncation_kills_gv_differential_n1():
    w = WeilForm.theta(1, 1, 1) * WeilForm.curv(1, 1, 1)
    assert w == gv(1)
    assert not weil_d(w)
    assert not WeilForm.curv(1, 1, 1) * WeilForm.curv(1, 1, 1)


def test_basic_examples():
    assert is_basic(chern(2, 1))
    assert not is_basic(WeilForm.theta(2, 1, 2))
    assert is_basic(WeilForm.one(3))


def test_interior_on_theta():
    A = rotation_generators(2)[0]
    assert interior(WeilForm.theta(2, 1, 2), A) == WeilForm.one(2) * A[0][1]


@pytest.mark.parametrize("n", [1, 2, 3])
def test_chern_and_transgression(n):
    for k in range(1, n + 1):
        assert is_closed(chern(n, k))
        assert is_basic(chern(n, k))
    assert weil_d(h1(n)) == chern(n, 1)
    assert is_closed(gv(n))


def test_class_builder():
    assert class_builder("chern", 2, 2) == chern(2, 2)
    with pytest.raises(ValueError):
        class_builder("chern", 2)
    with pytest.raises(ValueError):
        chern(1, 2)


@given(st.integers(0, 10**6), st.integers(1, 3))
def test_d_squared_zero(seed, n):
    w = random_form(n, random.Random(seed), 2 * n + 2)
    assert not weil_d(weil_d(w))


@given(st.integers(0, 10**6), st.integers(1, 3))
def test_d_is_graded_derivation(seed, n):
    rnd = random.Random(seed)
    a, b = random_form(n, rnd, 3, terms=1), random_form(n, rnd, 3, terms=1)
    if len(a.degrees()) != 1:
        return
    (deg,) = a.degrees()
    sign = -1 if deg % 2 else 1
    assert weil_d(a * b) == weil_d(a) * b + a * weil_d(b) * sign
