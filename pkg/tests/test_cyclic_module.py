import random
from fractions import Fraction

from hypothesis import given, strategies as st

from transverse_hopf.coeff_ring import base
from transverse_hopf.cyclic_module import (
    CoarseInstance,
    CyclicCochain,
    HopfInstance,
    bicomplex_identities,
    cocycle_check,
    connes_B,
    cyclic_identities,
    dual_numbers,
    homotopy_identity,
    hochschild_b,
    simplicial_identities,
)
from transverse_hopf.hopf_core import HElement, mul
from transverse_hopf.hopf_structure import coproduct, tensor_normalize

K = dual_numbers(2, 3, Fraction(1, 3))


def one_tensor(h):
    return tensor_normalize([h])


def test_hopf_faces():
    inst = HopfInstance(1)
    b = base("b")
    assert inst.face(0, b, 1) == one_tensor(HElement.beta(1, b))
    assert inst.face(1, b, 1) == one_tensor(HElement.alpha(1, b))
    for n in (1, 2):
        inst = HopfInstance(n)
        x = HElement.X(n, 1)
        assert inst.face(1, one_tensor(x), 2) == coproduct(x)


def test_hopf_degeneracies():
    inst = HopfInstance(1)
    assert inst.degeneracy(0, one_tensor(HElement.alpha(1, base("b"))), 0) == base("b")
    assert not inst.degeneracy(0, one_tensor(HElement.X(1, 1)), 0)


def test_hopf_cyclic_q1():
    inst = HopfInstance(1)
    d1 = one_tensor(HElement.delta(1, 1, 1, 1))
    assert inst.cyclic(d1, 1) == -d1
    assert inst.cyclic(one_tensor(HElement.alpha(1, base("b"))), 1) == one_tensor(HElement.beta(1, base("b")))


def test_boundaries_of_basic_jets():
    inst = HopfInstance(1)
    d1 = one_tensor(HElement.delta(1, 1, 1, 1))
    assert not hochschild_b(inst, d1, 2)
    assert not connes_B(inst, d1, 0)
    r = base("r")
    assert hochschild_b(inst, r, 1) == one_tensor(HElement.beta(1, r) - HElement.alpha(1, r))
    inst2 = HopfInstance(2)
    for i in (1, 2):
        for j in (1, 2):
            for k in range(j, 3):
                assert not connes_B(inst2, one_tensor(HElement.delta(2, i, j, k)), 0)


def test_cocycle_check_examples():
    inst = HopfInstance(1)
    d1 = one_tensor(HElement.delta(1, 1, 1, 1))
    assert cocycle_check(inst, CyclicCochain(1, {1: d1}))["verdict"] == "cocycle"
    res = cocycle_check(inst, CyclicCochain(0, {0: base("r")}))
    assert res["verdict"] == "not-cocycle" and res["degree"] == 1
    assert cocycle_check(inst, CyclicCochain(0, {}))["verdict"] == "cocycle"


def test_coarse_operators():
    inst = CoarseInstance(K)
    x = {("e", "1"): Fraction(1)}
    assert inst.face(2, x, 2) == {("e", "1", "1"): 1}
    assert inst.degeneracy(0, {("e", "e"): Fraction(1)}, 0) == {("1",): 2, ("e",): 3}
    assert inst.cyclic({("1", "e", "e"): Fraction(1)}, 2) == {("e", "e", "1"): 1}
    assert inst.homotopy_s({("1", "e"): Fraction(2)}, 1) == {("e",): 2}
    assert inst.homotopy_s({("e", "e"): Fraction(1)}, 1) == {("e",): Fraction(1, 3)}


def test_hopf_identities_n1():
    rnd = random.Random(0)
    inst = HopfInstance(1)
    assert not any(simplicial_identities(inst, 3, 1, rnd).values())
    assert not any(cyclic_identities(inst, 3, 1, rnd).values())
    assert not any(bicomplex_identities(inst, 2, 1, rnd).values())


def test_coarse_identities():
    rnd = random.Random(1)
    inst = CoarseInstance(K)
    assert not any(simplicial_identities(inst, 3, 3, rnd).values())
    assert not any(cyclic_identities(inst, 3, 3, rnd).values())
    assert not any(bicomplex_identities(inst, 3, 3, rnd).values())
    assert homotopy_identity(inst, 3, 10, rnd) == 0


@given(st.integers(0, 10**6), st.integers(1, 4))
def test_coarse_cyclic_order(seed, q):
    inst = CoarseInstance(K)
    x = inst.random_element(q, random.Random(seed))
    y = x
    for _ in range(q + 1):
        y = inst.cyclic(y, q)
    assert inst.is_zero(inst.add(y, inst.scale(x, -1)))


@given(st.integers(0, 10**6))
def test_hopf_tau_squared_q1(seed):
    inst = HopfInstance(2, word_len=2)
    x = inst.random_element(1, random.Random(seed))
    assert inst.cyclic(inst.cyclic(x, 1), 1) == x
