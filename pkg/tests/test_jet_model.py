import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from transverse_hopf.jet_model import (
    JetTable,
    check_jet_swap,
    check_tensoriality,
    commutator_is_vertical,
    gamma_from_jets,
    identity_table,
    pullback_difference,
    random_table,
    sample_frames,
    verify_pullback_identity,
)


def cubic(a, b):
    return JetTable(1, 3, ({(1,): 1, (2,): a, (3,): b},))


def test_identity_gives_zero_jet():
    for n in (1, 2):
        g = gamma_from_jets(identity_table(n), [[Fraction(int(r == c)) * 2 for c in range(n)] for r in range(n)])
        assert all(v == 0 for plane in g for row in plane for v in row)


def test_quadratic_jet_value():
    a, y = Fraction(3, 7), Fraction(5)
    J = JetTable(1, 2, ({(1,): 1, (2,): a},))
    assert gamma_from_jets(J, [[y]]) == [[[2 * a * y]]]


@given(st.fractions(-3, 3, max_denominator=4), st.fractions(-3, 3, max_denominator=4),
       st.fractions(-1, 1, max_denominator=3), st.fractions(1, 4, max_denominator=3))
def test_jet_away_from_origin_n1(a, b, x0, y):
    # with flat Gamma the jet is psi''(x0) y / psi'(x0)
    d1 = 1 + 2 * a * x0 + 3 * b * x0 * x0
    if d1 == 0:
        return
    d2 = 2 * a + 6 * b * x0
    assert gamma_from_jets(cubic(a, b), [[y]], (x0,)) == [[[d2 * y / d1]]]


def test_jet_symmetric_in_lower_pair_n2():
    rnd = random.Random(3)
    for _ in range(3):
        J = random_table(2, 2, rnd)
        y0 = [[Fraction(2), Fraction(1)], [Fraction(-1), Fraction(3)]]
        g = gamma_from_jets(J, y0)
        assert all(g[i][j][k] == g[i][k][j] for i in range(2) for j in range(2) for k in range(2))


def test_flat_identity_both_sides_vanish():
    J = identity_table(2)
    x0, y0 = sample_frames(2, 1, random.Random(0))[0]
    dx, dy = pullback_difference(J, x0, y0)
    assert all(v == 0 for part in (dx, dy) for plane in part for row in plane for v in row)


def test_cubic_pullback_identity():
    assert verify_pullback_identity(cubic(Fraction(1, 2), Fraction(-2, 3)), samples=4)["passed"]


def test_random_quadratic_n2():
    rnd = random.Random(11)
    for _ in range(4):
        assert verify_pullback_identity(random_table(2, 2, rnd), samples=5, seed=rnd.randint(0, 99))["passed"]


@pytest.mark.parametrize("with_gamma", [False, True])
def test_sampled_connection_n1(with_gamma):
    J = random_table(1, 4, random.Random(5), with_gamma)
    assert verify_pullback_identity(J, samples=5)["passed"]
    assert check_tensoriality(J)
    assert check_jet_swap(J)


def test_coordinate_fields_n2():
    J = random_table(2, 3, random.Random(2))
    assert check_tensoriality(J)
    assert commutator_is_vertical(J, sample_frames(2, 2, random.Random(1), J=J))


def test_sampled_connection_is_torsion_free_n2():
    J = random_table(2, 2, random.Random(4), with_gamma=True)
    assert commutator_is_vertical(J, sample_frames(2, 2, random.Random(1), J=J))


def test_validation():
    with pytest.raises(ValueError):
        JetTable(1, 1, ({(2,): 1},))
    with pytest.raises(ValueError):
        JetTable(2, 1, ({(1, 0): 1}, {(0, 1): 1}), {(1, 1, 2): {(0, 0): 1}})
    with pytest.raises(ValueError):
        gamma_from_jets(identity_table(1), [[0]])
