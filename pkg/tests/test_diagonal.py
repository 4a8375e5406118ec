import math
from fractions import Fraction as F

from hypothesis import given
from hypothesis import strategies as st

from pospres.diagonal import DiagonalSequence, c_to_t, diagonal_to_canonical, t_to_c
from pospres.operator import DiffOperator, apply, canonical_from_action
from pospres.poly import Polynomial, exp_factorial, monomials

from conftest import rationals


def alternating_sum(t, k):
    """Direct one-dimensional alternating binomial sum."""
    return sum((-1) ** (k - j) * math.comb(k, j) * t[j] for j in range(k + 1))


@st.composite
def sequences(draw, kind="t"):
    n = draw(st.integers(1, 3))
    D = draw(st.integers(0, 6 if n == 1 else 4))
    return DiagonalSequence(n, D, {a: draw(rationals) for a in monomials(n, D)}, kind)


def test_identity_sequence():
    t = DiagonalSequence.from_function(2, 4, lambda a: 1)
    c = t_to_c(t)
    assert all(v == (1 if sum(a) == 0 else 0) for a, v in c.values.items())


def test_powers_of_two_map_to_ones():
    D = 8
    t = [2**k for k in range(D + 1)]
    assert [alternating_sum(t, k) for k in range(D + 1)] == [1] * (D + 1)
    c = t_to_c(DiagonalSequence.from_function(1, D, lambda a: 2 ** a[0]))
    assert all(v == 1 for v in c.values.values())


def test_point_sequence_alternates():
    t = [1] + [0] * 6
    c = t_to_c(DiagonalSequence(1, 6, {(0,): 1}))
    assert [c[(k,)] for k in range(7)] == [alternating_sum(t, k) for k in range(7)] == [(-1) ** k for k in range(7)]


def test_c_to_t_examples():
    t = c_to_t(DiagonalSequence(1, 5, {(0,): 1}, "c"))
    assert all(v == 1 for v in t.values.values())
    t = c_to_t(DiagonalSequence.from_function(1, 6, lambda a: 1, "c"))
    assert [t[(k,)] for k in range(7)] == [2**k for k in range(7)]
    t = c_to_t(DiagonalSequence(2, 4, {(1, 1): 1}, "c"))
    for a, v in t.values.items():
        expected = math.comb(a[0], 1) * math.comb(a[1], 1) if a[0] >= 1 and a[1] >= 1 else 0
        assert v == expected


def test_canonical_examples():
    assert diagonal_to_canonical(DiagonalSequence(2, 3, {(0, 0): 1}, "c")) == DiffOperator.identity(2, 3)
    x = Polynomial.variable(1)
    T = diagonal_to_canonical(DiagonalSequence(1, 4, {(1,): 1}, "c"))
    assert T == DiffOperator(1, 4, {(1,): x})
    for k in range(5):
        assert apply(T, x**k) == k * x**k
    T = diagonal_to_canonical(DiagonalSequence.from_function(1, 6, lambda a: 1, "c"))
    for k in range(7):
        assert apply(T, x**k) == 2**k * x**k


@given(sequences())
def test_transforms_are_inverse(t):
    assert c_to_t(t_to_c(t)).values == t.values
    c = DiagonalSequence(t.n, t.D, t.values, "c")
    assert t_to_c(c_to_t(c)).values == c.values


@given(sequences(kind="c"))
def test_canonical_form_acts_diagonally(c):
    T = diagonal_to_canonical(c)
    t = c_to_t(c)
    for a in monomials(c.n, c.D):
        assert apply(T, Polynomial.monomial(a)) == Polynomial.monomial(a, t[a])


@given(sequences())
def test_canonical_recovery_matches_transform(t):
    T = canonical_from_action(lambda a: Polynomial.monomial(a, t[a]), t.n, t.D)
    c = t_to_c(t)
    expected = {a: Polynomial.monomial(a, v / exp_factorial(a)) for a, v in c.values.items() if v}
    assert T.table == expected
