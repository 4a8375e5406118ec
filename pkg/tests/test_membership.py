import math

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from pospres.constgroup import exp_dc
from pospres.errors import DegreeBudgetExceedsOperatorOrder, NotInSubspace, NotInvariant
from pospres.membership import (
    SubspaceCertificate,
    block_certificate,
    check_in_g,
    exp_on_subspace,
    expm,
    limit_formula_check,
    restrict_matrix,
    strictly_decreasing,
)
from pospres.operator import DiffOperator, apply
from pospres.poly import Polynomial

from conftest import algebra_elements

x = Polynomial.variable(1)
one = Polynomial.constant(1, 1)


def close(p: Polynomial, q: Polynomial, rtol=1e-10):
    diff = p - q
    scale = max([1.0] + [abs(float(c)) for c in q.terms.values()])
    return all(abs(float(c)) <= rtol * scale for c in diff.terms.values())


@pytest.mark.parametrize("k", [1, 2, 3])
def test_constant_derivatives_are_members(k):
    A = DiffOperator(1, 12, {(k,): 1})
    v = check_in_g(A)
    assert v.member and v.tag == "member"
    assert [c.dim for c in v.filtration] == [1, 2, 3, 4, 5]
    assert all(c.verify(A) for c in v.filtration)


def test_euler_orbits_stabilise_immediately():
    A = DiffOperator(1, 12, {(1,): x})
    v = check_in_g(A)
    assert v.member
    top = v.filtration[-1]
    assert [b for b in top.basis] == [x**k for k in range(5)]
    assert top.matrix == tuple(tuple(k if i == k else 0 for k in range(5)) for i in range(5))


def test_degree_raising_operator_exhausts_budget():
    A = DiffOperator(1, 12, {(1,): x**2})
    v = check_in_g(A)
    assert not v.member and v.tag == "budget-exceeded"
    tr = v.trace
    assert tr.monomial == (1,) and tr.reason == "degree"
    assert [(s.iterate, s.degree) for s in tr.steps] == [(m, m + 1) for m in range(13)]
    assert max(s.degree for s in tr.steps if s.degree <= 12) == 12


def test_iteration_budget():
    # x2 * ∂1 sends x1 to the new direction x2, so the orbit needs two steps
    A = DiffOperator(2, 12, {(1, 0): Polynomial.variable(2, 1)})
    v = check_in_g(A, seed_degree=4, iterations=1)
    assert not v.member and v.trace.reason == "iterations"
    assert v.trace.monomial == (1, 0)
    assert check_in_g(A, seed_degree=4).member


def test_budget_must_fit_operator_order():
    with pytest.raises(DegreeBudgetExceedsOperatorOrder):
        check_in_g(DiffOperator(1, 6, {(1,): 1}))
    with pytest.raises(DegreeBudgetExceedsOperatorOrder):
        check_in_g(DiffOperator(1, 12, {(1,): 1}), seed_degree=13)


def test_zero_operator_is_member():
    v = check_in_g(DiffOperator(2, 12))
    assert v.member
    assert all(all(e == 0 for row in c.matrix for e in row) for c in v.filtration)


def test_restrict_matrix_examples():
    assert restrict_matrix(DiffOperator(1, 2, {(1,): x}), [one, x, x**2]) == ((0, 0, 0), (0, 1, 0), (0, 0, 2))
    assert restrict_matrix(DiffOperator(1, 2, {(1,): 1}), [one, x]) == ((0, 1), (0, 0))
    assert restrict_matrix(DiffOperator(1, 2), [one, x]) == ((0, 0), (0, 0))


def test_restrict_matrix_non_monomial_basis():
    # basis {x + 1, 1}: ∂(x+1) = 1 = 0*(x+1) + 1*1
    assert restrict_matrix(DiffOperator(1, 2, {(1,): 1}), [x + 1, one]) == ((0, 0), (1, 0))


def test_restrict_matrix_not_invariant():
    with pytest.raises(NotInvariant):
        restrict_matrix(DiffOperator(1, 3, {(1,): x**2}), [one, x])


def test_exp_on_subspace_examples():
    euler = DiffOperator(1, 4, {(1,): x})
    cert = block_certificate(euler)
    assert close(exp_on_subspace(euler, cert, 1, x**2), x**2 * math.e**2)
    d = DiffOperator(1, 4, {(1,): 1})
    assert close(exp_on_subspace(d, block_certificate(d), 1, x**2), (x + 1) ** 2)
    f = 3 * x**3 - x
    assert close(exp_on_subspace(d, block_certificate(d), 0, f), f, rtol=0)


def test_exp_on_subspace_requires_membership():
    d = DiffOperator(1, 4, {(1,): 1})
    cert = SubspaceCertificate((one, x), restrict_matrix(d, [one, x]))
    with pytest.raises(NotInSubspace):
        exp_on_subspace(d, cert, 1, x**2)


def test_limit_zero_operator():
    A = DiffOperator(1, 4)
    rows = limit_formula_check(A, block_certificate(A), x**3, [1, 4, 16])
    assert all(r.forward == 0 and r.backward == 0 for r in rows)


def test_limit_derivative_decreases():
    A = DiffOperator(1, 4, {(1,): 1})
    rows = limit_formula_check(A, block_certificate(A), x**4, [2, 8, 32, 128], reference=(x + 1) ** 4)
    assert strictly_decreasing([r.forward for r in rows])
    assert strictly_decreasing([r.backward for r in rows])
    # (1 + ∂/k)^k x^4 has x-coefficient 4 (1 - 1/k)(1 - 2/k); exact is 4
    assert rows[-1].forward == pytest.approx(12 / 128 - 8 / 128**2, rel=1e-12)


def test_limit_euler_scalar_case():
    A = DiffOperator(1, 1, {(1,): x})
    cert = SubspaceCertificate((x,), ((1,),))
    (row,) = limit_formula_check(A, cert, x, [1])
    assert row.forward == pytest.approx(abs(2 - math.e), rel=1e-12)
    assert row.backward is None and row.note == "singular resolvent"


@given(algebra_elements(n=1, D=6))
def test_float_exp_matches_exact(A):
    op = DiffOperator.from_const(A)
    cert = block_certificate(op)
    f = sum((x**k * (k + 1) for k in range(7)), Polynomial.zero(1))
    assert close(exp_on_subspace(op, cert, 1, f), exp_dc(A)(f))


@given(algebra_elements(n=2, D=4))
def test_certificates_reverify_and_have_eigenvalues(A):
    op = DiffOperator(2, 12, dict(A.items()))
    v = check_in_g(op, seed_degree=3)
    assert v.member
    for cert in v.filtration:
        assert cert.verify(op)
        for b in cert.basis:
            img = apply(op, b)
            assert img.degree <= 3 or img.is_zero()
        M = np.array(cert.matrix, dtype=float)
        # characteristic polynomial has degree dim >= 1, so an eigenvalue exists
        assert len(np.poly(M)) == cert.dim + 1
        assert len(np.linalg.eigvals(M)) == cert.dim


@given(st.floats(0, 2), st.floats(0, 2))
def test_semigroup_on_block(s, t):
    A = DiffOperator(1, 5, {(1,): x, (2,): 1, (0,): -1})
    cert = block_certificate(A)
    f = x**5 - 2 * x + 3
    lhs = exp_on_subspace(A, cert, s, exp_on_subspace(A, cert, t, f))
    rhs = exp_on_subspace(A, cert, s + t, f)
    assert close(lhs, rhs, rtol=1e-8)


@pytest.mark.parametrize("seed", range(8))
def test_expm_against_scipy(seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(6, 6)) * rng.choice([0.01, 1.0, 5.0])
    res = expm(M)
    ref = scipy.linalg.expm(M)
    assert np.allclose(res.matrix, ref, rtol=1e-10, atol=1e-12 * np.abs(ref).max())
    assert res.squarings >= 0 and res.taylor_terms > 0
