"""Generators of positivity-preserving semigroups from Lévy–Khinchin data.

A constant-coefficient generator ``A = sum (a_alpha/alpha!) ∂^alpha`` produces a
positivity-preserving semigroup ``exp(tA)`` exactly when

    a_{e_i}       = b_i + sum over atoms with |z| >= 1 of w z_i
    a_{e_i+e_j}   = sigma_ij + sum w z^(e_i+e_j)
    a_alpha       = sum w z^alpha               (|alpha| >= 3)

for a PSD matrix ``Sigma``, a drift ``b`` and a Lévy measure ``nu``.  Here ``nu``
is a finite atomic measure so every integral is a finite exact sum.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .constgroup import ConstOperator, Kind, exp_dc
from .errors import DegreeBudgetExceeded, InvalidTriplet, NegativeTime, NotAlgebraElement, NotDegreePreserving
from .membership import block_certificate, exp_on_subspace
from .moment import DEFAULT_TOL, KSpec, NoViolationFound, ViolationCertificate, preserver_test
from .operator import DiffOperator, canonical_from_action, is_degree_preserving
from .poly import Polynomial, as_scalar, exp_factorial, monomials

DEFAULT_T_GRID = (Fraction(1, 4), Fraction(1), Fraction(4))


def _monomial_value(z: Sequence, alpha) -> Fraction:
    out = Fraction(1)
    for zi, a in zip(z, alpha):
        out *= zi**a
    return out


@dataclass(frozen=True)
class LevyTriplet:
    n: int
    Sigma: tuple
    b: tuple
    nu: tuple = ()

    def __post_init__(self):
        n = self.n
        try:
            Sigma = tuple(tuple(as_scalar(v) for v in row) for row in self.Sigma)
            b = tuple(as_scalar(v) for v in self.b)
            nu = tuple((tuple(as_scalar(v) for v in z), as_scalar(w)) for z, w in self.nu)
        except (TypeError, ValueError) as exc:
            raise InvalidTriplet(str(exc)) from None
        if len(Sigma) != n or any(len(row) != n for row in Sigma):
            raise InvalidTriplet(f"Sigma must be {n}x{n}")
        if len(b) != n:
            raise InvalidTriplet(f"b must have length {n}")
        if any(Sigma[i][j] != Sigma[j][i] for i in range(n) for j in range(n)):
            raise InvalidTriplet("Sigma is not symmetric")
        if np.linalg.eigvalsh(np.array(Sigma, dtype=float)).min() < -1e-10:
            raise InvalidTriplet("Sigma is not positive semidefinite")
        for z, w in nu:
            if len(z) != n:
                raise InvalidTriplet(f"atom {z} has wrong dimension")
            if all(v == 0 for v in z):
                raise InvalidTriplet("Lévy measure has an atom at 0")
            if not w > 0:
                raise InvalidTriplet(f"atom weight {w} is not positive")
        object.__setattr__(self, "Sigma", Sigma)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "nu", nu)

    @classmethod
    def heat(cls, n: int = 1, variance=2) -> LevyTriplet:
        return cls(n, tuple(tuple(variance if i == j else 0 for j in range(n)) for i in range(n)), (0,) * n)

    @classmethod
    def drift(cls, b: Sequence) -> LevyTriplet:
        n = len(b)
        return cls(n, ((0,) * n,) * n, tuple(b))

    @classmethod
    def poisson(cls, z: Sequence = (1,), rate=1) -> LevyTriplet:
        n = len(z)
        return cls(n, ((0,) * n,) * n, (0,) * n, ((tuple(z), rate),))

    def moment(self, alpha) -> Fraction:
        """``sum_i w_i z_i^alpha`` over all atoms."""
        return sum((w * _monomial_value(z, alpha) for z, w in self.nu), Fraction(0))

    def cumulant(self, alpha) -> Fraction:
        """The coefficient ``a_alpha`` of the generator."""
        alpha = tuple(alpha)
        order = sum(alpha)
        if order == 0:
            return Fraction(0)
        if order == 1:
            i = alpha.index(1)
            big = sum((w * z[i] for z, w in self.nu if sum(v * v for v in z) >= 1), Fraction(0))
            return self.b[i] + big
        if order == 2:
            i, j = [k for k, a in enumerate(alpha) for _ in range(a)]
            return self.Sigma[i][j] + self.moment(alpha)
        return self.moment(alpha)


def synth_generator(trip: LevyTriplet, D: int) -> ConstOperator:
    if D < 2:
        raise ValueError("order must be at least 2")
    table = {alpha: trip.cumulant(alpha) / exp_factorial(alpha) for alpha in monomials(trip.n, D) if sum(alpha)}
    return ConstOperator(trip.n, D, table)


def evolve(trip: LevyTriplet, t, f: Polynomial, D: int | None = None) -> Polynomial:
    """``exp(tA) f`` for the synthesized generator, exact in rationals."""
    t = as_scalar(t)
    if t < 0:
        raise NegativeTime(f"t = {t} < 0")
    D = max(2, 0 if f.is_zero() else f.degree) if D is None else D
    if f.degree > D:
        raise DegreeBudgetExceeded(f"deg f = {f.degree} exceeds order {D}")
    return exp_dc(synth_generator(trip, D) * t)(f)


def refute_generator(
    A: ConstOperator,
    K: KSpec | None = None,
    t_grid: Sequence = DEFAULT_T_GRID,
    y_grid: Sequence | None = None,
    d: int = 2,
    tol: float = DEFAULT_TOL,
) -> NoViolationFound | tuple[object, ViolationCertificate]:
    """Look for a time ``t`` at which ``exp(tA)`` visibly fails to preserve positivity."""
    K = K or KSpec()
    if A.kind is not Kind.ALGEBRA:
        raise NotAlgebraElement("generator must have zero constant term")
    if 2 * d > A.D:
        raise DegreeBudgetExceeded(f"order 2d = {2 * d} exceeds generator order {A.D}")
    result = None
    for t in t_grid:
        t = as_scalar(t)
        if not t > 0:
            raise ValueError(f"time grid must be positive, got {t}")
        result = preserver_test(exp_dc(A * t), K, y_grid, d, tol)
        if isinstance(result, ViolationCertificate):
            return t, result
    return result


def semigroup_operator(A: DiffOperator, t) -> DiffOperator:
    """Canonical table of ``exp(tA)`` on the degree-``A.D`` block of a degree-preserving ``A``."""
    if not is_degree_preserving(A):
        raise NotDegreePreserving("generator raises degrees")
    cert = block_certificate(A)
    return canonical_from_action(
        lambda alpha: exp_on_subspace(A, cert, t, Polynomial.monomial(alpha)), A.n, A.D, rtol=1e-8
    )


def refute_poly_generator(
    A: DiffOperator,
    K: KSpec | None = None,
    t_grid: Sequence = DEFAULT_T_GRID,
    y_grid: Sequence | None = None,
    d: int = 2,
    tol: float = DEFAULT_TOL,
) -> NoViolationFound | tuple[object, ViolationCertificate]:
    K = K or KSpec()
    if not is_degree_preserving(A):
        raise NotDegreePreserving("generator raises degrees")
    if 2 * d > A.D:
        raise DegreeBudgetExceeded(f"order 2d = {2 * d} exceeds generator order {A.D}")
    result = None
    for t in t_grid:
        t = as_scalar(t)
        if not t > 0:
            raise ValueError(f"time grid must be positive, got {t}")
        result = preserver_test(semigroup_operator(A, t), K, y_grid, d, tol)
        if isinstance(result, ViolationCertificate):
            return t, result
    return result
