"""Constant-coefficient operators ``sum a_alpha ∂^alpha`` truncated at a fixed order.

Elements with ``a_0 = 1`` form a commutative group under composition, elements
with ``a_0 = 0`` its Lie algebra.  Because an algebra element has no constant
term, its ``k``-th power has no terms of order below ``k``; exp and log are
therefore finite sums at any fixed truncation order and are computed exactly.
"""
from __future__ import annotations

from enum import Enum
from fractions import Fraction
from typing import Mapping

from .errors import DegreeBudgetExceeded, DimensionMismatch, NotAlgebraElement, NotGroupElement
from .poly import Exponent, Polynomial, as_scalar, exp_add, grlex_key, partial, unit


class Kind(Enum):
    GROUP = "group"
    ALGEBRA = "algebra"
    GENERAL = "general"


class ConstOperator:
    """Truncated constant-coefficient operator; exact on inputs of degree <= D."""

    __slots__ = ("n", "D", "_table")

    def __init__(self, n: int, D: int, table: Mapping[Exponent, object] | None = None):
        if D < 0:
            raise ValueError("order must be non-negative")
        self.n = n
        self.D = D
        clean = {}
        for alpha, a in (table or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != n:
                raise DimensionMismatch(f"exponent {alpha} in dimension {n}")
            if sum(alpha) > D:
                raise ValueError(f"exponent {alpha} above order {D}")
            a = as_scalar(a)
            if a != 0:
                clean[alpha] = a
        self._table = dict(sorted(clean.items(), key=lambda kv: grlex_key(kv[0])))

    @classmethod
    def identity(cls, n: int, D: int) -> ConstOperator:
        return cls(n, D, {(0,) * n: 1})

    @classmethod
    def derivative(cls, n: int, D: int, alpha: Exponent | int = 0, coeff=1) -> ConstOperator:
        """``coeff * ∂^alpha``; an int ``alpha`` means the first partial in that variable."""
        if isinstance(alpha, int):
            alpha = unit(n, alpha)
        return cls(n, D, {tuple(alpha): coeff})

    @property
    def table(self) -> dict[Exponent, object]:
        return dict(self._table)

    def __getitem__(self, alpha) -> object:
        return self._table.get(tuple(alpha), Fraction(0))

    def items(self):
        return self._table.items()

    @property
    def kind(self) -> Kind:
        a0 = self[(0,) * self.n]
        if a0 == 1:
            return Kind.GROUP
        if a0 == 0:
            return Kind.ALGEBRA
        return Kind.GENERAL

    def truncate(self, D: int) -> ConstOperator:
        return ConstOperator(self.n, D, {a: c for a, c in self._table.items() if sum(a) <= D})

    def _same_shape(self, other: ConstOperator) -> int:
        if other.n != self.n:
            raise DimensionMismatch(f"dimension {self.n} vs {other.n}")
        return min(self.D, other.D)

    def __add__(self, other: ConstOperator) -> ConstOperator:
        D = self._same_shape(other)
        out = dict(self.truncate(D)._table)
        for a, c in other.truncate(D).items():
            out[a] = out.get(a, 0) + c
        return ConstOperator(self.n, D, out)

    def __neg__(self) -> ConstOperator:
        return ConstOperator(self.n, self.D, {a: -c for a, c in self._table.items()})

    def __sub__(self, other: ConstOperator) -> ConstOperator:
        return self + (-other)

    def __mul__(self, s) -> ConstOperator:
        if isinstance(s, ConstOperator):
            return compose(self, s)
        s = as_scalar(s)
        return ConstOperator(self.n, self.D, {a: c * s for a, c in self._table.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ConstOperator):
            return NotImplemented
        return (self.n, self.D, self._table) == (other.n, other.D, other._table)

    def __hash__(self):
        return hash((self.n, self.D, frozenset(self._table.items())))

    def __call__(self, f: Polynomial) -> Polynomial:
        return apply_const(self, f)

    def __repr__(self):
        body = ", ".join(f"{a}: {c}" for a, c in self._table.items())
        return f"ConstOperator(n={self.n}, D={self.D}, {{{body}}})"


def apply_const(A: ConstOperator, f: Polynomial) -> Polynomial:
    if f.n != A.n:
        raise DimensionMismatch(f"dimension {A.n} vs {f.n}")
    if f.degree > A.D:
        raise DegreeBudgetExceeded(f"deg f = {f.degree} exceeds operator order {A.D}")
    out = Polynomial.zero(A.n)
    for alpha, a in A.items():
        if sum(alpha) <= f.degree:
            out = out + partial(alpha, f) * a
    return out


def compose(A: ConstOperator, B: ConstOperator) -> ConstOperator:
    """Product series truncated at the smaller order; the product is commutative."""
    D = A._same_shape(B)
    out: dict[Exponent, object] = {}
    for a, ca in A.items():
        if sum(a) > D:
            continue
        for b, cb in B.items():
            g = exp_add(a, b)
            if sum(g) <= D:
                out[g] = out.get(g, 0) + ca * cb
    return ConstOperator(A.n, D, out)


def _power_series(X: ConstOperator, coeffs) -> ConstOperator:
    """``sum_k coeffs[k] X^k`` for k = 0..D; X must have zero constant term."""
    total = ConstOperator(X.n, X.D)
    power = ConstOperator.identity(X.n, X.D)
    for k, c in enumerate(coeffs):
        if k:
            power = compose(power, X)
            if not power.table:
                break
        if c:
            total = total + power * c
    return total


def exp_dc(A: ConstOperator, D: int | None = None) -> ConstOperator:
    """``sum_{k<=D} A^k / k!`` for an algebra element, exact at order D."""
    if A.kind is not Kind.ALGEBRA:
        raise NotAlgebraElement(f"constant coefficient is {A[(0,) * A.n]}, expected 0")
    if D is not None:
        A = A.truncate(min(D, A.D))
    coeffs, f = [], Fraction(1)
    for k in range(A.D + 1):
        if k:
            f /= k
        coeffs.append(f)
    return _power_series(A, coeffs)


def log_dc(T: ConstOperator, D: int | None = None) -> ConstOperator:
    """``-sum_{k>=1} (1 - T)^k / k`` for a group element, exact at order D."""
    if T.kind is not Kind.GROUP:
        raise NotGroupElement(f"constant coefficient is {T[(0,) * T.n]}, expected 1")
    if D is not None:
        T = T.truncate(min(D, T.D))
    N = ConstOperator.identity(T.n, T.D) - T
    coeffs = [Fraction(0)] + [Fraction(-1, k) for k in range(1, T.D + 1)]
    return _power_series(N, coeffs)
