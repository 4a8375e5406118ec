"""Diagonal operators ``x^alpha -> t_alpha x^alpha``.

The canonical form of a diagonal operator is ``sum (c_alpha/alpha!) x^alpha ∂^alpha``
and the two sequences are a binomial-transform pair.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .operator import DiffOperator
from .poly import Exponent, Polynomial, as_scalar, exp_binom, exp_factorial, monomials, sub_exponents


@dataclass(frozen=True)
class DiagonalSequence:
    """Dense sequence on ``|alpha| <= D``; missing entries are filled with zero."""

    n: int
    D: int
    values: Mapping[Exponent, object]
    kind: str = "t"

    def __post_init__(self):
        if self.kind not in ("t", "c"):
            raise ValueError(f"kind must be 't' or 'c', got {self.kind!r}")
        given = {tuple(a): as_scalar(v) for a, v in self.values.items()}
        dense = {}
        for alpha in monomials(self.n, self.D):
            dense[alpha] = given.pop(alpha, Fraction(0))
        if given:
            raise ValueError(f"entries outside |alpha| <= {self.D}: {sorted(given)}")
        object.__setattr__(self, "values", dense)

    @classmethod
    def from_function(cls, n: int, D: int, fn, kind: str = "t") -> DiagonalSequence:
        return cls(n, D, {a: fn(a) for a in monomials(n, D)}, kind)

    def __getitem__(self, alpha):
        return self.values[tuple(alpha)]


def t_to_c(t: DiagonalSequence) -> DiagonalSequence:
    out = {}
    for alpha in t.values:
        s = Fraction(0)
        for beta in sub_exponents(alpha):
            sign = -1 if (sum(alpha) - sum(beta)) % 2 else 1
            s = s + sign * exp_binom(alpha, beta) * t[beta]
        out[alpha] = s
    return DiagonalSequence(t.n, t.D, out, "c")


def c_to_t(c: DiagonalSequence) -> DiagonalSequence:
    out = {}
    for alpha in c.values:
        out[alpha] = sum((exp_binom(alpha, beta) * c[beta] for beta in sub_exponents(alpha)), Fraction(0))
    return DiagonalSequence(c.n, c.D, out, "t")


def diagonal_to_canonical(c: DiagonalSequence) -> DiffOperator:
    return DiffOperator(
        c.n, c.D, {alpha: Polynomial.monomial(alpha, v / exp_factorial(alpha)) for alpha, v in c.values.items()}
    )
