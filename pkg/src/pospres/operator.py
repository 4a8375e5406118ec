"""Linear maps on the polynomial ring in canonical form ``T = sum q_alpha ∂^alpha``.

Every linear map has a unique such expansion.  A :class:`DiffOperator` stores
the coefficients ``q_alpha`` for ``|alpha| <= D``; that is enough to apply it
exactly to anything of degree at most ``D``, since higher derivatives vanish
there.  Applying it to higher-degree input raises instead of truncating.

Finite-rank maps ``f -> sum l_i(f) p_i`` with atomic functionals ``l_i`` are
kept separately; they are the simplest K-positivity preservers but the identity
is not one of them, so they do not replace the canonical form.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .constgroup import ConstOperator
from .errors import DegreeBudgetExceeded, DimensionMismatch, InconsistentAction
from .poly import (
    Exponent,
    Polynomial,
    as_point,
    as_scalar,
    evaluate,
    exp_factorial,
    exp_leq,
    exp_sub,
    falling,
    grlex_key,
    monomials,
    partial,
)


class DiffOperator:
    __slots__ = ("n", "D", "_table")

    def __init__(self, n: int, D: int, table: Mapping[Exponent, Polynomial | object] | None = None):
        if D < 0:
            raise ValueError("order must be non-negative")
        self.n = n
        self.D = D
        clean: dict[Exponent, Polynomial] = {}
        for alpha, q in (table or {}).items():
            alpha = tuple(alpha)
            if len(alpha) != n:
                raise DimensionMismatch(f"exponent {alpha} in dimension {n}")
            if sum(alpha) > D:
                raise ValueError(f"exponent {alpha} above order {D}")
            if not isinstance(q, Polynomial):
                q = Polynomial.constant(n, q)
            elif q.n != n:
                raise DimensionMismatch(f"coefficient of {alpha} has dimension {q.n}")
            if q:
                clean[alpha] = q
        self._table = dict(sorted(clean.items(), key=lambda kv: grlex_key(kv[0])))

    @classmethod
    def identity(cls, n: int, D: int) -> DiffOperator:
        return cls(n, D, {(0,) * n: 1})

    @classmethod
    def from_const(cls, A: ConstOperator) -> DiffOperator:
        return cls(A.n, A.D, dict(A.items()))

    @property
    def table(self) -> dict[Exponent, Polynomial]:
        return dict(self._table)

    def __getitem__(self, alpha) -> Polynomial:
        return self._table.get(tuple(alpha), Polynomial.zero(self.n))

    def items(self):
        return self._table.items()

    @property
    def is_exact(self) -> bool:
        return all(q.is_exact for q in self._table.values())

    def __eq__(self, other):
        if not isinstance(other, DiffOperator):
            return NotImplemented
        return (self.n, self.D, self._table) == (other.n, other.D, other._table)

    def __hash__(self):
        return hash((self.n, self.D, frozenset(self._table.items())))

    def __call__(self, f: Polynomial) -> Polynomial:
        return apply(self, f)

    def __repr__(self):
        body = ", ".join(f"{a}: {q}" for a, q in self._table.items())
        return f"DiffOperator(n={self.n}, D={self.D}, {{{body}}})"


def as_diff_operator(T) -> DiffOperator:
    if isinstance(T, DiffOperator):
        return T
    if isinstance(T, ConstOperator):
        return DiffOperator.from_const(T)
    raise TypeError(f"not an operator: {T!r}")


def apply(T: DiffOperator, f: Polynomial) -> Polynomial:
    if f.n != T.n:
        raise DimensionMismatch(f"dimension {T.n} vs {f.n}")
    if f.degree > T.D:
        raise DegreeBudgetExceeded(f"deg f = {f.degree} exceeds operator order {T.D}")
    out = Polynomial.zero(T.n)
    for alpha, q in T.items():
        if sum(alpha) <= f.degree:
            d = partial(alpha, f)
            if d:
                out = out + q * d
    return out


def _close(a: Polynomial, b: Polynomial, rtol: float) -> bool:
    if a.is_exact and b.is_exact:
        return a == b
    scale = max([1.0] + [abs(float(c)) for c in a.terms.values()] + [abs(float(c)) for c in b.terms.values()])
    diff = a - b
    return all(abs(float(c)) <= rtol * scale for c in diff.terms.values())


def canonical_from_action(
    action: Callable[[Exponent], Polynomial], n: int, D: int, rtol: float = 1e-9
) -> DiffOperator:
    """Recover the unique canonical table of a linear map from its values on monomials.

    ``T x^alpha = sum_{beta <= alpha} q_beta * alpha!/(alpha-beta)! * x^(alpha-beta)``
    is triangular in graded order, so ``q_alpha`` is solved for after removing the
    contributions of the already-known lower ``q_beta``.  The table is then checked
    against a second round of oracle calls; approximate (float) images are compared
    with relative tolerance ``rtol``.
    """
    table: dict[Exponent, Polynomial] = {}
    images: dict[Exponent, Polynomial] = {}
    for alpha in monomials(n, D):
        img = action(alpha)
        if not isinstance(img, Polynomial) or img.n != n:
            raise InconsistentAction(f"action on x^{alpha} is not a polynomial in {n} variables")
        images[alpha] = img
        rest = img
        for beta, q in table.items():
            if beta != alpha and exp_leq(beta, alpha):
                rest = rest - q * Polynomial.monomial(exp_sub(alpha, beta), falling(alpha, beta))
        q_alpha = rest / exp_factorial(alpha)
        if q_alpha:
            table[alpha] = q_alpha
    T = DiffOperator(n, D, table)
    for alpha in monomials(n, D):
        again = action(alpha)
        mono = Polynomial.monomial(alpha)
        if not (_close(again, images[alpha], rtol) and _close(apply(T, mono), again, rtol)):
            raise InconsistentAction(f"recovered table does not reproduce the action on x^{alpha}")
    return T


def action_of(fn: Callable[[Polynomial], Polynomial]) -> Callable[[Exponent], Polynomial]:
    """Adapt a map on polynomials into a monomial oracle."""
    return lambda alpha: fn(Polynomial.monomial(alpha))


def is_degree_preserving(T: DiffOperator) -> bool:
    return all(q.degree <= sum(alpha) for alpha, q in T.items())


def specialize_at(T: DiffOperator, y: Sequence) -> ConstOperator:
    """Freeze every coefficient at ``y``: ``T_y = sum q_alpha(y) ∂^alpha``."""
    y = as_point(y)
    if len(y) != T.n:
        raise DimensionMismatch(f"point of length {len(y)} in dimension {T.n}")
    return ConstOperator(T.n, T.D, {alpha: evaluate(q, y) for alpha, q in T.items()})


# -- finite-rank maps --------------------------------------------------------

@dataclass(frozen=True)
class AtomicFunctional:
    """``l(f) = sum w_i f(z_i)`` for a finite positive atomic measure."""

    atoms: tuple[tuple[tuple, Fraction], ...]

    def __post_init__(self):
        atoms = tuple((as_point(z), as_scalar(w)) for z, w in self.atoms)
        if any(w <= 0 for _, w in atoms):
            raise ValueError("atom weights must be positive")
        if len({len(z) for z, _ in atoms}) > 1:
            raise DimensionMismatch("atoms of different dimensions")
        object.__setattr__(self, "atoms", atoms)

    @classmethod
    def dirac(cls, z: Sequence, w=1) -> AtomicFunctional:
        return cls(((tuple(z), w),))

    def __call__(self, f: Polynomial):
        return sum((w * evaluate(f, z) for z, w in self.atoms), Fraction(0))


@dataclass(frozen=True)
class FiniteRankOperator:
    n: int
    pairs: tuple[tuple[AtomicFunctional, Polynomial], ...] = field(default=())

    def __post_init__(self):
        pairs = tuple(self.pairs)
        for l, p in pairs:
            if p.n != self.n or any(len(z) != self.n for z, _ in l.atoms):
                raise DimensionMismatch("all pairs must share the operator dimension")
        object.__setattr__(self, "pairs", pairs)

    def __call__(self, f: Polynomial) -> Polynomial:
        return finite_rank_apply(self, f)


def finite_rank_apply(F: FiniteRankOperator, f: Polynomial) -> Polynomial:
    if f.n != F.n:
        raise DimensionMismatch(f"dimension {F.n} vs {f.n}")
    out = Polynomial.zero(F.n)
    for l, p in F.pairs:
        out = out + p * l(f)
    return out
