"""Finite-dimensional invariant subspaces and exponentials on them.

An operator ``A`` has a well-defined ``exp(tA)`` on the polynomial ring exactly
when every polynomial lies in a finite-dimensional ``A``-invariant subspace.
:func:`check_in_g` searches for such subspaces by growing Krylov spans of
monomial seeds.  Stabilisation is a proof; running out of budget proves nothing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegreeBudgetExceedsOperatorOrder, NotInSubspace, NotInvariant
from .operator import DiffOperator, apply
from .poly import Exponent, Polynomial, grlex_key, monomials

DEFAULT_SEED_DEGREE = 4
DEFAULT_DEGREE_BUDGET = 12
DEFAULT_ITERATIONS = 64


class Span:
    """Exact incremental row-echelon span of polynomials.

    Each stored row keeps the combination of inserted vectors it came from, so
    that :meth:`coordinates` can express a member in the inserted basis.
    """

    def __init__(self, n: int):
        self.n = n
        self.basis: list[Polynomial] = []
        self._rows: list[tuple[Exponent, dict, dict]] = []  # pivot, vector, combination

    def __len__(self):
        return len(self.basis)

    def _reduce(self, p: Polynomial):
        vec = dict(p.terms)
        combo: dict[int, object] = {}
        for pivot, row, rcombo in self._rows:
            c = vec.get(pivot)
            if not c:
                continue
            for a, v in row.items():
                nv = vec.get(a, 0) - c * v
                if nv == 0:
                    vec.pop(a, None)
                else:
                    vec[a] = nv
            for i, v in rcombo.items():
                combo[i] = combo.get(i, 0) - c * v
        return vec, combo

    def add(self, p: Polynomial) -> bool:
        """Insert ``p``; returns False (and stores nothing) if it is already in the span."""
        if p.n != self.n:
            raise ValueError("dimension mismatch")
        vec, combo = self._reduce(p)
        if not vec:
            return False
        pivot = max(vec, key=grlex_key)
        c = vec[pivot]
        idx = len(self.basis)
        combo[idx] = combo.get(idx, 0) + 1
        row = {a: v / c for a, v in vec.items()}
        rcombo = {i: v / c for i, v in combo.items() if v}
        self._rows.append((pivot, row, rcombo))
        self.basis.append(p)
        return True

    def contains(self, p: Polynomial) -> bool:
        return not self._reduce(p)[0]

    def coordinates(self, p: Polynomial) -> list:
        """Coefficients of ``p`` in the inserted basis; raises if ``p`` is outside."""
        vec, combo = self._reduce(p)
        if vec:
            raise NotInSubspace(f"{p} is not in the span")
        return [-combo.get(i, 0) for i in range(len(self.basis))]


def _in_span(span: Span, p: Polynomial, rtol: float = 1e-9) -> bool:
    if p.is_exact and all(b.is_exact for b in span.basis):
        return span.contains(p)
    vec, _ = span._reduce(p)
    scale = max([1.0] + [abs(float(c)) for c in p.terms.values()])
    return all(abs(float(v)) <= rtol * scale for v in vec.values())


@dataclass(frozen=True)
class SubspaceCertificate:
    """Basis of an invariant subspace with the matrix of the operator on it.

    Column ``j`` of ``matrix`` holds the coordinates of ``A basis[j]``.
    """

    basis: tuple[Polynomial, ...]
    matrix: tuple[tuple, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def verify(self, A: DiffOperator) -> bool:
        try:
            return restrict_matrix(A, self.basis) == self.matrix
        except (NotInvariant, NotInSubspace):
            return False


@dataclass(frozen=True)
class OrbitStep:
    iterate: int
    degree: int


@dataclass(frozen=True)
class OrbitTrace:
    monomial: Exponent
    steps: tuple[OrbitStep, ...]
    reason: str  # "degree" or "iterations"

    @property
    def max_degree(self) -> int:
        return max(s.degree for s in self.steps)


@dataclass(frozen=True)
class MembershipVerdict:
    member: bool
    filtration: tuple[SubspaceCertificate, ...] = field(default=())
    trace: OrbitTrace | None = None

    @property
    def tag(self) -> str:
        return "member" if self.member else "budget-exceeded"


def restrict_matrix(A: DiffOperator, basis: Sequence[Polynomial]) -> tuple[tuple, ...]:
    """Matrix of ``A`` restricted to ``span(basis)``; raises NotInvariant if not closed."""
    basis = list(basis)
    span = Span(A.n)
    for b in basis:
        if not span.add(b):
            raise ValueError("basis is linearly dependent")
    cols = []
    for b in basis:
        try:
            cols.append(span.coordinates(apply(A, b)))
        except NotInSubspace:
            raise NotInvariant(f"A({b}) leaves the subspace") from None
    m = len(basis)
    return tuple(tuple(cols[j][i] for j in range(m)) for i in range(m))


def check_in_g(
    A: DiffOperator,
    seed_degree: int = DEFAULT_SEED_DEGREE,
    degree_budget: int = DEFAULT_DEGREE_BUDGET,
    iterations: int = DEFAULT_ITERATIONS,
) -> MembershipVerdict:
    """Certify that ``exp(tA)`` is well defined on polynomials of degree <= seed_degree.

    Seeds are the monomials of degree <= ``seed_degree`` in graded order.  The span
    is shared across seeds, so the certificate for seed degree ``i`` is an invariant
    subspace containing every polynomial of degree <= ``i``.
    """
    if not seed_degree <= degree_budget <= A.D:
        raise DegreeBudgetExceedsOperatorOrder(
            f"need seed_degree <= degree_budget <= A.D, got {seed_degree}, {degree_budget}, {A.D}"
        )
    span = Span(A.n)
    filtration = []
    level = 0
    for alpha in monomials(A.n, seed_degree):
        if sum(alpha) > level:
            filtration.append(_certify(A, span))
            level = sum(alpha)
        v = Polynomial.monomial(alpha)
        steps = [OrbitStep(0, v.degree)]
        if not span.add(v):
            continue
        k = 0
        while True:
            k += 1
            v = apply(A, v)
            if not v.is_zero():
                steps.append(OrbitStep(k, v.degree))
            if v.degree > degree_budget:
                return MembershipVerdict(False, trace=OrbitTrace(alpha, tuple(steps), "degree"))
            if not span.add(v):
                break
            if k >= iterations:
                return MembershipVerdict(False, trace=OrbitTrace(alpha, tuple(steps), "iterations"))
    filtration.append(_certify(A, span))
    return MembershipVerdict(True, tuple(filtration))


def _certify(A: DiffOperator, span: Span) -> SubspaceCertificate:
    basis = tuple(span.basis)
    return SubspaceCertificate(basis, restrict_matrix(A, basis))


def block_certificate(A: DiffOperator, degree: int | None = None) -> SubspaceCertificate:
    """Certificate for the block of polynomials of degree <= ``degree`` (default A.D).

    Only valid when that block is invariant, e.g. for degree-preserving ``A``.
    """
    degree = A.D if degree is None else degree
    basis = tuple(Polynomial.monomial(a) for a in monomials(A.n, degree))
    return SubspaceCertificate(basis, restrict_matrix(A, basis))


# -- numerical exponentials --------------------------------------------------

@dataclass(frozen=True)
class ExpmResult:
    matrix: np.ndarray
    squarings: int
    taylor_terms: int


def expm(M: np.ndarray) -> ExpmResult:
    """Matrix exponential by scaling and squaring with a truncated Taylor series.

    The matrix is scaled by ``2^-s`` until its 1-norm is at most 1/2, the series is
    summed until terms fall below double precision, then squared ``s`` times.
    """
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return ExpmResult(np.zeros_like(M), 0, 0)
    norm = np.linalg.norm(M, 1)
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    X = M / 2.0**s
    E = np.eye(M.shape[0])
    term = np.eye(M.shape[0])
    k = 0
    while True:
        k += 1
        term = term @ X / k
        E = E + term
        if np.linalg.norm(term, 1) <= 1e-18 * np.linalg.norm(E, 1) or k >= 60:
            break
    for _ in range(s):
        E = E @ E
    return ExpmResult(E, s, k)


def _as_float_matrix(matrix) -> np.ndarray:
    return np.array([[float(v) for v in row] for row in matrix], dtype=float).reshape(len(matrix), len(matrix))


def _coords_float(cert: SubspaceCertificate, f: Polynomial) -> np.ndarray:
    span = Span(f.n)
    for b in cert.basis:
        span.add(b)
    try:
        return np.array([float(c) for c in span.coordinates(f)], dtype=float)
    except NotInSubspace:
        raise NotInSubspace(f"{f} is not in the certified subspace") from None


def _combine(cert: SubspaceCertificate, coords: np.ndarray, n: int) -> Polynomial:
    out = Polynomial.zero(n)
    for c, b in zip(coords, cert.basis):
        if c != 0:
            out = out + b.map_coefficients(float) * float(c)
    return out


def exp_on_subspace(A: DiffOperator, cert: SubspaceCertificate, t, f: Polynomial) -> Polynomial:
    """``exp(tA) f`` computed on the certified block; float coefficients."""
    x = _coords_float(cert, f)
    M = _as_float_matrix(cert.matrix) * float(t)
    return _combine(cert, expm(M).matrix @ x, f.n)


@dataclass(frozen=True)
class LimitRow:
    k: int
    forward: float
    backward: float | None
    note: str = ""


def _max_dev(a: Polynomial, b: Polynomial) -> float:
    return max([0.0] + [abs(float(c)) for c in (a - b).terms.values()])


def limit_formula_check(
    A: DiffOperator,
    cert: SubspaceCertificate,
    f: Polynomial,
    ks: Sequence[int],
    reference: Polynomial | None = None,
) -> list[LimitRow]:
    """Max coefficient deviation of ``(1 + A/k)^k f`` and ``(1 - A/k)^-k f`` from ``exp(A) f``.

    ``reference`` replaces the numerically computed ``exp(A) f`` when an exact
    value is known.  A singular resolvent is reported in the row and skipped.
    """
    x = _coords_float(cert, f)
    M = _as_float_matrix(cert.matrix)
    I = np.eye(M.shape[0])
    target = reference if reference is not None else exp_on_subspace(A, cert, 1, f)
    rows = []
    for k in ks:
        fwd = np.linalg.matrix_power(I + M / k, k) @ x
        forward = _max_dev(_combine(cert, fwd, f.n), target)
        R = I - M / k
        if abs(np.linalg.det(R)) < 1e-300 or np.linalg.cond(R) > 1e14:
            rows.append(LimitRow(k, forward, None, "singular resolvent"))
            continue
        bwd = x.copy()
        for _ in range(k):
            bwd = np.linalg.solve(R, bwd)
        rows.append(LimitRow(k, forward, _max_dev(_combine(cert, bwd, f.n), target)))
    return rows


def strictly_decreasing(values: Sequence[float]) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))
