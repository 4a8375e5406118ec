"""Sparse multivariate polynomials with exact rational coefficients.

Exponents are plain tuples of non-negative ints.  Coefficients are
:class:`fractions.Fraction` whenever the inputs are rational; floats are
tolerated so that numerical kernels (matrix exponentials) can hand back
approximate polynomials through the same type.
"""
from __future__ import annotations

import itertools
import math
import numbers
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import DimensionMismatch

Exponent = tuple[int, ...]

#: Degree of the zero polynomial.  Compares below every integer.
NEG_INF = float("-inf")


# -- multi-index helpers -----------------------------------------------------

def grlex_key(alpha: Exponent) -> tuple:
    """Sort key for graded lexicographic order (x1 > x2 > ... within a degree)."""
    return (sum(alpha), tuple(-a for a in alpha))


def monomials_of_degree(n: int, d: int) -> Iterator[Exponent]:
    if n == 1:
        yield (d,)
        return
    for first in range(d, -1, -1):
        for rest in monomials_of_degree(n - 1, d - first):
            yield (first,) + rest


def monomials(n: int, d: int) -> list[Exponent]:
    """All exponents with ``|alpha| <= d``, in graded lexicographic order."""
    if n < 1:
        raise ValueError("dimension must be positive")
    out: list[Exponent] = []
    for k in range(d + 1):
        out.extend(monomials_of_degree(n, k))
    return out


def exp_add(a: Exponent, b: Exponent) -> Exponent:
    return tuple(i + j for i, j in zip(a, b))


def exp_sub(a: Exponent, b: Exponent) -> Exponent:
    return tuple(i - j for i, j in zip(a, b))


def exp_leq(b: Exponent, a: Exponent) -> bool:
    """Componentwise ``b <= a``."""
    return all(i <= j for i, j in zip(b, a))


def exp_factorial(a: Exponent) -> int:
    return math.prod(math.factorial(i) for i in a)


def exp_binom(a: Exponent, b: Exponent) -> int:
    return math.prod(math.comb(i, j) for i, j in zip(a, b))


def falling(a: Exponent, b: Exponent) -> int:
    """``a! / (a - b)!`` componentwise, zero unless ``b <= a``."""
    return math.prod(math.perm(i, j) for i, j in zip(a, b))


def sub_exponents(a: Exponent) -> Iterator[Exponent]:
    """Every ``b`` with ``b <= a`` componentwise."""
    return itertools.product(*(range(i + 1) for i in a))


def unit(n: int, i: int) -> Exponent:
    return tuple(1 if k == i else 0 for k in range(n))


def as_scalar(c):
    """Normalise a coefficient: rationals become Fraction, reals become float."""
    if isinstance(c, Fraction):
        return c
    if isinstance(c, bool):
        raise TypeError("bool is not a coefficient")
    if isinstance(c, numbers.Integral):
        return Fraction(int(c))
    if isinstance(c, numbers.Rational):
        return Fraction(c.numerator, c.denominator)
    if isinstance(c, str):
        return Fraction(c)
    if isinstance(c, numbers.Real):
        return float(c)
    raise TypeError(f"unsupported coefficient {c!r}")


def as_point(y: Sequence) -> tuple:
    return tuple(as_scalar(v) for v in y)


# -- the polynomial type -----------------------------------------------------

class Polynomial:
    """Immutable sparse polynomial in ``n`` variables."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Exponent, object] | Iterable | None = None):
        if n < 1:
            raise ValueError("dimension must be positive")
        self.n = n
        clean: dict[Exponent, object] = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for alpha, c in items:
                alpha = tuple(int(a) for a in alpha)
                if len(alpha) != n:
                    raise DimensionMismatch(f"exponent {alpha} has length {len(alpha)}, expected {n}")
                if any(a < 0 for a in alpha):
                    raise ValueError(f"negative exponent {alpha}")
                c = as_scalar(c)
                if alpha in clean:
                    c = clean[alpha] + c
                if c == 0:
                    clean.pop(alpha, None)
                else:
                    clean[alpha] = c
        self._terms = dict(sorted(clean.items(), key=lambda kv: grlex_key(kv[0])))
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, n: int) -> Polynomial:
        return cls(n)

    @classmethod
    def constant(cls, n: int, c) -> Polynomial:
        return cls(n, {(0,) * n: c})

    @classmethod
    def monomial(cls, alpha: Sequence[int], c=1) -> Polynomial:
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: c})

    @classmethod
    def variable(cls, n: int, i: int = 0) -> Polynomial:
        return cls(n, {unit(n, i): 1})

    @classmethod
    def variables(cls, n: int) -> tuple[Polynomial, ...]:
        return tuple(cls.variable(n, i) for i in range(n))

    # read access
    @property
    def terms(self) -> Mapping[Exponent, object]:
        return MappingProxyType(self._terms)

    def items(self):
        return self._terms.items()

    def coeff(self, alpha: Sequence[int]):
        return self._terms.get(tuple(alpha), Fraction(0))

    @property
    def degree(self):
        if not self._terms:
            return NEG_INF
        return max(sum(a) for a in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_exact(self) -> bool:
        return all(isinstance(c, Fraction) for c in self._terms.values())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    # arithmetic
    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            if other.n != self.n:
                raise DimensionMismatch(f"dimension {self.n} vs {other.n}")
            return other
        return Polynomial.constant(self.n, other)

    def __add__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for alpha, c in other._terms.items():
            out[alpha] = out.get(alpha, 0) + c
        return Polynomial(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, {a: -c for a, c in self._terms.items()})

    def __sub__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            try:
                s = as_scalar(other)
            except TypeError:
                return NotImplemented
            return Polynomial(self.n, {a: c * s for a, c in self._terms.items()})
        if other.n != self.n:
            raise DimensionMismatch(f"dimension {self.n} vs {other.n}")
        out: dict[Exponent, object] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                g = exp_add(a, b)
                out[g] = out.get(g, 0) + ca * cb
        return Polynomial(self.n, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        s = as_scalar(other)
        return Polynomial(self.n, {a: c / s for a, c in self._terms.items()})

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Polynomial.constant(self.n, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.n == other.n and self._terms == other._terms
        try:
            return self == Polynomial.constant(self.n, other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, frozenset(self._terms.items())))
        return self._hash

    def __call__(self, *y):
        if len(y) == 1 and isinstance(y[0], (tuple, list)):
            y = y[0]
        return evaluate(self, y)

    def map_coefficients(self, fn) -> Polynomial:
        return Polynomial(self.n, {a: fn(c) for a, c in self._terms.items()})

    def __repr__(self):
        return f"Polynomial({self.n}, {str(self)!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        names = ["x"] if self.n == 1 else [f"x{i + 1}" for i in range(self.n)]
        parts = []
        for alpha, c in reversed(self._terms.items()):
            mono = "*".join(
                name if a == 1 else f"{name}^{a}" for name, a in zip(names, alpha) if a
            )
            neg = c < 0
            mag = -c if neg else c
            if mono and mag == 1:
                body = mono
            elif mono:
                body = f"{mag}*{mono}"
            else:
                body = str(mag)
            parts.append(("-" if neg else "+", body))
        head_sign, head = parts[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text


# -- operations --------------------------------------------------------------

def _check_dim(alpha, n):
    if len(alpha) != n:
        raise DimensionMismatch(f"length {len(alpha)} does not match dimension {n}")


def partial(alpha: Sequence[int], f: Polynomial) -> Polynomial:
    """``∂^alpha f`` with falling-factorial coefficients."""
    alpha = tuple(alpha)
    _check_dim(alpha, f.n)
    out = {}
    for beta, c in f.items():
        k = falling(beta, alpha)
        if k:
            out[exp_sub(beta, alpha)] = c * k
    return Polynomial(f.n, out)


def evaluate(f: Polynomial, y: Sequence):
    """Value of ``f`` at ``y``; exact for rational points."""
    y = as_point(y)
    _check_dim(y, f.n)
    total = Fraction(0)
    for alpha, c in f.items():
        term = c
        for yi, a in zip(y, alpha):
            if a:
                term = term * yi ** a
        total = total + term
    return total


def taylor_shift(f: Polynomial, y: Sequence) -> Polynomial:
    """Return ``g`` with ``g(u) = f(u + y)``, expanded binomially."""
    y = as_point(y)
    _check_dim(y, f.n)
    out: dict[Exponent, object] = {}
    for alpha, c in f.items():
        for k in sub_exponents(alpha):
            w = c * exp_binom(alpha, k)
            for yi, a, ki in zip(y, alpha, k):
                if a - ki:
                    w = w * yi ** (a - ki)
            if w:
                out[k] = out.get(k, 0) + w
    return Polynomial(f.n, out)
