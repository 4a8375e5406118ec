"""Refuting K-positivity preservation through truncated moment conditions.

``T = sum q_alpha ∂^alpha`` preserves nonnegativity on ``K`` iff, at every
``y`` in ``K``, the sequence ``alpha! q_alpha(y)`` is a moment sequence of a
measure on ``K - y``.  Only necessary conditions of that property are finitely
checkable: PSD moment matrices and localizing matrices.  A failure is turned
into a witness ``f >= 0`` on ``K`` with ``(T f)(y) < 0``, which is re-verified
exactly before it is reported.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegreeBudgetExceeded, GridPointOutsideK
from .operator import DiffOperator, apply, as_diff_operator
from .poly import (
    Exponent,
    Polynomial,
    as_point,
    as_scalar,
    evaluate,
    exp_add,
    exp_factorial,
    monomials,
    taylor_shift,
)

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
# eigenvalues within this many ulps of the matrix norm are treated as noise
_NOISE_FACTOR = 16.0


@dataclass(frozen=True)
class KSpec:
    """``R^n`` (``kind="R"``), ``[a, inf)`` (``"halfline"``) or ``[a, b]`` (``"interval"``)."""

    kind: str = "R"
    a: Fraction | None = None
    b: Fraction | None = None

    def __post_init__(self):
        if self.kind not in ("R", "halfline", "interval"):
            raise ValueError(f"unknown K kind {self.kind!r}")
        if self.kind == "halfline":
            object.__setattr__(self, "a", as_scalar(0 if self.a is None else self.a))
        if self.kind == "interval":
            if self.a is None or self.b is None:
                raise ValueError("interval needs both endpoints")
            a, b = as_scalar(self.a), as_scalar(self.b)
            if not a < b:
                raise ValueError(f"interval requires a < b, got [{a}, {b}]")
            object.__setattr__(self, "a", a)
            object.__setattr__(self, "b", b)

    @classmethod
    def parse(cls, text: str) -> KSpec:
        """``R``, ``halfline``, ``halfline:a`` or ``interval:a,b``."""
        head, _, rest = text.partition(":")
        head = head.strip().lower()
        if head in ("r", "rn", "full"):
            return cls("R")
        if head == "halfline":
            return cls("halfline", Fraction(rest) if rest else 0)
        if head == "interval":
            a, b = rest.split(",")
            return cls("interval", Fraction(a), Fraction(b))
        raise ValueError(f"cannot parse K = {text!r}")

    def __str__(self):
        if self.kind == "R":
            return "R"
        if self.kind == "halfline":
            return f"halfline:{self.a}"
        return f"interval:{self.a},{self.b}"

    def contains(self, y: Sequence) -> bool:
        if self.kind == "R":
            return True
        if len(y) != 1:
            return False
        (v,) = y
        if self.kind == "halfline":
            return v >= self.a
        return self.a <= v <= self.b

    def shifted(self, y: Sequence) -> KSpec:
        """``K - y``."""
        if self.kind == "R":
            return self
        (v,) = as_point(y)
        if self.kind == "halfline":
            return KSpec("halfline", self.a - v)
        return KSpec("interval", self.a - v, self.b - v)

    def structure_factors(self, n: int) -> dict[str, Polynomial]:
        """Polynomials that are nonnegative on K and used by localizing matrices."""
        if self.kind == "R":
            return {}
        x = Polynomial.variable(1, 0)
        out = {"x-a": x - self.a}
        if self.kind == "interval":
            out["b-x"] = self.b - x
        return out

    def default_grid(self, n: int = 1) -> list[tuple]:
        if self.kind == "R":
            pts = [()]
            for _ in range(n):
                pts = [p + (Fraction(v),) for p in pts for v in range(-2, 3)]
            return pts
        if self.kind == "halfline":
            return [(self.a + Fraction(k, 2),) for k in range(9)]
        return [(self.a + (self.b - self.a) * Fraction(k, 8),) for k in range(9)]

    def sample(self, count: int, rng: np.random.Generator, n: int = 1) -> np.ndarray:
        """Random points of K (heavy-ish tails on unbounded parts)."""
        if self.kind == "R":
            return rng.standard_cauchy((count, n)) * rng.choice([0.1, 1.0, 10.0], size=(count, 1))
        if self.kind == "halfline":
            return float(self.a) + rng.exponential(rng.choice([0.1, 1.0, 10.0], size=(count, 1)))
        return rng.uniform(float(self.a), float(self.b), size=(count, 1))


@dataclass(frozen=True)
class TruncatedMomentSequence:
    n: int
    order: int
    values: dict

    def __getitem__(self, alpha):
        return self.values[tuple(alpha)]

    @classmethod
    def from_list(cls, values: Sequence) -> TruncatedMomentSequence:
        """One-dimensional sequence ``s_0, s_1, ...``."""
        return cls(1, len(values) - 1, {(k,): as_scalar(v) for k, v in enumerate(values)})


def moment_matrix(s: TruncatedMomentSequence, d: int) -> np.ndarray:
    """``M_d[beta, gamma] = s_{beta+gamma}`` over ``|beta|, |gamma| <= d`` in graded order."""
    idx = monomials(s.n, d)
    return np.array([[float(s[exp_add(b, g)]) for g in idx] for b in idx], dtype=float)


def localizing_matrix(s: TruncatedMomentSequence, g: Polynomial, d: int) -> np.ndarray:
    """``[L_s(g x^(beta+gamma))]`` over ``|beta|, |gamma| <= d``."""
    idx = monomials(s.n, d)
    return np.array(
        [[float(sum(c * s[exp_add(exp_add(b, h), a)] for a, c in g.items())) for h in idx] for b in idx],
        dtype=float,
    ).reshape(len(idx), len(idx))


@dataclass(frozen=True)
class ConditionResult:
    """Outcome of the PSD checks for one sequence.

    On failure ``matrix`` names the failing matrix (``"moment"`` or a structure
    factor key), ``vector`` is the unit eigenvector of the most negative
    eigenvalue and ``degree`` the half-order it is indexed by.
    """

    passed: bool
    min_eigenvalue: float
    matrix: str = ""
    vector: tuple = ()
    degree: int = 0
    warning: str = ""


def _min_eig(M: np.ndarray):
    M = (M + M.T) / 2
    w, V = np.linalg.eigh(M)
    noise = _NOISE_FACTOR * M.shape[0] * np.finfo(float).eps * max(1.0, float(np.abs(w).max()))
    v = V[:, 0]
    v = v / np.linalg.norm(v)
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return float(w[0]), v, noise


def necessary_condition(s: TruncatedMomentSequence, K: KSpec, d: int, tol: float = DEFAULT_TOL) -> ConditionResult:
    """PSD test of ``M_d`` and, for half-lines and intervals, the localizing Hankels.

    An eigenvalue below ``-tol`` that is also beyond the floating-point noise
    of the matrix fails; an eigenvalue in ``[-tol, 0)`` passes with a warning.
    """
    if s.order < 2 * d:
        raise DegreeBudgetExceeded(f"sequence of order {s.order} cannot fill M_{d}")
    checks = [("moment", moment_matrix(s, d), d)]
    if d >= 1:
        for name, g in K.structure_factors(s.n).items():
            checks.append((name, localizing_matrix(s, g, d - 1), d - 1))
    overall = float("inf")
    warnings = []
    for name, M, deg in checks:
        lam, v, noise = _min_eig(M)
        overall = min(overall, lam)
        if lam < -max(tol, noise):
            return ConditionResult(False, lam, name, tuple(float(c) for c in v), deg)
        if lam < 0:
            warnings.append(f"{name}: min eigenvalue {lam:.3e} treated as round-off")
    return ConditionResult(True, overall, warning="; ".join(warnings))


# -- preserver test ----------------------------------------------------------

def shifted_moment_sequence(T: DiffOperator, y: Sequence, order: int) -> TruncatedMomentSequence:
    """``s_alpha = alpha! q_alpha(y)`` for ``|alpha| <= order``."""
    T = as_diff_operator(T)
    y = as_point(y)
    vals = {alpha: exp_factorial(alpha) * evaluate(T[alpha], y) for alpha in monomials(T.n, order)}
    return TruncatedMomentSequence(T.n, order, vals)


@dataclass(frozen=True)
class ViolationCertificate:
    """``witness = factor * root^2`` is nonnegative on K and ``(T witness)(y) = value < 0``."""

    y: tuple
    witness: Polynomial
    root: Polynomial
    factor: Polynomial
    value: object
    construction: str  # "square" or "localized-square"
    matrix: str = "moment"


@dataclass(frozen=True)
class NoViolationFound:
    """Necessary conditions passed on the tested grid; not a proof of preservation."""

    grid: tuple
    order: int
    warnings: tuple = field(default=())


def _rationalize(v: np.ndarray, digits: int) -> list[Fraction]:
    scale = 10**digits
    return [Fraction(round(c * scale), scale) for c in v]


def _witness(T: DiffOperator, K: KSpec, y: tuple, res: ConditionResult, tol: float):
    """Build and exactly check the witness for a failed condition; None if it does not confirm."""
    n = T.n
    idx = monomials(n, res.degree)
    factor = Polynomial.constant(n, 1) if res.matrix == "moment" else K.structure_factors(n)[res.matrix]
    for digits in (6, 9, 12):
        coeffs = _rationalize(np.asarray(res.vector), digits)
        p = Polynomial(n, dict(zip(idx, coeffs)))
        if p.is_zero():
            continue
        root = taylor_shift(p, tuple(-c for c in y))
        witness = factor * root * root
        value = evaluate(apply(T, witness), y)
        if value < -tol:
            return ViolationCertificate(
                y,
                witness,
                root,
                factor,
                value,
                "square" if res.matrix == "moment" else "localized-square",
                res.matrix,
            )
    return None


def preserver_test(
    T,
    K: KSpec,
    grid: Sequence[Sequence] | None = None,
    d: int = 2,
    tol: float = DEFAULT_TOL,
) -> ViolationCertificate | NoViolationFound:
    """Run the truncated moment conditions of order ``2d`` at every grid point.

    Returns the certificate for the first confirmed failure in grid order.
    """
    T = as_diff_operator(T)
    if 2 * d > T.D:
        raise DegreeBudgetExceeded(f"order 2d = {2 * d} exceeds operator order {T.D}")
    grid = K.default_grid(T.n) if grid is None else [as_point(y) for y in grid]
    for y in grid:
        if len(y) != T.n or not K.contains(y):
            raise GridPointOutsideK(f"grid point {y} is not in K = {K}")
    warnings = []
    for y in grid:
        s = shifted_moment_sequence(T, y, 2 * d)
        res = necessary_condition(s, K.shifted(y), d, tol)
        if res.warning:
            warnings.append(f"y={_fmt(y)}: {res.warning}")
        if res.passed:
            continue
        cert = _witness(T, K, y, res, tol)
        if cert is not None:
            return cert
        msg = f"y={_fmt(y)}: {res.matrix} eigenvalue {res.min_eigenvalue:.3e} not confirmed by witness"
        log.warning(msg)
        warnings.append(msg)
    return NoViolationFound(tuple(grid), d, tuple(warnings))


def _fmt(y) -> str:
    return "(" + ", ".join(str(v) for v in y) + ")"


def structurally_nonnegative(cert: ViolationCertificate, K: KSpec) -> bool:
    """``witness == factor * root^2`` with ``factor`` one of K's admissible factors."""
    n = cert.witness.n
    if cert.witness != cert.factor * cert.root * cert.root:
        return False
    if cert.factor == Polynomial.constant(n, 1):
        return True
    return any(cert.factor == g for g in K.structure_factors(n).values())


def verify_certificate(T, cert: ViolationCertificate, K: KSpec, tol: float = 0.0) -> bool:
    """Independent re-check: structure of the witness, ``y`` in K, and the sign of ``(T f)(y)``."""
    T = as_diff_operator(T)
    if cert.witness.n != T.n or len(cert.y) != T.n or not K.contains(cert.y):
        return False
    if not structurally_nonnegative(cert, K):
        return False
    if cert.witness.degree > T.D:
        return False
    value = evaluate(apply(T, cert.witness), cert.y)
    if not value < -tol:
        return False
    if isinstance(value, Fraction) and isinstance(cert.value, Fraction):
        return value == cert.value
    return abs(float(value) - float(cert.value)) <= 1e-9 * max(1.0, abs(float(value)))
