"""Operator calculus on real polynomial rings.

Canonical representations ``T = sum q_alpha ∂^alpha``, exact exponentials of
constant-coefficient generators, invariant-subspace certificates, and
refutation of K-positivity preservation with verifiable witnesses.
"""
from .constgroup import ConstOperator, Kind, compose, exp_dc, log_dc
from .diagonal import DiagonalSequence, c_to_t, diagonal_to_canonical, t_to_c
from .levy import LevyTriplet, evolve, refute_generator, refute_poly_generator, synth_generator
from .membership import check_in_g, exp_on_subspace, limit_formula_check, restrict_matrix
from .moment import (
    KSpec,
    NoViolationFound,
    TruncatedMomentSequence,
    ViolationCertificate,
    moment_matrix,
    necessary_condition,
    preserver_test,
    verify_certificate,
)
from .operator import (
    AtomicFunctional,
    DiffOperator,
    FiniteRankOperator,
    apply,
    canonical_from_action,
    finite_rank_apply,
    is_degree_preserving,
    specialize_at,
)
from .poly import NEG_INF, Polynomial, evaluate, partial, taylor_shift

__version__ = "0.1.0"
