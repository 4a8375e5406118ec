import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from pospres.constgroup import ConstOperator
from pospres.operator import DiffOperator
from pospres.poly import Polynomial, monomials

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


@st.composite
def polynomials(draw, n=None, max_degree=4, max_terms=6):
    n = draw(st.integers(1, 3)) if n is None else n
    exps = monomials(n, max_degree)
    picked = draw(st.lists(st.sampled_from(exps), max_size=max_terms, unique=True))
    return Polynomial(n, {a: draw(rationals) for a in picked})


@st.composite
def points(draw, n):
    return tuple(draw(rationals) for _ in range(n))


@st.composite
def diff_operators(draw, n=None, max_order=4, coeff_degree=3, max_entries=5):
    n = draw(st.integers(1, 3)) if n is None else n
    D = draw(st.integers(0, max_order))
    alphas = draw(st.lists(st.sampled_from(monomials(n, D)), max_size=max_entries, unique=True))
    table = {a: draw(polynomials(n=n, max_degree=coeff_degree, max_terms=3)) for a in alphas}
    return DiffOperator(n, D, table)


@st.composite
def algebra_elements(draw, n=None, D=None, max_entries=5):
    n = draw(st.integers(1, 3)) if n is None else n
    D = draw(st.integers(1, 8)) if D is None else D
    alphas = draw(st.lists(st.sampled_from(monomials(n, D)[1:]), max_size=max_entries, unique=True))
    return ConstOperator(n, D, {a: draw(rationals) for a in alphas})


# -- plain random generators for the acceptance suite ------------------------

def rand_fraction(rng: random.Random, span=5, den=6) -> Fraction:
    return Fraction(rng.randint(-span * den, span * den), rng.randint(1, den))


def rand_poly(rng: random.Random, n: int, max_degree: int, max_terms: int = 4) -> Polynomial:
    exps = monomials(n, max_degree)
    picked = rng.sample(exps, min(len(exps), rng.randint(0, max_terms)))
    return Polynomial(n, {a: rand_fraction(rng) for a in picked})


# -- acceptance reporting ----------------------------------------------------

_acceptance: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _acceptance[marker.args[0]] = (marker.args[1], rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        title, outcome = _acceptance[number]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {verdict}  {title}")
