"""Ring arithmetic, grlex indexing and moment-vector behavior."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polymin.poly import (
    Polynomial,
    Tms,
    grlex_rank,
    grlex_unrank,
    moment_index_matrix,
    monomials_exact,
    monomials_upto,
    n_monomials,
    tms_of_point,
    variables,
)


def _exponents(n, deg):
    return st.tuples(*([st.integers(min_value=0, max_value=deg)] * n))


def polys(n, deg=3, coef=st.integers(min_value=-5, max_value=5)):
    return st.dictionaries(_exponents(n, deg), coef, min_size=0, max_size=6).map(
        lambda d: Polynomial(n, {a: Fraction(c) for a, c in d.items()})
    )


# ---------------------------------------------------------------- grlex


def test_grlex_rank_unrank_round_trip():
    for n in (1, 2, 3, 4):
        for r, alpha in enumerate(monomials_upto(n, 5)):
            assert grlex_rank(alpha) == r
            assert grlex_unrank(r, n) == alpha


def test_grlex_is_degree_major():
    seen = [sum(a) for a in monomials_upto(3, 4)]
    assert seen == sorted(seen)


def test_monomial_counts():
    for n in (1, 2, 3, 4):
        for d in range(6):
            assert len(monomials_upto(n, d)) == n_monomials(n, d)
            assert len(monomials_exact(n, d)) == math.comb(n + d - 1, d)


def test_moment_index_matrix_is_symmetric():
    idx = moment_index_matrix(2, 2)
    assert (idx == idx.T).all()
    mono = monomials_upto(2, 2)
    for i, a in enumerate(mono):
        for j, b in enumerate(mono):
            assert grlex_unrank(int(idx[i, j]), 2) == tuple(x + y for x, y in zip(a, b))


# ------------------------------------------------------------ ring axioms


@settings(max_examples=60, deadline=None)
@given(polys(2), polys(2), polys(2))
def test_ring_distributes(a, b, c):
    assert (a + b) * c == a * c + b * c


@settings(max_examples=60, deadline=None)
@given(polys(2), polys(2))
def test_ring_commutes(a, b):
    assert a + b == b + a
    assert a * b == b * a


@settings(max_examples=40, deadline=None)
@given(polys(2), polys(2), polys(2))
def test_mul_associates(a, b, c):
    assert (a * b) * c == a * (b * c)


@settings(max_examples=60, deadline=None)
@given(polys(2))
def test_additive_inverse(a):
    assert a - a == Polynomial.zero(2)
    assert a * Polynomial.one(2) == a


@settings(max_examples=40, deadline=None)
@given(polys(2, deg=2), polys(2, deg=2), _exponents(2, 2))
def test_eval_is_a_homomorphism(a, b, point):
    """Evaluation over exact rationals commutes with + and *."""
    x = [Fraction(v) for v in point]
    assert (a * b).eval(x) == a.eval(x) * b.eval(x)
    assert (a + b).eval(x) == a.eval(x) + b.eval(x)


@settings(max_examples=40, deadline=None)
@given(polys(3), polys(3))
def test_leibniz_rule(a, b):
    for i in range(3):
        lhs = (a * b).partial(i)
        rhs = a.partial(i) * b + a * b.partial(i)
        assert lhs == rhs


def test_degree_and_coeff_queries():
    x1, x2 = variables(2)
    p = 3 * x1**2 * x2 - x2 + 1
    assert p.degree == 3
    assert p.coeff((2, 1)) == 3
    assert p.coeff((5, 5)) == 0
    assert p.coeff((0, 0)) == 1


def test_subs_composes_with_eval():
    x1, x2 = variables(2)
    p = 3 * x1**2 * x2 - x2 + 1
    (t,) = variables(1)
    q = p.subs([t, t**2])
    for v in (-1.5, 0.0, 2.0):
        assert q.eval([v]) == pytest.approx(p.eval([v, v * v]))


def test_gradient_matches_partials():
    x1, x2, x3 = variables(3)
    f = x1**3 * x2 - 2 * x2 * x3 + x3**2
    g = f.gradient()
    for i in range(3):
        assert g[i] == f.partial(i)


# -------------------------------------------------------------- moments


def test_point_moment_vector_is_rank_one():
    rng = np.random.default_rng(7)
    for n, t in ((2, 2), (3, 2), (2, 3)):
        u = rng.uniform(-1, 1, size=n)
        y = tms_of_point(u, 2 * t)
        m = y.moment_matrix(t)
        v = np.array([np.prod(u ** np.array(a)) for a in monomials_upto(n, t)])
        assert np.allclose(m, np.outer(v, v), atol=1e-12)
        w = np.linalg.eigvalsh(m)
        assert w[-1] > 0
        assert abs(w[-2]) <= 1e-12 * max(1.0, w[-1])


def test_expectation_evaluates_at_the_atom():
    x1, x2 = variables(2)
    f = x1**2 * x2 - 3 * x2 + 2
    u = np.array([0.3, -1.2])
    y = tms_of_point(u, 6)
    assert y.expectation(f) == pytest.approx(f.eval(u), abs=1e-12)


def test_mixture_moments_are_convex():
    u, v = np.array([0.5, 1.0]), np.array([-1.0, 0.25])
    ya, yb = tms_of_point(u, 4), tms_of_point(v, 4)
    mix = Tms(2, 4, 0.5 * ya.values + 0.5 * yb.values)
    x1, x2 = variables(2)
    f = x1 * x2 + x2**2
    assert mix.expectation(f) == pytest.approx(0.5 * f.eval(u) + 0.5 * f.eval(v))
    assert np.linalg.matrix_rank(mix.moment_matrix(2), tol=1e-9) == 2


def test_tms_rejects_too_high_truncation():
    y = tms_of_point(np.array([1.0, 2.0]), 4)
    with pytest.raises(ValueError):
        y.moment_matrix(3)
