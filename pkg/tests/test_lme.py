"""Multiplier-matrix synthesis: catalog forms, matching, degeneracy."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from polymin.lme import (
    ConstraintTuple,
    LmeUnavailable,
    Problem,
    build_C,
    detect_catalog,
    lme_ball_sphere,
    lme_hypercube_pm1,
    lme_simplex,
    lme_triangular,
    lme_unit_box,
    multipliers_from_L,
    nonsingular_probe,
    polyhedral_lme,
    solve_L_by_matching,
    synthesize,
    verify_lme,
)
from polymin.poly import Polynomial, variables


def _identity_holds(c, L):
    return verify_lme(L.map_coeffs(Fraction) if hasattr(L, "map_coeffs") else L, build_C(c.exact()))


# ------------------------------------------------------------- catalog


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_simplex_identity(n):
    c, res = lme_simplex(n)
    assert verify_lme(res.L, build_C(c.exact()))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_unit_box_identity(n):
    c, res = lme_unit_box(n)
    assert verify_lme(res.L, build_C(c.exact()))
    assert res.degree == 1


@pytest.mark.parametrize("n", [1, 2, 3])
def test_hypercube_identity(n):
    c, res = lme_hypercube_pm1(n)
    assert verify_lme(res.L, build_C(c.exact()))


@pytest.mark.parametrize("equality", [False, True])
def test_ball_sphere_identity(equality):
    c, res = lme_ball_sphere(3, equality=equality)
    assert verify_lme(res.L, build_C(c.exact()))


def test_polyhedral_identity():
    A = [[1, 0], [0, 1], [-1, -1], [2, -1]]
    b = [0, 0, -1, -3]
    res = polyhedral_lme(A, b)
    n = 2
    xs = variables(n)
    polys = tuple(
        sum((Fraction(A[i][j]) * xs[j] for j in range(n)), Polynomial.zero(n))
        - Fraction(b[i])
        for i in range(len(A))
    )
    c = ConstraintTuple(n, polys, (), tuple(range(len(polys))))
    assert verify_lme(res.L, build_C(c.exact()))


def test_triangular_identity():
    # c_i = tau_i x_i + terms in later variables only
    x1, x2, x3 = variables(3)
    c = ConstraintTuple(3, (2 * x1 + x2 * x3 - 1, -x2 + x3**2, 3 * x3 - 2), (), (0, 1, 2))
    res = lme_triangular(c)
    assert verify_lme(res.L, build_C(c.exact()))


def test_detect_catalog_identifies_simplex():
    c, _ = lme_simplex(3)
    res = detect_catalog(c)
    assert res is not None
    assert verify_lme(res.L, build_C(c.exact()))


def test_detect_catalog_passes_on_unknown_shape():
    x1, x2 = variables(2)
    c = ConstraintTuple(2, (x1**2 + x2**2 - 1, x2 - Fraction(1, 2)), (0,), (1,))
    assert detect_catalog(c) is None


# ------------------------------------------------------------- matching


def test_matching_escalates_degree():
    """Circle with two affine caps needs cubic entries in L."""
    x1, x2 = variables(2)
    c = ConstraintTuple(
        2,
        (x1**2 + x2**2 - 1, x2 - Fraction(1, 2), -x2 - Fraction(1, 2)),
        (0,),
        (1, 2),
    )
    res = synthesize(c, hint="auto")
    assert res.method == "matching"
    assert res.degree == 3
    assert verify_lme(res.L, build_C(c.exact()))


def test_matching_at_fixed_degree_agrees():
    x1, x2 = variables(2)
    c = ConstraintTuple(2, (x1**2 + x2**2 - 1,), (0,), ())
    res = solve_L_by_matching(c, degree=1)
    assert verify_lme(res.L, build_C(c.exact()))


def test_singular_tuple_is_rejected_with_witness():
    # both constraints active at (0, +-1) with parallel gradients
    x1, x2 = variables(2)
    c = ConstraintTuple(2, (x1**2 + x2**2 - 1, x2**2 - 1), (0,), (1,))
    with pytest.raises(LmeUnavailable):
        synthesize(c, hint="auto")
    probe = nonsingular_probe(c)
    assert probe.singular
    assert probe.witness is not None
    u = np.asarray(probe.witness, dtype=complex)
    vals = [abs(q.eval(u)) for q in c.polys]
    assert max(vals) <= 1e-6


def test_probe_accepts_regular_tuple():
    c, _ = lme_simplex(2)
    probe = nonsingular_probe(c)
    assert not probe.singular


# ------------------------------------------------- multiplier reproduction


def test_sphere_multiplier_at_known_critical_points():
    c, res = lme_ball_sphere(2, equality=True)
    x1, x2 = variables(2)
    (p1,) = multipliers_from_L(res.L, x1)
    # grad f = lambda grad c at (+-1, 0) gives lambda = -+ 1/2
    assert p1.eval([1.0, 0.0]) == pytest.approx(-0.5, abs=1e-12)
    assert p1.eval([-1.0, 0.0]) == pytest.approx(0.5, abs=1e-12)


def _box_critical_pairs(f, cons):
    """All (x, lambda) with grad f = sum lambda_j grad c_j, active c_j = 0.

    The box faces are affine, so every active set gives a square linear
    system; degenerate subsets are skipped.
    """
    n = 2
    grads = [q.gradient() for q in cons.polys]
    pairs = []
    for active in itertools.chain.from_iterable(
        itertools.combinations(range(cons.m), r) for r in range(n + 1)
    ):
        def system(z):
            x, lam = z[:n], z[n:]
            gf = np.array([g.eval(x) for g in f.gradient()])
            gsum = np.zeros(n)
            for lj, j in zip(lam, active):
                gsum += lj * np.array([g.eval(x) for g in grads[j]])
            eqs = [q - g for q, g in zip(gf, gsum)]
            eqs += [cons.polys[j].eval(x) for j in active]
            return np.array(eqs)

        z = np.zeros(n + len(active))
        ok = True
        for _ in range(60):
            r = system(z)
            if np.max(np.abs(r)) < 1e-12:
                break
            h = 1e-7
            J = np.empty((len(r), len(z)))
            for i in range(len(z)):
                dz = z.copy()
                dz[i] += h
                J[:, i] = (system(dz) - r) / h
            try:
                step = np.linalg.lstsq(J, r, rcond=None)[0]
            except np.linalg.LinAlgError:
                ok = False
                break
            z = z - step
        else:
            ok = np.max(np.abs(system(z))) < 1e-9
        if not ok or np.max(np.abs(system(z))) > 1e-9:
            continue
        lam = np.zeros(cons.m)
        for lj, j in zip(z[n:], active):
            lam[j] = lj
        pairs.append((z[:n].copy(), lam))
    return pairs


def test_box_multipliers_match_brute_force_kkt():
    """p_j reproduces every box multiplier, including zero off the face."""
    cons, res = lme_unit_box(2)
    x1, x2 = variables(2)
    f = (x1 - Fraction(3, 10)) ** 2 + 2 * (x2 - Fraction(7, 10)) ** 2 + x1 * x2
    p = multipliers_from_L(res.L, f)
    pairs = _box_critical_pairs(f, cons)
    assert pairs
    for x, lam in pairs:
        for j in range(cons.m):
            assert abs(p[j].eval(x) - lam[j]) <= 1e-9


def test_problem_validates_variable_count():
    x1, x2 = variables(2)
    c = ConstraintTuple(2, (x1, x2), (), (0, 1))
    with pytest.raises(ValueError):
        Problem(variables(3)[0], c)


def test_verify_lme_rejects_wrong_shape():
    c, res = lme_simplex(2)
    c2, res2 = lme_simplex(3)
    assert not verify_lme(res2.L, build_C(c.exact()))
